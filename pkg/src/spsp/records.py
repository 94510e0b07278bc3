"""Line-delimited record formats shared by the survey and the CLI.

Two formats: jsonl (default) and csv. Value-bearing integers (n, b, primes,
lambda) are rendered as full decimal strings, never exponent notation, so
19-digit values survive consumers that parse JSON numbers as doubles.
Signatures render as a bracketed comma list. Field order is fixed, so two
runs with the same configuration produce byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass
from typing import Iterable, Iterator

from .pseudoprimes import SurveyRecord
from .search import FeasibleTuple, Hit

TUPLE_FIELDS = ("kind", "case", "primes", "b", "lam", "sigma")
SURVEY_FIELDS = ("p", "e", "lam", "mu", "sigma", "classes")


def sigma_str(sigma: tuple[int, ...]) -> str:
    return "[" + ",".join(str(s) for s in sigma) + "]"


def parse_sigma(text: str) -> tuple[int, ...]:
    inner = text.strip()
    if not (inner.startswith("[") and inner.endswith("]")):
        raise ValueError(f"malformed signature {text!r}")
    inner = inner[1:-1]
    return tuple(int(s) for s in inner.split(",")) if inner else ()


def tuple_row(item: FeasibleTuple | Hit) -> dict[str, str]:
    if isinstance(item, FeasibleTuple):
        return {
            "kind": "feasible",
            "case": item.case,
            "primes": ",".join(str(p) for p in item.primes),
            "b": str(item.b),
            "lam": str(item.lam),
            "sigma": sigma_str(item.sigma),
        }
    return {
        "kind": "hit",
        "case": item.case,
        "primes": ",".join(str(p) for p in item.primes),
        "b": str(item.n),
        "lam": "",
        "sigma": "",
    }


def survey_row(sr: SurveyRecord) -> dict[str, str]:
    rec = sr.record
    return {
        "p": str(rec.p),
        "e": str(rec.e),
        "lam": str(rec.lam),
        "mu": str(rec.mu),
        "sigma": sigma_str(rec.sigma),
        "classes": "+".join(sr.labels),
    }


def emit_records(
    rows: Iterable[dict[str, str]],
    fields: tuple[str, ...],
    out: io.TextIOBase,
    fmt: str = "jsonl",
) -> int:
    """Write rows in a deterministic field order; returns the row count."""
    count = 0
    if fmt == "jsonl":
        for row in rows:
            ordered = {k: row.get(k, "") for k in fields}
            out.write(json.dumps(ordered, separators=(",", ":")) + "\n")
            count += 1
    elif fmt == "csv":
        writer = csv.DictWriter(out, fieldnames=list(fields))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in fields})
            count += 1
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return count


def read_records(path: str, fmt: str = "jsonl") -> Iterator[dict[str, str]]:
    with open(path, newline="") as fh:
        if fmt == "jsonl":
            for line in fh:
                line = line.strip()
                if line:
                    yield json.loads(line)
        elif fmt == "csv":
            yield from csv.DictReader(fh)
        else:
            raise ValueError(f"unknown format {fmt!r}")


def file_digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


@dataclass
class Checkpoint:
    """Plain-text resume state: one "shard-id last-p1" pair per line."""

    path: str

    def load(self) -> dict[int, int]:
        state: dict[int, int] = {}
        try:
            with open(self.path) as fh:
                for line in fh:
                    parts = line.split()
                    if len(parts) == 2:
                        state[int(parts[0])] = int(parts[1])
        except FileNotFoundError:
            pass
        return state

    def save(self, state: dict[int, int]) -> None:
        with open(self.path, "w") as fh:
            for shard in sorted(state):
                fh.write(f"{shard} {state[shard]}\n")
