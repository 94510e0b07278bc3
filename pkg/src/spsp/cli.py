"""Command-line frontend: one subcommand per search stage.

    verify N [--bases m] [--factors p,q,r]   per-base psp/spsp results
    survey --bound B                         mu-classified prime records
    sequences --bound Q                      equal-signature sequences (t >= 5)
    search --t {2,3,4,5} --bound Q           one case search, resumable
    psi --m M --bound Q                      smallest spsp to the first M bases
    scan --bases M --bound B                 brute-force oracle

Searches shard over disjoint p1 ranges (SPSP_SEARCH_SHARDS sets the default
count), append feasible tuples and hits to per-shard part files, and record
the last completed p1 per shard in a plain-text checkpoint, so interrupted
runs resume without rework. A run manifest (config snapshot, timestamps,
checkpoints, output digests) makes completed runs reproducible.

Exit status: 0 clean, 1 flag errors, 2 internal hard errors.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import datetime
import json
import logging
import math
import os
import sys
import time

from . import records
from .numth import WORD_MAX
from .pseudoprimes import (
    classify,
    first_bases,
    is_psp,
    is_spsp,
    signature_fast,
    spsp_by_signature,
    survey_mu,
    survey_totals,
)
from .search import (
    CASE_SEARCHES,
    Q11,
    SearchConfig,
    SearchReport,
    find_psi,
    merge_reports,
    naive_spsp_scan,
    search_t_ge5,
)

log = logging.getLogger("spsp")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse default exits 2; flag errors are 1
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(1)


def _bound(text: str) -> int:
    value = int(text)
    if not 1 <= value <= WORD_MAX:
        raise argparse.ArgumentTypeError(f"bound {value} outside 1..2^63-1")
    return value


def _p1_range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition(":")
    try:
        return (int(lo), int(hi))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="spsp-search", description=__doc__.splitlines()[0])
    top.add_argument("-v", "--verbose", action="store_true")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="psp/spsp status of one number per base")
    p.add_argument("n", type=int)
    p.add_argument("--bases", type=int, default=9, metavar="M")
    p.add_argument("--factors", type=str, default=None,
                   help="comma-separated prime factorization of n")

    p = sub.add_parser("survey", help="mu-classified prime records up to a bound")
    p.add_argument("--bound", type=_bound, required=True)
    p.add_argument("--bases", type=int, default=9)
    p.add_argument("--out", type=str, default="-")
    p.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")

    p = sub.add_parser("sequences", help="equal-signature sequences for t >= 5")
    p.add_argument("--bound", type=_bound, default=Q11)
    p.add_argument("--bases", type=int, default=9)
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")

    p = sub.add_parser("search", help="run one t-case search")
    p.add_argument("--t", choices=("2", "3", "4", "5"), required=True)
    p.add_argument("--bound", type=_bound, default=Q11)
    p.add_argument("--bases", type=int, default=9)
    p.add_argument("--p1-range", type=_p1_range, default=None, metavar="LO:HI")
    p.add_argument("--b-max", type=int, default=None)
    p.add_argument("--threshold", type=int, default=2_000_000,
                   help="small-product threshold for the gcd trick")
    p.add_argument("--shards", type=int,
                   default=int(os.environ.get("SPSP_SEARCH_SHARDS", "1")))
    p.add_argument("--blocks", type=int, default=8,
                   help="checkpoint granularity per shard")
    p.add_argument("--max-blocks", type=int, default=None, help=argparse.SUPPRESS)
    p.add_argument("--out", type=str, default="search-records.jsonl")
    p.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    p.add_argument("--checkpoint", type=str, default=None)
    p.add_argument("--resume", action="store_true")
    p.add_argument("--manifest", type=str, default=None)

    p = sub.add_parser("psi", help="smallest spsp to the first M bases")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--bound", type=_bound, required=True)

    p = sub.add_parser("scan", help="brute-force oracle over odd composites")
    p.add_argument("--bases", type=int, required=True)
    p.add_argument("--bound", type=_bound, required=True)
    return top


def _cmd_verify(args) -> int:
    n = args.n
    bases = first_bases(args.bases)
    all_spsp = True
    for a in bases:
        psp = is_psp(n, a)
        spsp = is_spsp(n, a)
        all_spsp &= spsp
        print(f"base {a}: psp={psp} spsp={spsp}")
    print(f"{n}: " + (f"spsp for all {len(bases)} bases" if all_spsp
                      else "not spsp for every base"))
    if args.factors:
        fs = tuple(int(x) for x in args.factors.split(","))
        if math.prod(fs) != n:
            print(f"warning: {'*'.join(map(str, fs))} != {n}")
        sigs = {p: signature_fast(p, bases) for p in fs}
        for p, s in sigs.items():
            print(f"sigma({p}) = {records.sigma_str(s)}")
        shared = len(set(sigs.values())) == 1
        print(f"signatures equal: {shared}; "
              f"spsp by signature: {spsp_by_signature(fs, bases)}")
    return 0


def _cmd_survey(args) -> int:
    bases = first_bases(args.bases)
    rows = []
    collected = []
    for sr in survey_mu(args.bound, bases):
        collected.append(sr)
        rows.append(records.survey_row(sr))
    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    try:
        count = records.emit_records(rows, records.SURVEY_FIELDS, out, args.format)
    finally:
        if out is not sys.stdout:
            out.close()
    totals = survey_totals(collected)
    for label in sorted(totals):
        print(f"total {label}: {totals[label]}", file=sys.stderr)
    print(f"{count} records with mu >= 2 below {args.bound}", file=sys.stderr)
    return 0


def _cmd_sequences(args) -> int:
    cfg = SearchConfig(bound=args.bound, bases=first_bases(args.bases))
    report = search_t_ge5(cfg)
    for seq in report.sequences:
        print(f"{','.join(map(str, seq.primes))}  "
              f"sigma={records.sigma_str(seq.sigma)}  five_subsets={seq.five_subsets}")
    print(f"{len(report.sequences)} sequences, "
          f"{sum(s.five_subsets for s in report.sequences)} five-element candidates, "
          f"{len(report.hits)} spsp")
    if args.out:
        rows = [
            {
                "kind": "sequence",
                "case": "t>=5",
                "primes": ",".join(map(str, s.primes)),
                "b": str(s.five_subsets),
                "lam": "",
                "sigma": records.sigma_str(s.sigma),
            }
            for s in report.sequences
        ]
        with open(args.out, "w", newline="") as fh:
            records.emit_records(rows, records.TUPLE_FIELDS, fh, args.format)
    return 0


def _shard_ranges(lo: int, hi: int, shards: int) -> list[tuple[int, int]]:
    span = max(1, (hi - lo + shards - 1) // shards)
    return [(lo + i * span, min(lo + (i + 1) * span, hi)) for i in range(shards)
            if lo + i * span < hi]


def _run_block(case: str, config: SearchConfig, part_path: str) -> SearchReport:
    """One checkpointable unit: a case search over a p1 sub-range."""
    rows: list[dict[str, str]] = []
    fn = CASE_SEARCHES[case]
    if case in ("3", "4"):
        report = fn(config, sink=lambda t: rows.append(records.tuple_row(t)))
    else:
        report = fn(config)
    rows.extend(records.tuple_row(h) for h in report.hits)
    with open(part_path, "a", newline="") as fh:
        records.emit_records(rows, records.TUPLE_FIELDS, fh, "jsonl")
    return report


def _default_p1_span(case: str, bound: int, bases: tuple[int, ...]) -> tuple[int, int]:
    from .numth import iroot

    lo = bases[-1] + 1
    hi = {"5": iroot(bound, 5), "4": iroot(bound, 4),
          "3": iroot(bound, 3), "2": math.isqrt(bound - 1)}[case] + 1
    return lo, hi


def _cmd_search(args) -> int:
    bases = first_bases(args.bases)
    lo, hi = args.p1_range or _default_p1_span(args.t, args.bound, bases)
    base_cfg = SearchConfig(
        bound=args.bound,
        bases=bases,
        b_max=args.b_max,
        small_product_threshold=args.threshold,
    )
    ckpt_path = args.checkpoint or args.out + ".checkpoint"
    ckpt = records.Checkpoint(ckpt_path)
    state = ckpt.load() if args.resume else {}
    started = datetime.datetime.now(datetime.timezone.utc).isoformat()
    t0 = time.perf_counter()

    shard_spans = _shard_ranges(lo, hi, max(1, args.shards))
    # checkpoints advance a shard only after a block completes in order, so
    # parallel mode uses whole-shard blocks; sequential mode subdivides
    jobs: list[tuple[int, str, SearchConfig, str]] = []
    parts: dict[int, str] = {}
    for sid, (slo, shi) in enumerate(shard_spans):
        parts[sid] = f"{args.out}.part{sid}"
        resume_from = state.get(sid) if args.resume else None
        if resume_from is None or not os.path.exists(parts[sid]):
            open(parts[sid], "w").close()
        blocks = [(slo, shi)] if args.shards > 1 else _shard_ranges(slo, shi, args.blocks)
        for blo, bhi in blocks:
            if resume_from is not None and bhi <= resume_from + 1:
                continue
            cfg = SearchConfig(
                bound=base_cfg.bound, bases=base_cfg.bases,
                p1_lo=blo, p1_hi=bhi, b_max=base_cfg.b_max,
                small_product_threshold=base_cfg.small_product_threshold,
            )
            jobs.append((sid, args.t, cfg, parts[sid]))

    reports: list[SearchReport] = []
    ran = 0
    stop = False
    if args.shards > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.shards) as pool:
            futures = {
                pool.submit(_run_block, case, cfg, part): (sid, cfg)
                for sid, case, cfg, part in jobs
            }
            for fut in concurrent.futures.as_completed(futures):
                sid, cfg = futures[fut]
                reports.append(fut.result())
                state[sid] = max(state.get(sid, 0), cfg.p1_hi - 1)
                ckpt.save(state)
    else:
        for sid, case, cfg, part in jobs:
            if args.max_blocks is not None and ran >= args.max_blocks:
                stop = True
                break
            reports.append(_run_block(case, cfg, part))
            state[sid] = max(state.get(sid, 0), cfg.p1_hi - 1)
            ckpt.save(state)
            ran += 1

    if stop:
        print(f"stopped after {ran} blocks; resume with --resume", file=sys.stderr)
        return 0

    # merge part files into the deterministic final record file
    seen: set[str] = set()
    all_rows = []
    for sid in sorted(parts):
        for row in records.read_records(parts[sid], "jsonl"):
            key = json.dumps(row, sort_keys=True)
            if key not in seen:
                seen.add(key)
                all_rows.append(row)
    all_rows.sort(key=lambda r: (r["kind"], r["case"],
                                 [int(x) for x in r["primes"].split(",")]))
    with open(args.out, "w", newline="") as fh:
        records.emit_records(all_rows, records.TUPLE_FIELDS, fh, args.format)

    total = None
    for rep in reports:
        total = rep if total is None else merge_reports(total, rep)
    if total is not None:
        print(f"case t={args.t}: feasible={total.feasible_count} "
              f"examined={total.tuples_examined} candidates={total.candidate_count} "
              f"hits={sorted(h.n for h in total.hits)} "
              f"wall={time.perf_counter() - t0:.1f}s")
        if total.unresolved:
            print(f"unresolved tuples: {len(total.unresolved)}", file=sys.stderr)

    manifest = {
        "command": "search",
        "config": {
            "t": args.t, "bound": str(args.bound), "bases": args.bases,
            "p1_range": [lo, hi], "b_max": args.b_max,
            "threshold": args.threshold, "shards": args.shards,
            "blocks": args.blocks, "format": args.format,
        },
        "started": started,
        "finished": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "checkpoints": {str(k): v for k, v in sorted(state.items())},
        "outputs": {args.out: records.file_digest(args.out)},
    }
    with open(args.manifest or args.out + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def _cmd_psi(args) -> int:
    value = find_psi(args.m, args.bound)
    print(value if value is not None else f"none below {args.bound}")
    return 0


def _cmd_scan(args) -> int:
    found = naive_spsp_scan(args.bases, args.bound)
    for n in found:
        print(n)
    print(f"{len(found)} spsp below {args.bound} "
          f"for the first {args.bases} bases", file=sys.stderr)
    return 0


_COMMANDS = {
    "verify": _cmd_verify,
    "survey": _cmd_survey,
    "sequences": _cmd_sequences,
    "search": _cmd_search,
    "psi": _cmd_psi,
    "scan": _cmd_scan,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(name)s %(message)s",
    )
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # internal hard errors (factorization, I/O)
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
