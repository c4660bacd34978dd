"""Command line entry points.

    forestcolor run --alg greedy --workload adv:layered-cycle,d=9 \
        --delta 3 --extra 0 --n 500 --seed 7 --reps 1 --out results.csv
    forestcolor verify --suite deterministic
    forestcolor oracle enumerate --edges 0-1,1-2 --kappa 3
    forestcolor oracle min-recourse --edges 0-1,0-2 --colors 3,4 \
        --new-edge 0-3 --kappa 4
    forestcolor oracle chisq --counts 100,98,102 --support 3
    forestcolor hist --workload-file seq.txt --n 4 --delta 3 --extra 0 \
        --trials 100000 --seed 1 --out hist.csv

Exit status 0 iff every requested verdict passes.
"""

from __future__ import annotations

import argparse
import sys

from .acceptance import SUITES, run_acceptance
from .forest import Palette
from .harness import ExperimentConfig, parse_sequence, run_experiment, rows_to_csv
from .mc import script_histogram
from .oracles import (
    ColoringHistogram,
    chisq_uniformity,
    enumerate_proper_colorings,
    min_recourse_bruteforce,
)


def _parse_edges(text: str):
    out = []
    for part in text.split(","):
        a, _, b = part.partition("-")
        out.append((int(a), int(b)))
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="forestcolor", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one algorithm on one workload")
    p_run.add_argument("--alg", required=True)
    p_run.add_argument("--workload", required=True, help="workload id or sequence file")
    p_run.add_argument("--delta", type=int, required=True)
    p_run.add_argument("--extra", type=int, default=0)
    p_run.add_argument("--n", type=int, required=True)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--reps", type=int, default=1)
    p_run.add_argument("--out", default=None)

    p_verify = sub.add_parser("verify", help="run an acceptance suite")
    p_verify.add_argument("--suite", default="all", choices=sorted(SUITES))

    p_oracle = sub.add_parser("oracle", help="brute-force ground truth")
    oracle_sub = p_oracle.add_subparsers(dest="oracle_command", required=True)
    p_enum = oracle_sub.add_parser("enumerate")
    p_enum.add_argument("--edges", required=True, help="e.g. 0-1,1-2")
    p_enum.add_argument("--kappa", type=int, required=True)
    p_min = oracle_sub.add_parser("min-recourse")
    p_min.add_argument("--edges", required=True)
    p_min.add_argument("--colors", required=True, help="per edge, e.g. 1,2")
    p_min.add_argument("--new-edge", required=True, help="e.g. 2-3")
    p_min.add_argument("--kappa", type=int, required=True)
    p_chi = oracle_sub.add_parser("chisq")
    p_chi.add_argument("--counts", required=True, help="e.g. 100,98,102")
    p_chi.add_argument("--support", type=int, required=True)

    p_hist = sub.add_parser("hist", help="histogram of dist-maint colorings")
    p_hist.add_argument("--workload-file", required=True)
    p_hist.add_argument("--n", type=int, required=True)
    p_hist.add_argument("--delta", type=int, required=True)
    p_hist.add_argument("--extra", type=int, default=0)
    p_hist.add_argument("--trials", type=int, default=100_000)
    p_hist.add_argument("--seed", type=int, required=True)
    p_hist.add_argument("--out", default=None)

    args = parser.parse_args(argv)

    if args.command == "run":
        cfg = ExperimentConfig(
            algorithm=args.alg,
            workload=args.workload,
            palette=Palette(args.delta, args.extra),
            n=args.n,
            seed=args.seed,
            reps=args.reps,
            out=args.out,
        )
        rows = run_experiment(cfg)
        if not args.out:
            sys.stdout.write(rows_to_csv(rows))
        return 0

    if args.command == "verify":
        results = run_acceptance(args.suite)
        ok = True
        for res in results:
            status = "PASS" if res.passed else "FAIL"
            print(f"[criterion {res.cid}] {status} - {res.title}: {res.detail}")
            ok = ok and res.passed
        return 0 if ok else 1

    if args.command == "oracle":
        if args.oracle_command == "enumerate":
            colorings = enumerate_proper_colorings(_parse_edges(args.edges), args.kappa)
            print(len(colorings))
            return 0
        if args.oracle_command == "min-recourse":
            edges = _parse_edges(args.edges)
            colors = [int(c) for c in args.colors.split(",")]
            coloring = dict(zip(sorted(edges), colors))
            (new_edge,) = _parse_edges(getattr(args, "new_edge"))
            print(min_recourse_bruteforce(edges, coloring, new_edge, args.kappa))
            return 0
        if args.oracle_command == "chisq":
            hist = ColoringHistogram()
            for i, c in enumerate(args.counts.split(",")):
                hist.counts[str(i)] = int(c)
                hist.total += int(c)
            stat, p = chisq_uniformity(hist, args.support)
            print(f"{stat:.6f} {p:.6g}")
            return 0 if p > 0.01 else 1

    if args.command == "hist":
        with open(args.workload_file, "r", encoding="utf-8") as fh:
            updates = parse_sequence(fh.read())
        palette = Palette(args.delta, args.extra)
        hist, support = script_histogram(
            args.n, palette, updates, args.trials, args.seed
        )
        lines = ["coloring,count,expected"]
        expected = hist.total / support
        for key in sorted(hist.counts):
            lines.append(f"{key},{hist.counts[key]},{expected!r}")
        text = "\n".join(lines) + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0

    return 2  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
