"""Batch command-line front end.

Exit codes are a stable contract: 0 success, 1 malformed input or usage,
2 proven negative (infeasible / verification failed), 3 inconclusive or
gave up. stdout carries machine-readable results, stderr human diagnostics.
"""
from __future__ import annotations

import argparse
import os
import random
import sys

from . import bounds, oracle
from .core import (
    DistributionSequence,
    TargetGraph,
    balanced_sequence,
    colour_counts,
    is_n_good,
    read_colouring,
    read_sequence,
    read_target,
    write_colouring,
)
from .constructor import (
    construct,
    construct_greedy,
    read_certificate,
    write_certificate,
)
from .errors import (
    GallaiKitError,
    NotConstructed,
    PreconditionViolation,
    RangeError,
    StructuralMismatch,
)
from .verifier import (
    find_gallai_partition,
    find_rainbow_subgraph,
    find_rainbow_triangle,
    partition_lines,
    verify_certificate,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NEGATIVE = 2
EXIT_INCONCLUSIVE = 3

_BUILTINS = {
    "k3": TargetGraph.complete(3),
    "k4": TargetGraph.complete(4),
    "c4": TargetGraph.cycle(4),
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we need 1
        raise _UsageError(message)


def _load_target(arg: str) -> TargetGraph:
    if arg.lower().startswith("builtin:"):
        name = arg.split(":", 1)[1].lower()
        if name not in _BUILTINS:
            raise _UsageError(f"unknown builtin target {name!r} (have K3, K4, C4)")
        return _BUILTINS[name]
    if not os.path.exists(arg):
        raise _UsageError(f"target file not found: {arg}")
    return read_target(arg)


def _load_sequence(arg: str, n: int, k: int | None) -> DistributionSequence:
    if arg == "balanced":
        if k is None:
            raise _UsageError("--seq balanced requires --k")
        return balanced_sequence(n, k)
    if os.path.exists(arg):
        seq = read_sequence(arg)
        if seq.n != n:
            raise _UsageError(f"sequence file is for n={seq.n}, not {n}")
        return seq
    try:
        entries = tuple(int(x) for x in arg.split())
    except ValueError:
        raise _UsageError(f"--seq must be a file, 'balanced', or integers; got {arg!r}")
    if not entries:
        raise _UsageError("--seq given an empty inline sequence")
    return DistributionSequence(n, len(entries), entries)


def _build_parser() -> _Parser:
    parser = _Parser(prog="gallaikit", description=__doc__)
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for the randomized witness sampler")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a rainbow-free colouring")
    p.add_argument("--target", required=True,
                   help="graph file or builtin:K3|builtin:K4|builtin:C4")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seq", required=True, help="file, 'balanced', or inline integers")
    p.add_argument("--k", type=int, help="colour count for --seq balanced")
    p.add_argument("--out", help="write the colouring here")
    p.add_argument("--cert", help="write the split certificate here")
    p.add_argument("--strategy", default="auto",
                   choices=["auto", "staged", "greedy", "mindeg3"])

    p = sub.add_parser("verify", help="check a colouring against target/cert/sequence")
    p.add_argument("--colouring", required=True)
    p.add_argument("--target")
    p.add_argument("--cert")
    p.add_argument("--seq")
    p.add_argument("--budget", type=int, default=2_000_000,
                   help="node budget for the rainbow search")

    p = sub.add_parser("certify", help="produce an infeasibility certificate")
    p.add_argument("--kind", required=True, choices=["triangle", "clash", "tree", "general"])
    p.add_argument("--k", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--seq", help="sequence file for clash/tree kinds")
    p.add_argument("--target", help="target for the general kind")
    p.add_argument("--out", help="write the certificate here")

    for name in ("oracle", "sweep"):
        p = sub.add_parser(name, help="exhaustive realizability table and agreement report")
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--n-max", type=int, required=True)
        p.add_argument("--target", default="builtin:K3")
        p.add_argument("--budget", type=int, default=5_000_000,
                       help="node budget per sequence")
        p.add_argument("--total-budget", type=int, default=100_000_000)
        p.add_argument("--out-dir", default=".")
    return parser


def _cmd_construct(args) -> int:
    H = _load_target(args.target)
    seq = _load_sequence(args.seq, args.n, args.k)
    if not is_n_good(seq):
        raise _UsageError(
            f"sequence sums to {seq.total}, not C({args.n},2) = {args.n * (args.n - 1) // 2}")
    try:
        result = construct(H, args.n, seq, strategy=args.strategy)
    except NotConstructed as ex:
        for reason in ex.reasons:
            print(f"gave up: {reason}", file=sys.stderr)
        if getattr(ex, "witness", None) is not None:
            print(ex.witness.witness_line("RAINBOW"), file=sys.stderr)
        return EXIT_INCONCLUSIVE
    if result.status == "infeasible":
        cert = result.infeasibility
        print(f"infeasible: {cert.kind}", file=sys.stderr)
        print(cert.inequality_text(), file=sys.stderr)
        print(cert.to_line())
        if args.cert:
            bounds.write_infeasibility(cert, args.cert)
        return EXIT_NEGATIVE
    if args.out:
        write_colouring(result.colouring, args.out)
    if args.cert and result.certificate is not None:
        write_certificate(result.certificate, args.cert)
    detail = (f"steps={len(result.certificate.steps)}"
              if result.certificate is not None else "no split certificate")
    print(f"constructed n={args.n} k={seq.k} strategy={result.strategy} {detail}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    col = read_colouring(args.colouring)
    failures: list[str] = []
    inconclusive: list[str] = []

    seq = read_sequence(args.seq) if args.seq else None
    if seq is not None and colour_counts(col) != list(seq.e):
        failures.append(f"counts {colour_counts(col)} != sequence {list(seq.e)}")

    if args.cert:
        cert = read_certificate(args.cert)
        replay_seq = seq or DistributionSequence.of(col.n, colour_counts(col))
        try:
            report = verify_certificate(cert, col, replay_seq)
        except StructuralMismatch as ex:
            raise _UsageError(str(ex))
        if not report.ok:
            where = f" at step {report.failed_step}" if report.failed_step else ""
            failures.append(f"certificate replay failed{where}: {report.reason}")

    if args.target:
        H = _load_target(args.target)
        if H.m == 3 and len(H.edges) == 3:
            w = find_rainbow_triangle(col)
            if w is not None:
                failures.append(w.witness_line("TRIANGLE"))
            elif col.n <= 64:
                out = find_gallai_partition(col)
                if out.partition is not None:
                    for line in partition_lines(out.partition):
                        print(line)
        else:
            hit = find_rainbow_subgraph(col, H, node_budget=args.budget)
            if hit.found:
                failures.append(hit.embedding.witness_line("RAINBOW"))
            elif hit.status == "inconclusive":
                # sampling can still prove presence, never absence
                w = None
                if len(H.edges) == H.m * (H.m - 1) // 2:
                    w = bounds.sample_rainbow_km(col, H.m, trials=2000,
                                                 rng=random.Random(args.seed))
                if w is not None:
                    failures.append(w.witness_line("RAINBOW"))
                else:
                    inconclusive.append("rainbow search hit its node budget")

    for line in failures:
        print(line)
    for line in inconclusive:
        print(f"inconclusive: {line}", file=sys.stderr)
    if failures:
        return EXIT_NEGATIVE
    if inconclusive:
        return EXIT_INCONCLUSIVE
    print("OK")
    return EXIT_OK


def _cmd_certify(args) -> int:
    cert = None
    try:
        if args.kind == "triangle":
            if args.k is None:
                raise _UsageError("--kind triangle requires --k")
            cert = bounds.triangle_infeasibility_check(args.k)
        elif args.kind == "clash":
            if not args.seq or args.m is None:
                raise _UsageError("--kind clash requires --seq and --m")
            cert = bounds.clash_bound_check(read_sequence(args.seq), args.m)
        elif args.kind == "tree":
            if args.seq:
                if args.m is None:
                    raise _UsageError("--kind tree requires --m")
                cert = bounds.tree_forced_check(read_sequence(args.seq), args.m)
            else:
                if None in (args.n, args.k, args.m):
                    raise _UsageError("--kind tree needs --seq or all of --n --k --m")
                cert = bounds.balanced_tree_forced_check(args.n, args.k, args.m)
        elif args.kind == "general":
            if args.k is None:
                raise _UsageError("--kind general requires --k")
            H = _load_target(args.target) if args.target else TargetGraph.complete(args.m or 3)
            _, _, cert = bounds.general_lower_sequence(H, args.k)
    except RangeError as ex:
        print(f"no certificate: {ex}", file=sys.stderr)
        return EXIT_NEGATIVE
    if cert is None:
        print("no certificate: the inequality does not hold", file=sys.stderr)
        return EXIT_NEGATIVE
    print(cert.to_line())
    if args.out:
        bounds.write_infeasibility(cert, args.out)
    return EXIT_OK


def _cmd_oracle(args) -> int:
    H = _load_target(args.target)
    report = oracle.exact_g(H, args.k, args.n_max,
                            node_budget_per_seq=args.budget,
                            total_node_budget=args.total_budget)
    os.makedirs(args.out_dir, exist_ok=True)
    tgt = args.target.split(":")[-1].lower()
    table_path = os.path.join(args.out_dir, f"realizability_{tgt}_k{args.k}.txt")
    agree_path = os.path.join(args.out_dir, f"agreement_{tgt}_k{args.k}.txt")
    disagreements = 0
    with open(table_path, "w", encoding="utf-8") as tf, \
            open(agree_path, "w", encoding="utf-8") as af:
        header = f"# target={tgt} k={args.k} n_max={args.n_max}"
        if report.partial:
            header += " PARTIAL"
        tf.write(header + "\n")
        af.write(header + "\n")
        for n in sorted(report.per_n):
            tf.write(f"# n={n}\n")
            for line in report.table_lines(n):
                tf.write(line + "\n")
            for row in report.per_n[n]:
                seq = DistributionSequence(n, args.k, row.e)
                greedy = construct_greedy(n, seq).status
                clash = "-"
                if n >= H.m >= 3:
                    clash = "forced" if bounds.clash_bound_check(seq, H.m) else "open"
                agree = "yes"
                if row.status == oracle.REALIZABLE and clash == "forced":
                    agree = "NO(clash)"
                if greedy == "certificate" and row.status == oracle.UNREALIZABLE:
                    agree = "NO(greedy)"
                if agree != "yes":
                    disagreements += 1
                af.write(" ".join(str(x) for x in row.e) +
                         f" oracle={row.status} greedy={greedy} clash={clash} agree={agree}\n")
        af.write(f"# disagreements={disagreements}\n")
    print(table_path)
    print(agree_path)
    if report.partial:
        print("PARTIAL", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        random.seed(args.seed)
        if args.command == "construct":
            return _cmd_construct(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "certify":
            return _cmd_certify(args)
        return _cmd_oracle(args)
    except _UsageError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return EXIT_USAGE
    except (PreconditionViolation, ValueError, OSError) as ex:
        print(f"error: {ex}", file=sys.stderr)
        return EXIT_USAGE
    except GallaiKitError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return EXIT_INCONCLUSIVE


if __name__ == "__main__":
    sys.exit(main())
