"""Command-line interface.

Exit codes: 0 success / bound holds, 1 bound violated, 2 usage,
3 I/O, 4 hypothesis failure, 5 materialization capacity exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .bounds import verify_bound
from .clifford import (
    DEFAULT_MATERIALIZE_LIMIT,
    clifford_frobenius_norm,
    clifford_trace,
    cliff,
    tuple_frobenius_identity,
)
from .errors import CapacityExceeded, DiagonalizationFailed, HypothesisError, ZeroEigenvalue
from .generators import (
    GeneratorConfig,
    extremal_shift_example,
    perturb_within_class,
    random_commuting_diagonalizable_tuple,
    random_commuting_normal_tuple,
)
from .joint_spectrum import (
    DEFAULT_TOLERANCES,
    Tolerances,
    birkhoff_decompose,
    diagonalize_general,
    overlap_matrix,
    simultaneous_diagonalize,
)
from .tuplefile import TupleFileError, complex_pairs, read_tuple, write_tuple

EXIT_OK, EXIT_VIOLATED, EXIT_USAGE, EXIT_IO, EXIT_HYPOTHESIS, EXIT_CAPACITY = range(6)
CSV_HEADER = ["trial", "seed", "lhs", "rhs", "slack", "ratio", "holds"]
HYPOTHESIS_ERRORS = (HypothesisError, ZeroEigenvalue, DiagonalizationFailed)


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _tolerances(args) -> Tolerances:
    d = DEFAULT_TOLERANCES
    return Tolerances(
        commutation=args.commute_tol,
        normality=args.normal_tol,
        diagonalization=args.diag_tol,
        cluster=args.cluster_tol,
        singular=d.singular,
        max_eigvec_condition=args.max_eigvec_cond,
        birkhoff_cutoff=d.birkhoff_cutoff,
        birkhoff_residue=d.birkhoff_residue,
        verification=args.tol,
    )


def _load(path):
    try:
        return read_tuple(path)[0]
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc.strerror or exc}") from exc
    except TupleFileError as exc:
        raise CliError(EXIT_IO, f"{path}: {exc}") from exc


def _save(path, A, metadata):
    try:
        write_tuple(path, A, metadata)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc.strerror or exc}") from exc


def _emit_json(obj):
    print(json.dumps(obj, indent=2, sort_keys=True))


def _fmt(z: complex) -> str:
    return f"{z.real:+.10f}{z.imag:+.10f}j"


# ---------------------------------------------------------------- commands


def cmd_gen(args):
    if args.n < 1 or args.m < 1:
        raise CliError(EXIT_USAGE, "--n and --m must be positive")
    if args.kind == "extremal":
        if args.n < 2:
            raise CliError(EXIT_USAGE, "--kind extremal needs --n >= 2")
        if not args.out_b:
            raise CliError(EXIT_USAGE, "--kind extremal writes a pair; pass --out-b")
        A, B = extremal_shift_example(args.n, args.m)
        meta = {"generator": "extremal_shift_example", "n": args.n, "m": args.m}
        _save(args.out, A, dict(meta, role="A"))
        _save(args.out_b, B, dict(meta, role="B"))
        return EXIT_OK
    scale = args.perturb if args.perturb is not None else 0.0
    if scale < 0:
        raise CliError(EXIT_USAGE, "--perturb must be nonnegative")
    try:
        cfg = GeneratorConfig(args.n, args.m, seed=args.seed, perturbation_scale=scale,
                              max_condition=args.max_condition)
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from exc
    if args.kind == "normal":
        A = random_commuting_normal_tuple(cfg)
        gen = "random_commuting_normal_tuple"
    else:
        A, _ = random_commuting_diagonalizable_tuple(cfg)
        gen = "random_commuting_diagonalizable_tuple"
    meta = {"generator": gen, "seed": args.seed, "n": args.n, "m": args.m}
    _save(args.out, A, meta)
    if args.perturb is not None:
        if not args.out_b:
            raise CliError(EXIT_USAGE, "--perturb needs --out-b")
        cls = args.cls or ("normal" if args.kind == "normal" else "diagonalizable")
        if cls == "normal" and args.kind != "normal":
            raise CliError(EXIT_USAGE, "--class normal needs --kind normal")
        B = perturb_within_class(A, cfg, cls)
        _save(args.out_b, B, dict(meta, generator="perturb_within_class", cls=cls, scale=scale))
    return EXIT_OK


def cmd_spectrum(args):
    A = _load(args.input)
    tols = _tolerances(args)
    fn = simultaneous_diagonalize if args.method == "normal" else diagonalize_general
    spec = fn(A, args.seed, tols)
    if args.json:
        _emit_json({
            "n": spec.n, "m": spec.m, "method": args.method,
            "transform_kind": spec.transform_kind,
            "eigenvalues": complex_pairs(spec.eigenvalues),
            "residual": spec.residual,
        })
    else:
        print(f"joint spectrum (n={spec.n}, m={spec.m}, method={args.method})")
        for j, row in enumerate(spec.eigenvalues, 1):
            print(f"{j:4d}  " + "  ".join(_fmt(z) for z in row))
        print(f"residual {spec.residual:.3e}")
    return EXIT_OK


def cmd_verify(args):
    A = _load(args.input)
    B = _load(args.perturbed)
    tols = _tolerances(args)
    report = verify_bound(A, B, args.bound, seed=args.seed, tolerances=tols)
    payload = report.to_dict(tols)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, indent=2, sort_keys=True)
                fh.write("\n")
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot write {args.out}: {exc.strerror or exc}") from exc
    if args.json:
        _emit_json(payload)
    else:
        print(f"bound      {report.bound_kind}")
        print(f"permutation {' '.join(str(p) for p in payload['permutation'])}")
        print(f"lhs        {report.lhs:.17g}")
        print(f"rhs        {report.rhs:.17g}")
        print(f"slack      {report.slack:.6e}")
        print(f"holds      {report.holds}")
    return EXIT_OK if report.holds else EXIT_VIOLATED


def cmd_clifford(args):
    A = _load(args.input)
    C = cliff(A)
    structured = tuple_frobenius_identity(A)
    try:
        oracle = clifford_frobenius_norm(C, args.materialize_limit)
    except CapacityExceeded as exc:
        if args.require_oracle:
            raise CliError(EXIT_CAPACITY, str(exc)) from exc
        oracle = None
    trace = clifford_trace(C)
    diff = None if oracle is None else abs(oracle - structured)
    if args.json:
        _emit_json({"n": A.n, "m": A.m, "structured_norm": structured, "oracle_norm": oracle,
                    "difference": diff, "trace": [trace.real, trace.imag]})
    else:
        print(f"structured ||Cliff(A)||_F  {structured:.17g}")
        if oracle is None:
            print("materialized ||Cliff(A)||_F  skipped (capacity)")
        else:
            print(f"materialized ||Cliff(A)||_F  {oracle:.17g}")
            print(f"difference                 {diff:.3e}")
        print(f"trace                      {_fmt(trace)}")
    return EXIT_OK


def _experiment_pair(kind, cfg):
    if kind == "normal":
        A = random_commuting_normal_tuple(cfg)
        return A, perturb_within_class(A, cfg, "normal")
    if kind == "remark":
        A = random_commuting_normal_tuple(cfg)
        return A, perturb_within_class(A, cfg, "arbitrary_commuting")
    A, _ = random_commuting_diagonalizable_tuple(cfg)
    return A, perturb_within_class(A, cfg, "diagonalizable")


def _run_trial(job):
    trial, seed, n, m, kind, scale, tols = job
    cfg = GeneratorConfig(n, m, seed=seed, perturbation_scale=scale)
    A, B = _experiment_pair(kind, cfg)
    r = verify_bound(A, B, kind, seed=seed, tolerances=tols, decompose=False)
    ratio = r.lhs / r.rhs if r.rhs > 0 else (0.0 if r.lhs == 0 else float("inf"))
    return trial, seed, r.lhs, r.rhs, r.slack, ratio, r.holds


def cmd_experiment(args):
    if args.trials < 0 or args.n < 1 or args.m < 1:
        raise CliError(EXIT_USAGE, "--trials must be >= 0 and --n, --m positive")
    kind = {"diag": "diagonalizable"}.get(args.bound, args.bound)
    tols = _tolerances(args)
    jobs = [(t, args.seed + t, args.n, args.m, kind, args.perturb_scale, tols) for t in range(args.trials)]
    if args.workers > 1 and jobs:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_run_trial, jobs))
    else:
        rows = [_run_trial(j) for j in jobs]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for trial, seed, lhs, rhs, slack, ratio, holds in rows:
        w.writerow([trial, seed, repr(lhs), repr(rhs), repr(slack), repr(ratio), str(holds).lower()])
    if rows:
        ratios = [r[5] for r in rows]
        all_hold = str(all(r[6] for r in rows)).lower()
        for label, value in (("min", min(ratios)), ("median", statistics.median(ratios)), ("max", max(ratios))):
            w.writerow([f"summary_{label}", "", "", "", "", repr(float(value)), all_hold])
    try:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {args.csv}: {exc.strerror or exc}") from exc
    held = sum(r[6] for r in rows)
    print(f"{len(rows)} trials, {held} held, wrote {args.csv}")
    return EXIT_OK if held == len(rows) else EXIT_VIOLATED


def cmd_birkhoff(args):
    A = _load(args.input)
    B = _load(args.perturbed)
    tols = _tolerances(args)
    rng = np.random.default_rng(args.seed)
    sa = simultaneous_diagonalize(A, rng, tols)
    sb = simultaneous_diagonalize(B, rng, tols)
    W = overlap_matrix(sa, sb)
    dec = birkhoff_decompose(W, tols)
    err = float(np.abs(dec.reconstruct() - W.w).max())
    if args.json:
        _emit_json({
            "w": W.w.tolist(),
            "terms": [{"weight": t, "permutation": [int(p) + 1 for p in perm]} for t, perm in dec.terms],
            "reconstruction_error": err,
        })
    else:
        print("W =")
        for row in W.w:
            print("  " + "  ".join(f"{x:.10f}" for x in row))
        for t, perm in dec.terms:
            print(f"weight {t:.12f}  permutation {' '.join(str(int(p) + 1) for p in perm)}")
        print(f"reconstruction error {err:.3e}")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _tolerance_flags():
    d = DEFAULT_TOLERANCES
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("tolerances")
    g.add_argument("--commute-tol", type=float, default=d.commutation)
    g.add_argument("--normal-tol", type=float, default=d.normality)
    g.add_argument("--diag-tol", type=float, default=d.diagonalization)
    g.add_argument("--cluster-tol", type=float, default=d.cluster)
    g.add_argument("--max-eigvec-cond", type=float, default=d.max_eigvec_condition)
    g.add_argument("--tol", type=float, default=d.verification,
                   help="relative verification tolerance: holds iff lhs <= rhs + tol*(1+rhs)")
    return p


def build_parser() -> argparse.ArgumentParser:
    tol = _tolerance_flags()
    parser = argparse.ArgumentParser(prog="jointspec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write random or extremal tuple files")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kind", choices=["normal", "diagonalizable", "extremal"], default="normal")
    p.add_argument("--perturb", type=float, default=None, metavar="SCALE")
    p.add_argument("--class", dest="cls", choices=["normal", "arbitrary", "diagonalizable"], default=None)
    p.add_argument("--max-condition", type=float, default=1e3)
    p.add_argument("--out", required=True)
    p.add_argument("--out-b", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("spectrum", parents=[tol], help="joint spectrum of a tuple file")
    p.add_argument("--input", required=True)
    p.add_argument("--method", choices=["normal", "general"], default="normal")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("verify", parents=[tol], help="check a relative perturbation bound")
    p.add_argument("--input", required=True)
    p.add_argument("--perturbed", required=True)
    p.add_argument("--bound", choices=["normal", "remark", "diag", "diagonalizable"], default="normal")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", default=None, help="write the report file here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("clifford", parents=[tol], help="Clifford operator norm and trace diagnostics")
    p.add_argument("--input", required=True)
    p.add_argument("--materialize-limit", type=int, default=DEFAULT_MATERIALIZE_LIMIT)
    p.add_argument("--require-oracle", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_clifford)

    p = sub.add_parser("experiment", parents=[tol], help="batch of seeded bound checks to CSV")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--bound", choices=["normal", "remark", "diag", "diagonalizable"], default="normal")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--perturb-scale", type=float, default=1e-2)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv", required=True)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("birkhoff", parents=[tol], help="overlap matrix and Birkhoff decomposition")
    p.add_argument("--input", required=True)
    p.add_argument("--perturbed", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_birkhoff)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        if exc.code == EXIT_USAGE:
            parser.error(str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except HYPOTHESIS_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except CapacityExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY


if __name__ == "__main__":
    sys.exit(main())
