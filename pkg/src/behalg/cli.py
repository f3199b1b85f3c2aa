"""Command line front end: identification, algebra, simulation, verification.

File conventions: trajectories travel as CSV (header ``t,w1,...,wq``),
representations as behavior JSON documents.  All output is deterministic for
fixed inputs, seed and tolerances; JSON is written with sorted keys so golden
files can be compared byte for byte.

Exit codes: 0 success, 1 I/O or parse errors, 2 data inconsistent with an
exact LTI model, 3 controllability violations, 4 non-membership, 5 internal
identity violation (never silent).
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import pathlib
import sys

import numpy as np

from .behavior import (
    Behavior,
    behaviors_equal,
    complexity_from_trajectory,
    membership_residual,
    random_trajectory_from_kernel,
    _hankel_rank_pair,
)
from .behops import (
    OpResult,
    intersect_image,
    intersect_kernel,
    representation_poles,
    sum_image,
    sum_kernel,
)
from .errors import (
    AlgorithmFailureError,
    BehalgError,
    InconsistentComplexityError,
    InconsistentDataError,
    InvalidInputError,
    InvalidRepresentationError,
    NumericFailureError,
    UncontrollableError,
)
from .numkernel import DEFAULT_CONFIG, ToleranceConfig, numerical_rank
from .structmat import Trajectory

EXIT_OK = 0
EXIT_IO = 1
EXIT_INCONSISTENT_DATA = 2
EXIT_UNCONTROLLABLE = 3
EXIT_NON_MEMBER = 4
EXIT_IDENTITY_VIOLATION = 5


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Per-invocation settings shared by every subcommand."""

    cfg: ToleranceConfig = DEFAULT_CONFIG
    seed: int = 0
    fmt: str = "plain"


def _run_config(args: argparse.Namespace) -> RunConfig:
    cfg = DEFAULT_CONFIG
    tol = getattr(args, "tol", None)
    if tol is not None:
        cfg = dataclasses.replace(cfg, rel_rank_tol=float(tol))
    fmt = getattr(args, "format", None)
    if fmt is None:
        # the algebra commands write machine documents by default
        fmt = "json" if args.command in ("sum", "intersect") else "plain"
    return RunConfig(cfg=cfg, seed=getattr(args, "seed", 0), fmt=fmt)


def _load_behavior(path: str, cfg: ToleranceConfig) -> Behavior:
    p = pathlib.Path(path)
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: not valid JSON ({exc})") from exc
    return Behavior.from_json_dict(doc, base_dir=str(p.parent), cfg=cfg)


def _pole_list(B: Behavior, cfg: ToleranceConfig) -> list[list[float]]:
    poles = representation_poles(B.minimal_kernel(), cfg)
    pairs = sorted((round(float(z.real), 12), round(float(z.imag), 12)) for z in poles)
    return [[re, im] for re, im in pairs]


def _normalized_rows(B: Behavior) -> list[list[list[float]]]:
    # canonical minimal rows: unit norm, sign-fixed, ascending powers
    R = B.minimal_kernel()
    out = []
    for i in range(R.rows):
        row = []
        for j in range(R.cols):
            row.append([float(c) for c in R.coeff_mats[:, i, j]])
        out.append(row)
    return out


def _emit(doc: dict, args: argparse.Namespace) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    out = getattr(args, "output", None)
    if out:
        pathlib.Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# -- subcommands -------------------------------------------------------------

def cmd_complexity(args: argparse.Namespace, rc: RunConfig) -> int:
    w = Trajectory.from_csv(args.trajectory)
    r1, r2, L = _hankel_rank_pair(w, rc.cfg)
    c = complexity_from_trajectory(w, rc.cfg)
    if rc.fmt == "json":
        _emit({"q": c.q, "m": c.m, "n": c.n, "p": c.p, "lag": c.lag,
               "hankel_rank_L": r1, "hankel_rank_L_minus_1": r2,
               "window": L}, args)
    else:
        print(f"q={c.q} m={c.m} n={c.n} p={c.p} lag={c.lag}")
        print(f"hankel_rank_L={r1} hankel_rank_L_minus_1={r2} window={L}")
    return EXIT_OK


def _dimension_identity_check(A: Behavior, B: Behavior, plus: Behavior,
                              cap: Behavior, cfg: ToleranceConfig) -> int:
    """Sum/intersection dimension bookkeeping at one window past the sum lag.

    All four dimensions come from independent rank computations; a mismatch
    means an operation returned a wrong-sized behavior and is fatal.
    """
    L = plus.complexity.lag + 1
    Wa = A.window_basis(L)
    Wb = B.window_basis(L)
    dim_a, dim_b = Wa.shape[1], Wb.shape[1]
    union = np.hstack([Wa, Wb])
    dim_plus = numerical_rank(union, cfg) if union.size else 0
    dim_cap = cap.window_basis(L).shape[1]
    if dim_plus + dim_cap != dim_a + dim_b:
        raise AlgorithmFailureError(
            f"dimension identity violated at window {L}: "
            f"{dim_plus} + {dim_cap} != {dim_a} + {dim_b}"
        )
    if plus.window_basis(L).shape[1] != dim_plus:
        raise AlgorithmFailureError(
            f"sum behavior has restricted dimension "
            f"{plus.window_basis(L).shape[1]} at window {L}, expected {dim_plus}"
        )
    return L


def _binary_op(args: argparse.Namespace, rc: RunConfig, op: str) -> int:
    A = _load_behavior(args.first, rc.cfg)
    B = _load_behavior(args.second, rc.cfg)
    method = args.method
    if method == "auto":
        have_kernels = A.kernel_rep is not None and B.kernel_rep is not None
        method = "kernel" if have_kernels else "image"
    if op == "sum":
        result = (sum_kernel if method == "kernel" else sum_image)(A, B, rc.cfg)
    else:
        result = (intersect_kernel if method == "kernel" else intersect_image)(A, B, rc.cfg)

    # the dual operation, kernel side, feeds the internal dimension check;
    # an image-side intersection that dropped an autonomous part is checked
    # against the full kernel-side intersection instead of its own output
    if op == "sum":
        plus = result.behavior
        cap = intersect_kernel(A, B, rc.cfg).behavior
    else:
        cap = result.behavior
        if result.diagnostics.get("controllable_part_only"):
            cap = intersect_kernel(A, B, rc.cfg).behavior
        plus = sum_kernel(A, B, rc.cfg).behavior
    checked_L = _dimension_identity_check(A, B, plus, cap, rc.cfg)

    out = result.behavior
    c = out.complexity
    diag = dict(result.diagnostics)
    diag["method"] = result.method
    diag["chosen_L"] = result.chosen_L
    diag["kernel_rows"] = out.minimal_kernel().rows
    diag["kernel_degrees"] = [d for d in out.minimal_kernel().row_degrees()]
    diag["idempotent"] = behaviors_equal(A, B, rc.cfg)
    diag["zero_behavior"] = c.m == 0 and c.n == 0
    diag["dimension_identity_window"] = checked_L

    doc = out.to_json_dict()
    doc["complexity"] = {"q": c.q, "m": c.m, "n": c.n, "p": c.p, "lag": c.lag}
    doc["coefficients"] = _normalized_rows(out)
    doc["poles"] = _pole_list(out, rc.cfg)
    doc["diagnostics"] = diag
    if rc.fmt == "json":
        _emit(doc, args)
    else:
        print(f"{op}: q={c.q} m={c.m} n={c.n} p={c.p} lag={c.lag}")
        print(f"method={result.method} chosen_L={result.chosen_L} "
              f"idempotent={diag['idempotent']} zero_behavior={diag['zero_behavior']}")
        poles = ", ".join(f"{re:+.6f}{im:+.6f}j" for re, im in doc["poles"])
        print(f"poles=[{poles}]")
    return EXIT_OK


def cmd_sum(args: argparse.Namespace, rc: RunConfig) -> int:
    return _binary_op(args, rc, "sum")


def cmd_intersect(args: argparse.Namespace, rc: RunConfig) -> int:
    return _binary_op(args, rc, "intersect")


def cmd_simulate(args: argparse.Namespace, rc: RunConfig) -> int:
    B = _load_behavior(args.representation, rc.cfg)
    w = random_trajectory_from_kernel(B.minimal_kernel(), args.length, rc.seed, rc.cfg)
    if args.output:
        w.to_csv(args.output)
    else:
        w.to_csv(sys.stdout)
    return EXIT_OK


def cmd_member(args: argparse.Namespace, rc: RunConfig) -> int:
    w = Trajectory.from_csv(args.trajectory)
    B = _load_behavior(args.representation, rc.cfg)
    res = membership_residual(w, B, rc.cfg)
    verdict = res <= rc.cfg.subspace_eq_tol
    if rc.fmt == "json":
        _emit({"residual": res, "member": bool(verdict)}, args)
    else:
        print(f"residual={res:.6e} member={'yes' if verdict else 'no'}")
    return EXIT_OK if verdict else EXIT_NON_MEMBER


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="behalg",
        description="Linear time-invariant behaviors: identify, add, intersect, "
                    "simulate and verify from files.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None,
                        help="relative rank tolerance override")
    common.add_argument("--seed", type=int, default=0,
                        help="random seed (default 0)")
    common.add_argument("--format", choices=("json", "plain"), default=None,
                        help="stdout rendering; plain for reports, json for "
                             "the algebra commands unless overridden")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("complexity", parents=[common],
                       help="identify (q, m, n, p, lag) from a trajectory CSV")
    p.add_argument("trajectory")
    p.set_defaults(handler=cmd_complexity)

    for name, helptext in (("sum", "sum of two behaviors"),
                           ("intersect", "intersection of two behaviors")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("first")
        p.add_argument("second")
        p.add_argument("--method", choices=("kernel", "image", "auto"),
                       default="auto")
        p.add_argument("--output", default=None,
                       help="write the JSON document here instead of stdout")
        p.set_defaults(handler=cmd_sum if name == "sum" else cmd_intersect)

    p = sub.add_parser("simulate", parents=[common],
                       help="draw a seeded random trajectory of a behavior")
    p.add_argument("representation")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--output", default=None,
                   help="write the CSV here instead of stdout")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("member", parents=[common],
                       help="test whether a trajectory lies in a behavior")
    p.add_argument("trajectory")
    p.add_argument("representation")
    p.set_defaults(handler=cmd_member)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_IO
    rc = _run_config(args)
    try:
        return args.handler(args, rc)
    except InconsistentDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT_DATA
    except UncontrollableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNCONTROLLABLE
    except (AlgorithmFailureError, NumericFailureError, InconsistentComplexityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IDENTITY_VIOLATION
    except (InvalidInputError, InvalidRepresentationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
