"""Command-line front end.

Exit codes: 0 on success, 1 on validation errors (bad flags, malformed
or invariant-violating input files), 2 on numerical failures.  All
diagnostics go to standard error; results go to --out or standard out.
"""

from __future__ import annotations

import argparse
import io
import sys

import numpy as np

from . import serialization
from .analysis import AntiunitaryImbedding, EprAnalyzer, construct_epr_state
from .continuum import convergence_sweep, named_test_function
from .errors import NumericalError, ParseError, ValidationError
from .groups import (
    FiniteAbelianGroup,
    bohm_state,
    epr_symmetry_table,
    spin_observables,
    spin_system_state,
)
from .linalg import Tolerances
from .states import HilbertSpace, maximal_state, singlet_state


class _Parser(argparse.ArgumentParser):
    # argparse would sys.exit(2); route flag problems through the
    # validation-error path instead so the exit-code contract holds.
    def error(self, message):
        raise ParseError(message)


def _parse_group(spec: str) -> FiniteAbelianGroup:
    try:
        orders = tuple(int(part) for part in spec.split("x"))
    except ValueError:
        raise ParseError(f"--group must look like '3' or '2x3', got {spec!r}") from None
    return FiniteAbelianGroup(orders)


def _parse_floats(text: str, flag: str):
    try:
        return [float(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise ParseError(f"{flag} must be a comma-separated list of numbers, got {text!r}") from None


def _parse_ints(text: str, flag: str):
    try:
        return [int(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise ParseError(f"{flag} must be a comma-separated list of integers, got {text!r}") from None


def _resolve_state(token: str):
    """A built-in state name, or a path to a state JSON file."""
    if token == "bohm2":
        return singlet_state()
    if token.startswith("maximal-d"):
        try:
            dim = int(token[len("maximal-d"):])
        except ValueError:
            raise ParseError(f"bad built-in state name {token!r}") from None
        return maximal_state(dim)
    if token.startswith("epr-group-"):
        return bohm_state(_parse_group(token[len("epr-group-"):]))
    try:
        return serialization.load_state(token)
    except FileNotFoundError:
        raise ParseError(
            f"--state {token!r} is neither a built-in state nor a readable file"
        ) from None


def _tolerances(args) -> Tolerances:
    return Tolerances(args.tol_cluster, args.tol_zero, args.tol_commutator)


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _analyzer(args) -> EprAnalyzer:
    return EprAnalyzer(args.tol_cluster, args.tol_zero, args.tol_commutator)


def _cmd_analyze(args) -> int:
    state = _resolve_state(args.state)
    analyzer = _analyzer(args).fit(state)
    decomposition = analyzer.decomposition_
    payload = {
        "norm": state.norm(),
        "is_maximal": decomposition.is_maximal(),
        **serialization.decomposition_to_dict(decomposition),
    }
    _emit(serialization.dumps_json(payload), args.out)
    return 0


def _cmd_check_epr(args) -> int:
    state = _resolve_state(args.state)
    tol = _tolerances(args)
    observables = [serialization.load_observable(path, tol) for path in args.obs]
    report = _analyzer(args).fit(state).report(observables, labels=args.obs)
    _emit(serialization.dumps_json(serialization.report_to_dict(report)), args.out)
    return 0


def _cmd_construct(args) -> int:
    lambdas = _parse_floats(args.lambdas, "--lambdas")
    mults = _parse_ints(args.mults, "--mults")
    if len(lambdas) != len(mults):
        raise ParseError(
            f"--lambdas has {len(lambdas)} entries but --mults has {len(mults)}"
        )
    rank = sum(mults)
    dim2 = args.dim2 if args.dim2 else rank
    dim1 = args.dim1 if args.dim1 else rank
    if dim2 < rank:
        raise ParseError(f"--dim2 {dim2} is smaller than the total multiplicity {rank}")
    eye = np.eye(dim2)
    blocks = []
    start = 0
    for mult in mults:
        blocks.append(eye[:, start:start + mult])
        start += mult
    if args.seed is None:
        matrix = np.eye(dim1, rank)
    else:
        rng = np.random.default_rng(args.seed)
        raw = rng.standard_normal((dim1, rank)) + 1j * rng.standard_normal((dim1, rank))
        matrix, _ = np.linalg.qr(raw)
    imbedding = AntiunitaryImbedding(matrix, HilbertSpace(rank), HilbertSpace(dim1))
    state = construct_epr_state(lambdas, blocks, imbedding)
    _emit(serialization.dumps_json(serialization.state_to_dict(state)), args.out)
    return 0


def _cmd_predict(args) -> int:
    state = _resolve_state(args.state)
    tol = _tolerances(args)
    observable = serialization.load_observable(args.obs[0], tol)
    partner = _analyzer(args).fit(state).predict(observable)
    _emit(serialization.dumps_json(serialization.observable_to_dict(partner)), args.out)
    return 0


def _cmd_measure(args) -> int:
    from .measurement import joint_distribution

    state = _resolve_state(args.state)
    tol = _tolerances(args)
    if len(args.obs) != 2:
        raise ParseError(
            f"measure needs exactly two --obs (first factor, then second), got {len(args.obs)}"
        )
    obs1 = serialization.load_observable(args.obs[0], tol)
    obs2 = serialization.load_observable(args.obs[1], tol)
    joint = joint_distribution(state, obs1, obs2, tol)
    if args.format == "json":
        payload = {"rows": [[a, b, p] for a, b, p in serialization.joint_to_rows(joint)]}
        _emit(serialization.dumps_json(payload), args.out)
    else:
        buffer = io.StringIO()
        serialization.write_joint_csv(joint, buffer)
        _emit(buffer.getvalue(), args.out)
    return 0


def _cmd_bohm(args) -> int:
    group = _parse_group(args.group)
    state = bohm_state(group)
    _emit(serialization.dumps_json(serialization.state_to_dict(state)), args.out)
    correlations_out = args.correlations_out
    if correlations_out is None and args.out:
        correlations_out = args.out + ".correlations.csv"
    if correlations_out:
        position_joint, momentum_joint = epr_symmetry_table(group, _tolerances(args))
        with open(correlations_out, "w", encoding="utf-8") as handle:
            handle.write("# position\n")
            serialization.write_joint_csv(position_joint, handle)
            handle.write("# momentum\n")
            serialization.write_joint_csv(momentum_joint, handle)
    return 0


def _cmd_spin_example(args) -> int:
    group = _parse_group(args.group)
    diag = _parse_floats(args.rho_diag, "--rho-diag")
    if len(diag) != args.spin_dim:
        raise ParseError(
            f"--rho-diag has {len(diag)} entries but --spin-dim is {args.spin_dim}"
        )
    tol = _tolerances(args)
    state = spin_system_state(group, args.spin_dim, np.diag(diag), tol)
    position, momentum = spin_observables(group, args.spin_dim, tol)
    report = _analyzer(args).fit(state).report(
        [position, momentum], labels=["position", "momentum"]
    )
    payload = {
        "state": serialization.state_to_dict(state),
        "report": serialization.report_to_dict(report),
    }
    _emit(serialization.dumps_json(payload), args.out)
    return 0


def _cmd_limit(args) -> int:
    sizes = _parse_ints(args.ns, "--ns")
    f = named_test_function(args.f)
    g = named_test_function(args.g)
    rows = convergence_sweep(sizes, f, g)
    if args.format == "json":
        payload = {
            "rows": [
                {
                    "N": row.n,
                    "epsilon": row.epsilon,
                    "pairing": row.pairing,
                    "target": row.target,
                    "abs_error": row.abs_error,
                }
                for row in rows
            ]
        }
        _emit(serialization.dumps_json(payload), args.out)
    else:
        buffer = io.StringIO()
        serialization.write_sweep_csv(rows, buffer)
        _emit(buffer.getvalue(), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="eprstates", description=__doc__)
    common = _Parser(add_help=False)
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--tol-cluster", type=float, default=1e-8,
                        help="relative eigenvalue clustering gap")
    common.add_argument("--tol-zero", type=float, default=1e-10,
                        help="absolute zero threshold")
    common.add_argument("--tol-commutator", type=float, default=1e-9,
                        help="relative commutation-test threshold")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common],
                       help="spectral structure of a state")
    p.add_argument("--state", required=True,
                   help="state file, or built-in (bohm2, maximal-d<k>, epr-group-<spec>)")
    p.set_defaults(handler=_cmd_analyze)

    p = sub.add_parser("check-epr", parents=[common],
                       help="commutation test against observables")
    p.add_argument("--state", required=True)
    p.add_argument("--obs", action="append", required=True,
                   help="observable file; repeatable")
    p.set_defaults(handler=_cmd_check_epr)

    p = sub.add_parser("construct", parents=[common],
                       help="build a predicting state from weights and multiplicities")
    p.add_argument("--lambdas", required=True, help="comma-separated positive weights")
    p.add_argument("--mults", required=True, help="comma-separated multiplicities")
    p.add_argument("--dim1", type=int, help="first factor dimension (default: total rank)")
    p.add_argument("--dim2", type=int, help="second factor dimension (default: total rank)")
    p.add_argument("--seed", type=int,
                   help="draw a random imbedding; omit for the standard one")
    p.set_defaults(handler=_cmd_construct)

    p = sub.add_parser("predict", parents=[common],
                       help="first-factor partner of a second-factor observable")
    p.add_argument("--state", required=True)
    p.add_argument("--obs", action="append", required=True)
    p.set_defaults(handler=_cmd_predict)

    p = sub.add_parser("measure", parents=[common],
                       help="joint distribution of a first- and second-factor observable")
    p.add_argument("--state", required=True)
    p.add_argument("--obs", action="append", required=True,
                   help="give twice: first-factor then second-factor observable")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(handler=_cmd_measure)

    p = sub.add_parser("bohm", parents=[common],
                       help="correlated state of a finite abelian group")
    p.add_argument("--group", required=True, help="cyclic orders, e.g. 3 or 2x3")
    p.add_argument("--correlations-out",
                   help="write position/momentum tables here (default: <out>.correlations.csv)")
    p.set_defaults(handler=_cmd_bohm)

    p = sub.add_parser("spin-example", parents=[common],
                       help="particle with spin on a finite abelian group")
    p.add_argument("--group", required=True)
    p.add_argument("--spin-dim", type=int, required=True)
    p.add_argument("--rho-diag", required=True,
                   help="diagonal of the unit-trace spin matrix, e.g. 0.9,0.1")
    p.set_defaults(handler=_cmd_spin_example)

    p = sub.add_parser("limit", parents=[common],
                       help="convergence sweep of the renormalized pairing")
    p.add_argument("--ns", required=True, help="comma-separated odd grid sizes")
    p.add_argument("--f", default="gauss", help="named test function")
    p.add_argument("--g", default="gauss", help="named test function")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(handler=_cmd_limit)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: missing file: {exc.filename}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
