"""Command-line interface.

Every subcommand prints one JSON document on stdout.  Exit codes: 0 success,
1 validation failure, 2 numerical failure, 3 usage error.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys

import numpy as np

from . import coherence, convexroof, metrology, naimark
from .errors import ConfigInvalid, NumericalFailure, ParseError, ValidationError
from .instances import counterexample_state, counterexample_y_reference
from .io import jsonable, parse_input
from .numerics import DEFAULT_TOL, comm_norm
from .qfi import qfi, qfi_via_z
from .states import DensityMatrix, ProjectiveMeasurement, computational_basis, incoherence_residual

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _tolerances(args):
    return DEFAULT_TOL.with_overrides(
        herm=args.tol_herm,
        psd=args.tol_psd,
        recon=args.tol_recon,
        ortho=args.tol_ortho,
        zero_eig=args.tol_zero_eig,
        commute=args.tol_commute,
    )


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + n for n in missing))


def _state(args, tol):
    _need(args, "state")
    return parse_input(args.state, "state", tol)


def _povm(args, tol, attr="povm"):
    _need(args, attr)
    return parse_input(getattr(args, attr), "povm", tol)


def _observable(args, tol):
    _need(args, "observable")
    return parse_input(args.observable, "observable", tol)


def _spectrum(rho: DensityMatrix) -> dict:
    return {"eigenvalues": rho.eigenvalues, "dim": rho.dim}


def cmd_validate(args, tol):
    if args.state is None and args.povm is None and args.observable is None:
        raise UsageError("give at least one of --state, --povm, --observable")
    out = {}
    if args.state is not None:
        rho = parse_input(args.state, "state", tol)
        out["state"] = {"valid": True, **_spectrum(rho), "trace": float(np.trace(rho.matrix).real)}
    if args.povm is not None:
        E = parse_input(args.povm, "povm", tol)
        entry = {
            "valid": True,
            "type": type(E).__name__,
            "dim": E.dim,
            "n": E.n,
            "completeness_residual": float(np.linalg.norm(sum(E.elements) - np.eye(E.dim))),
        }
        if isinstance(E, ProjectiveMeasurement):
            entry["block_dims"] = list(E.block_dims)
        out["povm"] = entry
    if args.observable is not None:
        A = parse_input(args.observable, "observable", tol)
        out["observable"] = {"valid": True, "dim": A.shape[0], "eigenvalues": np.linalg.eigvalsh(A)[::-1]}
    return out


def cmd_qfi(args, tol):
    rho, A = _state(args, tol), _observable(args, tol)
    return {
        "qfi": qfi(rho, A, tol),
        "qfi_via_z": qfi_via_z(rho, A, tol),
        "convention": "prefactor 2; pure states give 4 x variance",
    }


def cmd_coherence(args, tol):
    rho, E = _state(args, tol), _povm(args, tol)
    if args.method == "direct":
        per = coherence.per_element_qfi(rho, E, tol)
        return {"direct_value": float(sum(per)), "per_element_values": per}
    if args.method == "naimark":
        return {"embedded_value": coherence.cf_embedded(rho, E, tol)}
    out = coherence.naimark_gap(rho, E, tol).to_dict()
    out["probability_residuals"] = list(naimark.probability_check(rho, E, tol).residuals)
    return out


def cmd_block_coherence(args, tol):
    rho, P = _state(args, tol), _povm(args, tol)
    if not isinstance(P, ProjectiveMeasurement):
        raise ValidationError("block-coherence needs a projective measurement (P_j P_k = delta_jk P_j)")
    return {
        "value": coherence.cf_block(rho, P, tol),
        "incoherence_residual": incoherence_residual(rho, P),
        "block_dims": list(P.block_dims),
    }


def _roof_config(args) -> convexroof.RoofConfig:
    return convexroof.RoofConfig(
        dprime=args.dprime,
        starts=args.starts,
        max_iter=args.max_iter,
        tol=args.tol,
        seed=args.seed,
    )


def _roof_dict(res: convexroof.RoofResult) -> dict:
    return {
        "lower_bound": res.lower_bound,
        "roof_value": res.roof_value,
        "gap": res.gap,
        "criterion_commutes": res.criterion_commutes,
        "max_comm_norm": res.max_comm_norm,
        "starts_used": res.starts_used,
        "iterations": res.iterations,
        "ensemble": {"weights": res.ensemble.weights, "vectors": res.ensemble.vectors},
    }


def cmd_convex_roof(args, tol):
    rho, E = _state(args, tol), _povm(args, tol)
    return _roof_dict(convexroof.convex_roof_minimize(rho, E, _roof_config(args), tol))


def cmd_criterion(args, tol):
    rho, E = _state(args, tol), _povm(args, tol)
    commutes, worst = convexroof.commutation_criterion(rho, E, tol)
    out = {
        "commutes": commutes,
        "max_comm_norm": worst,
        "y_matrices": convexroof.y_matrices(rho, E, tol),
        "cf_direct": coherence.cf_direct(rho, E, tol),
    }
    ens = convexroof.commuting_optimal_ensemble(rho, E, tol)
    if ens is None:
        out["optimal_ensemble"] = None
    else:
        out["optimal_ensemble"] = {
            "weights": ens.weights,
            "vectors": ens.vectors,
            "average": convexroof.average_pure_cf(ens, E, tol),
        }
    return out


def cmd_counterexample(args, tol):
    rho = counterexample_state()
    B = computational_basis(3)
    Ys = convexroof.y_matrices(rho, B, tol)
    ref = counterexample_y_reference()
    commutators = {
        f"{j + 1},{k + 1}": comm_norm(Ys[j], Ys[k]) for j, k in itertools.combinations(range(3), 2)
    }
    res = convexroof.convex_roof_minimize(rho, B, _roof_config(args), tol)
    out = {
        "state": rho.matrix,
        "eigenvalues": rho.eigenvalues,
        "y_matrices": Ys,
        "reference_y_matrices": ref,
        "max_entry_error": max(float(np.max(np.abs(Y - R))) for Y, R in zip(Ys, ref)),
        "commutator_norms": commutators,
        **_roof_dict(res),
    }
    out["strict_inequality"] = res.roof_value > res.lower_bound + 0.5
    return out


def cmd_metrology(args, tol):
    rho, E = _state(args, tol), _povm(args, tol)
    out = {"budget": metrology.uncertainty_budget(rho, E, args.repetitions, tol).to_dict()}
    if args.simulate:
        _need(args, "observable", "measurement")
        A = _observable(args, tol)
        M = _povm(args, tol, "measurement")
        rec = metrology.simulate_estimation(
            rho, A, M, args.theta, args.repetitions, args.trials, seed=args.seed, tol=tol
        )
        out["simulation"] = rec.to_dict()
    return out


def cmd_suite(args, tol):
    try:
        dims = [int(x) for x in args.dims.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"--dims must be a comma-separated list of integers: {exc}") from exc
    if not dims or min(dims) < 2:
        raise UsageError("--dims entries must be at least 2")
    return coherence.axiom_suite(dims, args.trials, args.seed, tol).to_dict()


COMMANDS = {
    "validate": cmd_validate,
    "qfi": cmd_qfi,
    "coherence": cmd_coherence,
    "block-coherence": cmd_block_coherence,
    "convex-roof": cmd_convex_roof,
    "criterion": cmd_criterion,
    "counterexample": cmd_counterexample,
    "metrology": cmd_metrology,
    "suite": cmd_suite,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    for name in ("herm", "psd", "recon", "ortho", "zero-eig", "commute"):
        common.add_argument(f"--tol-{name}", type=float, default=None, metavar="X")
    files = argparse.ArgumentParser(add_help=False)
    files.add_argument("--state")
    files.add_argument("--povm")
    files.add_argument("--observable")
    roof = argparse.ArgumentParser(add_help=False)
    roof.add_argument("--dprime", type=int, default=None)
    roof.add_argument("--starts", type=int, default=16)
    roof.add_argument("--max-iter", type=int, default=2000)
    roof.add_argument("--tol", type=float, default=1e-10)
    roof.add_argument("--seed", type=int, default=0)

    parser = _Parser(prog="povmqfi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("validate", parents=[common, files])
    sub.add_parser("qfi", parents=[common, files])
    p = sub.add_parser("coherence", parents=[common, files])
    p.add_argument("--method", choices=("direct", "naimark", "both"), default="both")
    sub.add_parser("block-coherence", parents=[common, files])
    sub.add_parser("convex-roof", parents=[common, files, roof])
    sub.add_parser("criterion", parents=[common, files])
    sub.add_parser("counterexample", parents=[common, roof])
    p = sub.add_parser("metrology", parents=[common, files])
    p.add_argument("--repetitions", type=int, default=1)
    p.add_argument("--simulate", action="store_true")
    p.add_argument("--measurement", help="POVM file measured in the simulation")
    p.add_argument("--theta", type=float, default=float(np.pi / 2))
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p = sub.add_parser("suite", parents=[common])
    p.add_argument("--dims", default="2,3,4")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        tol = _tolerances(args)
        result = COMMANDS[args.command](args, tol)
    except (UsageError, ConfigInvalid) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            label = exc.kind
        elif isinstance(exc, ParseError):
            label = "ParseError"
        else:
            label = "ValidationError"
        residual = getattr(exc, "residual", None)
        suffix = f" (residual {residual:.3e})" if residual is not None else ""
        print(f"{label}: {exc}{suffix}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericalFailure, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    json.dump(jsonable(result), sys.stdout, indent=2, allow_nan=False)
    sys.stdout.write("\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
