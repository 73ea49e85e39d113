"""Command-line front end.

Exit codes: 0 success, 1 validation found a non constant-p set, 2 bad input
(parse or validation failure, bad arguments, unwritable output), 3 numerical
failure, 4 degenerate comparison priors (the constant answer is still printed).
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import comparison, discrimination, fock, receivers
from .gaussian import is_constant_p_set, symplectic_form
from .numerics import MonteCarloSpec, QuadratureError, QuadratureSpec
from .receivers import ReceiverKind
from .stateset import StateSetError, load_state_set

EXIT_OK = 0
EXIT_NOT_CONSTANT_P = 1
EXIT_INPUT = 2
EXIT_NUMERICS = 3
EXIT_DEGENERATE = 4

SWEEP_COLUMNS = ("helstrom", "homodyne", "displacement_pd", "bs_pd")


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _round(obj):
    """Round floats to 9 significant digits for output."""
    if isinstance(obj, (float, np.floating)):
        return float(f"{float(obj):.9g}")
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _emit(payload: dict, out) -> None:
    out.write(json.dumps(_round(payload), indent=2, sort_keys=True) + "\n")


def _spec(args, n_modes: int):
    method = args.method
    if method == "auto":
        method = "quadrature" if n_modes <= 2 else "monte-carlo"
    if method == "quadrature":
        return QuadratureSpec(tol=args.tol)
    return MonteCarloSpec(samples=args.samples, seed=args.seed)


def _load(path):
    try:
        return load_state_set(path)
    except StateSetError as exc:
        raise CliError(str(exc)) from exc


def cmd_discriminate(args, out) -> int:
    sset = _load(args.file)
    hyps = sset.hypotheses()
    if len(hyps) != 2:
        raise CliError(f"discrimination needs exactly 2 hypotheses, file defines {len(hyps)}")
    prob = discrimination.DiscriminationProblem(hyps[0], hyps[1], args.prior)
    report = discrimination.optimal_gaussian_error(prob, _spec(args, prob.n_modes))
    payload = {"command": "discriminate", "prior": prob.prior, **report.to_dict(),
               "constant_p": {"ok": prob.constant_p.ok,
                              "diagnostic": prob.constant_p.diagnostic}}
    if args.oracle:
        try:
            r1 = fock.from_gaussian_mixture(hyps[0], args.cutoff)
            r2 = fock.from_gaussian_mixture(hyps[1], r1.cutoff)
        except ValueError as exc:
            payload["oracle"] = {"skipped": str(exc)}
        else:
            payload["oracle"] = {
                "helstrom_error": fock.helstrom_error_numeric(r1, r2, prob.prior),
                "cutoff": r1.cutoff,
            }
    _emit(payload, out)
    return EXIT_OK


def _pair_priors(args, m: int):
    if args.product_q is not None:
        if m != 2:
            raise CliError(f"--product-q needs exactly 2 states, file defines {m}")
        q = args.product_q
        if not 0 <= q <= 1:
            raise CliError("--product-q must lie in [0, 1]")
        return np.array([[q * q, q * (1 - q)], [q * (1 - q), (1 - q) ** 2]])
    if args.pair_priors is not None:
        try:
            pij = np.array(json.loads(args.pair_priors), dtype=float)
        except (ValueError, TypeError) as exc:
            raise CliError(f"--pair-priors is not a JSON matrix: {exc}") from exc
        return pij
    return np.full((m, m), 1.0 / (m * m))


def cmd_compare(args, out) -> int:
    sset = _load(args.file)
    hyps = sset.hypotheses()
    try:
        prob = comparison.ComparisonProblem(tuple(hyps), _pair_priors(args, len(hyps)))
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    reduced = comparison.reduce_to_discrimination(prob)
    payload = {"command": "compare", "p_equal": prob.p_equal}
    if isinstance(reduced, comparison.DegenerateComparison):
        report = comparison.optimal_gaussian_comparison_error(prob)
        payload.update(report.to_dict(), degenerate=True)
        _emit(payload, out)
        return EXIT_DEGENERATE
    spec = _spec(args, reduced.n_modes)
    report = discrimination.optimal_gaussian_error(reduced, spec)
    payload.update(report.to_dict(), degenerate=False,
                   constant_p={"ok": reduced.constant_p.ok,
                               "diagnostic": reduced.constant_p.diagnostic})
    if args.product_q is not None:
        binary = comparison.BinaryComparisonProblem(hyps[0], hyps[1], args.product_q)
        slot_spec = spec
        if isinstance(spec, QuadratureSpec) and binary.slot_problem().n_modes > 2:
            slot_spec = MonteCarloSpec(samples=args.samples, seed=args.seed)
        per_mode = comparison.binary_comparison_error_via_per_mode(binary, slot_spec)
        payload["per_mode"] = per_mode.to_dict()
        payload["agreement_gap"] = abs(per_mode.value - report.value)
        payload["combined_tolerance"] = per_mode.half_width + report.half_width
    _emit(payload, out)
    return EXIT_OK


@dataclass(frozen=True)
class SweepConfig:
    alpha_min: float = 0.0
    alpha_max: float = 2.0
    steps: int = 101
    photon_grid: bool = True
    receivers: tuple[str, ...] = field(default=SWEEP_COLUMNS)
    output: str = "-"

    def __post_init__(self):
        if not 0 <= self.alpha_min < self.alpha_max:
            raise ValueError("need 0 <= alpha_min < alpha_max")
        if self.steps < 2:
            raise ValueError("steps must be at least 2")
        unknown = [r for r in self.receivers if r not in SWEEP_COLUMNS]
        if unknown:
            raise ValueError(f"unknown receivers {unknown}; choose from {list(SWEEP_COLUMNS)}")
        if not self.receivers:
            raise ValueError("at least one receiver column is required")

    def grid(self) -> np.ndarray:
        """Mean photon numbers, ascending."""
        if self.photon_grid:
            return np.linspace(self.alpha_min ** 2, self.alpha_max ** 2, self.steps)
        return np.linspace(self.alpha_min, self.alpha_max, self.steps) ** 2


def sweep_csv(config: SweepConfig) -> str:
    cols = [c for c in SWEEP_COLUMNS if c in config.receivers]
    nbar = config.grid()
    alpha = np.sqrt(nbar)
    table = [nbar] + [np.atleast_1d(receivers.CLOSED_FORMS[ReceiverKind(c)](alpha)) for c in cols]
    buf = io.StringIO()
    buf.write(",".join(["mean_photon_number", *cols]) + "\n")
    for row in zip(*table):
        buf.write(",".join(f"{v:.9g}" for v in row) + "\n")
    return buf.getvalue()


def cmd_sweep(args, out) -> int:
    try:
        config = SweepConfig(args.alpha_min, args.alpha_max, args.steps,
                             args.grid == "photon", tuple(args.receivers.split(",")),
                             args.output)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    text = sweep_csv(config)
    if config.output == "-":
        out.write(text)
    else:
        try:
            with open(config.output, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise CliError(f"cannot write {config.output}: {exc}") from exc
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    spec = MonteCarloSpec(samples=args.samples, seed=args.seed)
    if args.alpha < 0:
        raise CliError("--alpha must be non-negative")
    if args.kind == "homodyne":
        prob = comparison.bpsk_comparison(args.alpha, 0.5).to_comparison()
        reduced = comparison.reduce_to_discrimination(prob)
        report = discrimination.simulate_homodyne_protocol(reduced, spec)
        analytic = receivers.homodyne_comparison_error(args.alpha)
    else:
        report = receivers.simulate_receiver(args.kind, args.alpha, spec)
        analytic = receivers.CLOSED_FORMS[ReceiverKind(args.kind)](args.alpha)
    payload = {"command": "simulate", "kind": args.kind, "alpha": args.alpha,
               **report.to_dict(), "analytic": analytic}
    _emit(payload, out)
    return EXIT_OK


def cmd_validate(args, out) -> int:
    sset = _load(args.file)
    states = []
    for i, s in enumerate(sset.states):
        min_eig = float(np.linalg.eigvalsh(s.cov + 1j * symplectic_form(s.n_modes)).min())
        states.append({"index": i, "valid": True, "min_uncertainty_eigenvalue": min_eig,
                       "coherent": s.is_coherent()})
    check = is_constant_p_set(sset.states)
    payload = {"command": "validate", "n_modes": sset.n_modes, "states": states,
               "hypotheses": len(sset.hypotheses()),
               "constant_p": {"ok": check.ok, "diagnostic": check.diagnostic}}
    if args.dump:
        try:
            with open(args.dump, "w") as fh:
                fh.write(sset.dumps() + "\n")
        except OSError as exc:
            raise CliError(f"cannot write {args.dump}: {exc}") from exc
    _emit(payload, out)
    return EXIT_OK if check.ok else EXIT_NOT_CONSTANT_P


def _add_numeric_flags(p):
    p.add_argument("--method", choices=("auto", "quadrature", "monte-carlo"), default="auto")
    p.add_argument("--tol", type=float, default=QuadratureSpec.tol)
    p.add_argument("--samples", type=int, default=MonteCarloSpec.samples)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsd",
        description="Optimal Gaussian discrimination and comparison of constant-p Gaussian states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("discriminate", help="optimal Gaussian error for two hypotheses")
    p.add_argument("file")
    p.add_argument("--prior", type=float, default=0.5, help="probability of hypothesis 1")
    p.add_argument("--oracle", action="store_true",
                   help="also compute the Helstrom error in a truncated Fock basis")
    p.add_argument("--cutoff", type=int, default=None)
    _add_numeric_flags(p)
    p.set_defaults(func=cmd_discriminate)

    p = sub.add_parser("compare", help="optimal Gaussian state comparison error")
    p.add_argument("file")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--product-q", type=float, default=None)
    g.add_argument("--pair-priors", default=None, help="m x m JSON matrix of p_ij")
    _add_numeric_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="BPSK comparison error curves as CSV")
    p.add_argument("--alpha-min", type=float, default=SweepConfig.alpha_min)
    p.add_argument("--alpha-max", type=float, default=SweepConfig.alpha_max)
    p.add_argument("--steps", type=int, default=SweepConfig.steps)
    p.add_argument("--grid", choices=("photon", "alpha"), default="photon",
                   help="space grid points evenly in mean photon number or in alpha")
    p.add_argument("--receivers", default=",".join(SWEEP_COLUMNS))
    p.add_argument("--output", "-o", default="-")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="Monte Carlo simulation of a BPSK comparison receiver")
    p.add_argument("kind", choices=("homodyne", "displacement_pd", "bs_pd"))
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=MonteCarloSpec.samples)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="validate a state-set file")
    p.add_argument("file")
    p.add_argument("--dump", default=None, help="write the normalised state set here")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except CliError as exc:
        print(f"qsd: {exc}", file=sys.stderr)
        return exc.code
    except QuadratureError as exc:
        print(f"qsd: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    except ValueError as exc:
        print(f"qsd: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
