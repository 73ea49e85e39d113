"""Optimal Gaussian discrimination of two constant-p mixtures.

For two mixtures drawn from a constant-p set the best any Gaussian strategy
can do is x-homodyne detection on each mode followed by the sign test on

    g(x) = p * g1(x) - (1 - p) * g2(x),

where ``g_i`` is the homodyne outcome density of ``rho_i``. Deciding ``rho2``
exactly where ``g < 0`` gives the error ``(1 - p) + integral of g over {g < 0}``.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .gaussian import (
    ConstantPCheck,
    GaussianMixture,
    GaussianState,
    MarginalDensity,
    as_mixture,
    is_constant_p_set,
    x_marginal,
)
from .numerics import (
    Estimate,
    MonteCarloSpec,
    QuadratureSpec,
    integrate_signed_region,
    mc_expectation,
)


class Hypothesis(IntEnum):
    RHO1 = 1
    RHO2 = 2


@dataclass(frozen=True, eq=False)
class DiscriminationProblem:
    rho1: GaussianMixture
    rho2: GaussianMixture
    prior: float = 0.5
    constant_p: ConstantPCheck = field(init=False)

    def __post_init__(self):
        rho1, rho2 = as_mixture(self.rho1), as_mixture(self.rho2)
        if rho1.n_modes != rho2.n_modes:
            raise ValueError(
                f"hypotheses have {rho1.n_modes} and {rho2.n_modes} modes"
            )
        p = float(self.prior)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"prior must lie in [0, 1], got {p}")
        object.__setattr__(self, "rho1", rho1)
        object.__setattr__(self, "rho2", rho2)
        object.__setattr__(self, "prior", p)
        check = is_constant_p_set(rho1.components + rho2.components)
        object.__setattr__(self, "constant_p", check)

    @property
    def n_modes(self) -> int:
        return self.rho1.n_modes

    def digest(self) -> str:
        """Short content hash identifying the problem in reports."""
        h = hashlib.sha256()
        h.update(np.float64(self.prior).tobytes())
        for mix in (self.rho1, self.rho2):
            h.update(b"|")
            h.update(np.ascontiguousarray(mix.weights).tobytes())
            for c in mix.components:
                h.update(np.ascontiguousarray(c.cov).tobytes())
                h.update(np.ascontiguousarray(c.disp).tobytes())
        return h.hexdigest()[:16]


@dataclass(frozen=True)
class DecisionFunction:
    """Signed density ``g`` plus the label returned where ``g == 0``."""

    density: MarginalDensity
    tie_label: Hypothesis = Hypothesis.RHO1

    def __call__(self, x):
        return self.density(x)


@dataclass(frozen=True)
class ErrorReport:
    estimate: Estimate
    method: str
    problem_hash: str
    optimality_guaranteed: bool = True
    note: str | None = None

    @property
    def value(self) -> float:
        return self.estimate.value

    @property
    def half_width(self) -> float:
        return self.estimate.half_width

    def to_dict(self) -> dict:
        e = self.estimate
        out = {
            "error": e.value,
            "half_width": e.half_width,
            "method": self.method,
            "problem_hash": self.problem_hash,
            "optimality_guaranteed": self.optimality_guaranteed,
        }
        if e.seed is not None:
            out.update(seed=e.seed, samples=e.samples, stderr=e.stderr)
        if self.note:
            out["note"] = self.note
        return out


_NOT_OPTIMAL = "homodyne protocol error, optimality not guaranteed (not a constant-p set)"


def decision_function(prob: DiscriminationProblem) -> DecisionFunction:
    g1 = x_marginal(prob.rho1)
    g2 = x_marginal(prob.rho2)
    p = prob.prior
    return DecisionFunction(
        MarginalDensity(
            np.concatenate([g1.means, g2.means]),
            np.concatenate([g1.covs, g2.covs]),
            np.concatenate([p * g1.weights, -(1.0 - p) * g2.weights]),
        )
    )


def classify(df: DecisionFunction, x):
    """Label for homodyne outcome(s) ``x``: ``RHO2`` iff ``g(x) < 0``.

    A single outcome gives a ``Hypothesis``; a batch of shape ``(N, n)``
    gives an int array of labels.
    """
    s = df.density.sign(x)
    tie = int(df.tie_label)
    if tie == Hypothesis.RHO1:
        labels = np.where(s < 0, int(Hypothesis.RHO2), tie)
    else:
        labels = np.where(s > 0, int(Hypothesis.RHO1), tie)
    if np.ndim(labels) == 0:
        return Hypothesis(int(labels))
    return labels


def optimal_gaussian_error(prob: DiscriminationProblem,
                           spec: QuadratureSpec | MonteCarloSpec | None = None) -> ErrorReport:
    """Minimum error over all Gaussian measurements (for constant-p problems).

    With a ``QuadratureSpec`` (up to 2 modes) this integrates ``g`` over its
    negative region; with a ``MonteCarloSpec`` it simulates the homodyne
    protocol. For problems outside the constant-p class the same protocol
    error is returned, flagged as not guaranteed optimal.
    """
    if spec is None:
        spec = QuadratureSpec() if prob.n_modes <= 2 else MonteCarloSpec()
    if isinstance(spec, MonteCarloSpec):
        return simulate_homodyne_protocol(prob, spec)
    if prob.n_modes > 2:
        raise ValueError(
            f"quadrature is limited to 2 modes, problem has {prob.n_modes}; "
            "pass a MonteCarloSpec"
        )
    p = prob.prior
    if p in (0.0, 1.0):
        est = Estimate(0.0, 0.0, "quadrature")
    else:
        neg = integrate_signed_region(decision_function(prob).density, "negative", spec)
        value = min(max((1.0 - p) + neg.value, 0.0), 1.0)
        est = Estimate(value, neg.half_width, "quadrature")
    ok = prob.constant_p.ok
    return ErrorReport(est, "quadrature", prob.digest(), ok, None if ok else _NOT_OPTIMAL)


def tv_distance(g1: MarginalDensity, g2: MarginalDensity,
                spec: QuadratureSpec | None = None) -> Estimate:
    """Total variation distance ``1/2 * integral |g1 - g2|``."""
    for g in (g1, g2):
        if np.any(g.weights < 0) or abs(g.mass() - 1.0) > 1e-12:
            raise ValueError("tv_distance expects probability densities")
    diff = MarginalDensity(
        np.concatenate([g1.means, g2.means]),
        np.concatenate([g1.covs, g2.covs]),
        np.concatenate([g1.weights, -g2.weights]),
    )
    pos = integrate_signed_region(diff, "positive", spec)
    return Estimate(min(max(pos.value, 0.0), 1.0), pos.half_width, "quadrature")


def helstrom_pure(overlap_sq: float, prior: float = 0.5) -> float:
    """Helstrom minimum error for two pure states with ``|<a|b>|^2 = overlap_sq``."""
    if not 0.0 <= overlap_sq <= 1.0:
        raise ValueError(f"overlap_sq must lie in [0, 1], got {overlap_sq}")
    if not 0.0 <= prior <= 1.0:
        raise ValueError(f"prior must lie in [0, 1], got {prior}")
    return 0.5 * (1.0 - math.sqrt(max(1.0 - 4.0 * prior * (1.0 - prior) * overlap_sq, 0.0)))


def homodyne_sampler(rho1: GaussianMixture | GaussianState,
                     rho2: GaussianMixture | GaussianState, prior: float):
    """Sampler drawing ``(labels, outcomes)`` with ``rho1`` chosen w.p. ``prior``."""
    g1, g2 = x_marginal(rho1), x_marginal(rho2)

    def sample(rng: np.random.Generator, size: int):
        labels = np.where(rng.random(size) < prior, int(Hypothesis.RHO1), int(Hypothesis.RHO2))
        x = np.empty((size, g1.dimension))
        first = labels == Hypothesis.RHO1
        x[first] = g1.sample(rng, int(first.sum()))
        x[~first] = g2.sample(rng, int((~first).sum()))
        return labels, x

    return sample


def simulate_homodyne_protocol(prob: DiscriminationProblem,
                               spec: MonteCarloSpec | None = None,
                               workers: int | None = None) -> ErrorReport:
    """Monte Carlo estimate of the homodyne-plus-sign-test error."""
    spec = spec or MonteCarloSpec()
    df = decision_function(prob)

    def errors(batch):
        labels, x = batch
        return classify(df, x) != labels

    est = mc_expectation(homodyne_sampler(prob.rho1, prob.rho2, prob.prior), errors, spec,
                         workers=workers)
    ok = prob.constant_p.ok
    return ErrorReport(est, "monte-carlo", prob.digest(), ok, None if ok else _NOT_OPTIMAL)
