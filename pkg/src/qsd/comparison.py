"""State comparison: are two received systems in the same state or not?

Comparing states from a set ``S = {tau_1, ..., tau_m}`` with ordered-pair
priors ``p_ij`` is the discrimination of

    rho_E = (1/p_E) sum_i p_ii tau_i x tau_i         (prior p_E = sum_i p_ii)
    rho_D = (1/p_D) sum_{i != j} p_ij tau_i x tau_j  (prior p_D = 1 - p_E)

Tensor products of a constant-p set stay constant-p, so the discrimination
results carry over to the 2n-mode problem unchanged.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .discrimination import (
    DiscriminationProblem,
    ErrorReport,
    classify,
    decision_function,
    optimal_gaussian_error,
)
from .gaussian import (
    GaussianMixture,
    GaussianState,
    as_mixture,
    coherent_state,
    tensor_mixture,
    x_marginal,
)
from .numerics import (
    Estimate,
    MonteCarloSpec,
    QuadratureSpec,
    erf,
    integrate_signed_region,
    mc_expectation,
)


@dataclass(frozen=True, eq=False)
class ComparisonProblem:
    states: tuple[GaussianMixture, ...]
    pair_priors: np.ndarray

    def __post_init__(self):
        states = tuple(as_mixture(s) for s in self.states)
        if not states:
            raise ValueError("comparison needs at least one state")
        if len({s.n_modes for s in states}) != 1:
            raise ValueError("all states in a comparison set need the same mode count")
        pij = np.array(self.pair_priors, dtype=float)
        m = len(states)
        if pij.shape != (m, m):
            raise ValueError(f"pair priors must be {m}x{m}, got {pij.shape}")
        if not np.all(np.isfinite(pij)) or np.any(pij < 0):
            raise ValueError("pair priors must be finite and non-negative")
        if abs(pij.sum() - 1.0) > 1e-12:
            raise ValueError(f"pair priors sum to {pij.sum()!r}, not 1")
        pij.setflags(write=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "pair_priors", pij)

    @classmethod
    def uniform(cls, states: Sequence[GaussianMixture | GaussianState]) -> "ComparisonProblem":
        m = len(states)
        return cls(tuple(states), np.full((m, m), 1.0 / (m * m)))

    @property
    def n_modes(self) -> int:
        return self.states[0].n_modes

    @property
    def p_equal(self) -> float:
        return float(np.trace(self.pair_priors))

    def digest(self) -> str:
        h = hashlib.sha256(np.ascontiguousarray(self.pair_priors).tobytes())
        for mix in self.states:
            h.update(b"|")
            h.update(np.ascontiguousarray(mix.weights).tobytes())
            for c in mix.components:
                h.update(np.ascontiguousarray(c.cov).tobytes())
                h.update(np.ascontiguousarray(c.disp).tobytes())
        return h.hexdigest()[:16]


@dataclass(frozen=True, eq=False)
class BinaryComparisonProblem:
    """Two states, each slot independently ``tau1`` with probability ``q``."""

    tau1: GaussianMixture
    tau2: GaussianMixture
    q: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"q must lie in [0, 1], got {self.q}")
        object.__setattr__(self, "tau1", as_mixture(self.tau1))
        object.__setattr__(self, "tau2", as_mixture(self.tau2))

    def to_comparison(self) -> ComparisonProblem:
        q = self.q
        pij = np.array([[q * q, q * (1 - q)], [q * (1 - q), (1 - q) * (1 - q)]])
        return ComparisonProblem((self.tau1, self.tau2), pij)

    def slot_problem(self) -> DiscriminationProblem:
        return DiscriminationProblem(self.tau1, self.tau2, self.q)


@dataclass(frozen=True)
class DegenerateComparison:
    """Priors leave nothing to decide: one of p_E, p_D is zero."""

    p_equal: float
    p_different: float

    @property
    def error(self) -> float:
        return min(self.p_equal, self.p_different)

    @property
    def decision(self) -> str:
        return "equal" if self.p_equal >= self.p_different else "different"


def _pair_mixture(prob: ComparisonProblem, pairs) -> GaussianMixture:
    weights, comps = [], []
    for i, j in pairs:
        w = prob.pair_priors[i, j]
        if w == 0:
            continue
        prod = tensor_mixture(prob.states[i], prob.states[j])
        weights.extend(w * prod.weights)
        comps.extend(prod.components)
    weights = np.asarray(weights)
    return GaussianMixture(weights / weights.sum(), tuple(comps))


def reduce_to_discrimination(prob: ComparisonProblem) -> DiscriminationProblem | DegenerateComparison:
    """Rewrite comparison as ``rho_E`` (prior ``p_E``) versus ``rho_D``."""
    m = len(prob.states)
    p_e = prob.p_equal
    p_d = float(prob.pair_priors.sum() - p_e)
    if p_e <= 0.0 or p_d <= 0.0:
        return DegenerateComparison(max(p_e, 0.0), max(p_d, 0.0))
    rho_e = _pair_mixture(prob, [(i, i) for i in range(m)])
    rho_d = _pair_mixture(prob, [(i, j) for i in range(m) for j in range(m) if i != j])
    return DiscriminationProblem(rho_e, rho_d, p_e / (p_e + p_d))


def optimal_gaussian_comparison_error(prob: ComparisonProblem,
                                      spec: QuadratureSpec | MonteCarloSpec | None = None) -> ErrorReport:
    """Best Gaussian comparison error: x-homodyne on all ``2n`` modes.

    Uses quadrature when the reduced problem has at most two modes and Monte
    Carlo otherwise (unless ``spec`` forces one).
    """
    reduced = reduce_to_discrimination(prob)
    if isinstance(reduced, DegenerateComparison):
        est = Estimate(reduced.error, 0.0, "analytic")
        return ErrorReport(est, "analytic", prob.digest(), True,
                           f"degenerate priors: always answer '{reduced.decision}'")
    return optimal_gaussian_error(reduced, spec)


def binary_comparison_error_via_per_mode(prob: BinaryComparisonProblem,
                                         spec: QuadratureSpec | MonteCarloSpec | None = None) -> ErrorReport:
    """Error of "discriminate each slot optimally, say equal iff labels agree".

    With ``G+`` and ``G-`` the integrals of the slot decision function over
    its positive and negative regions, the region ``R' x R' u R'c x R'c``
    gives ``q^2 + (1-q)^2 - G+^2 - G-^2``. A ``MonteCarloSpec`` simulates the
    rule instead.
    """
    slot = prob.slot_problem()
    digest = prob.to_comparison().digest()
    if isinstance(spec, MonteCarloSpec):
        return _simulate_same_outcome_rule(prob, slot, spec, digest)
    if slot.n_modes > 2:
        raise ValueError("per-slot quadrature is limited to 2 modes; pass a MonteCarloSpec")
    q = prob.q
    g = decision_function(slot).density
    pos = integrate_signed_region(g, "positive", spec)
    neg = integrate_signed_region(g, "negative", spec)
    value = q * q + (1 - q) ** 2 - pos.value ** 2 - neg.value ** 2
    hw = 2 * abs(pos.value) * pos.half_width + 2 * abs(neg.value) * neg.half_width
    est = Estimate(min(max(value, 0.0), 1.0), hw, "quadrature")
    ok = slot.constant_p.ok
    return ErrorReport(est, "quadrature", digest, ok,
                       None if ok else "per-slot rule on a non constant-p set")


def _simulate_same_outcome_rule(prob, slot, spec, digest) -> ErrorReport:
    df = decision_function(slot)
    g1, g2 = x_marginal(prob.tau1), x_marginal(prob.tau2)
    q = prob.q

    def draw(rng, size):
        first = rng.random(size) < q
        x = np.empty((size, g1.dimension))
        x[first] = g1.sample(rng, int(first.sum()))
        x[~first] = g2.sample(rng, int((~first).sum()))
        return first, x

    def sampler(rng, size):
        a, xa = draw(rng, size)
        b, xb = draw(rng, size)
        return a == b, xa, xb

    def errors(batch):
        equal, xa, xb = batch
        said_equal = classify(df, xa) == classify(df, xb)
        return said_equal != equal

    est = mc_expectation(sampler, errors, spec)
    return ErrorReport(est, "monte-carlo", digest, slot.constant_p.ok)


def comparison_success_from_discrimination(p_success: float) -> float:
    """Same-outcome rule success ``p^2 + (1-p)^2`` from slot success ``p``."""
    if not 0.0 <= p_success <= 1.0:
        raise ValueError(f"success probability must lie in [0, 1], got {p_success}")
    return p_success ** 2 + (1.0 - p_success) ** 2


def bpsk_homodyne_discrimination_error(alpha):
    """Homodyne error for ``{|alpha>, |-alpha>}`` at equal priors."""
    return 0.5 * (1.0 - erf(np.sqrt(2.0) * np.asarray(alpha, dtype=float)))


def bpsk_homodyne_comparison_error(alpha):
    """Best Gaussian comparison error for BPSK at ``q = 1/2``."""
    e = erf(np.sqrt(2.0) * np.asarray(alpha, dtype=float))
    return 0.5 * (1.0 - e * e)


def bpsk_comparison(alpha: float, q: float = 0.5) -> BinaryComparisonProblem:
    return BinaryComparisonProblem(coherent_state([alpha]), coherent_state([-alpha]), q)
