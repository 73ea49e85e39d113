"""Special functions, signed-region quadrature and seeded Monte Carlo."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize, special, stats

from .gaussian import MarginalDensity

MC_BLOCK = 1 << 16


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach its tolerance."""


@dataclass(frozen=True)
class QuadratureSpec:
    tol: float = 1e-10
    max_subdivisions: int = 1_000_000
    radius: float = 10.0

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("quadrature tolerance must be positive")
        if self.radius < 6:
            raise ValueError("truncation radius must be at least 6 sigma")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be positive")


@dataclass(frozen=True)
class MonteCarloSpec:
    samples: int = 1_000_000
    seed: int = 0
    confidence: float = 0.95

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("sample count must be at least 1")
        if not 0 < self.confidence < 1:
            raise ValueError("confidence must lie in (0, 1)")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class Estimate:
    """A numerical value with an error half-width.

    For quadrature the half-width is the accumulated refinement error bound;
    for Monte Carlo it is the normal-approximation confidence half-width and
    ``stderr`` holds one standard error.
    """

    value: float
    half_width: float
    method: str
    seed: int | None = None
    stderr: float | None = None
    samples: int | None = None

    def __post_init__(self):
        if self.half_width < 0:
            raise ValueError("half-width must be non-negative")


def erf(x):
    """Error function; odd symmetry holds exactly."""
    x = np.asarray(x, dtype=float)
    out = np.copysign(special.erf(np.abs(x)), x)
    return float(out) if out.ndim == 0 else out


# 7-point Gauss / 15-point Kronrod on [-1, 1].
_XK = np.array([
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144845693013,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144845693013,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
])
_WG = np.zeros(15)
_WG[1::2] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
]


def _breakpoints(means: np.ndarray, sds: np.ndarray, radius: float) -> np.ndarray:
    """Initial partition: every component's +-radius*sd window cut at 1-sd steps.

    Guarantees no component peak can fall between Kronrod nodes unnoticed.
    """
    k = np.arange(-np.ceil(radius), np.ceil(radius) + 1)
    pts = (means[:, None] + sds[:, None] * k[None, :]).ravel()
    lo = np.min(means - radius * sds)
    hi = np.max(means + radius * sds)
    pts = np.clip(pts, lo, hi)
    return np.unique(np.concatenate([pts, [lo, hi]]))


def _adaptive_1d(func, edges: np.ndarray, tol: float, max_sub: int,
                 clip: str | None = None, root_func=None):
    """Level-wise vectorised adaptive Gauss-Kronrod over a partition.

    ``func`` maps a 1-D array of abscissae to integrand values. With
    ``clip`` set, ``func`` returns the unclipped values and the integrand is
    their negative (positive) part. Any interval whose endpoints or nodes then
    show a sign change is split at the root of ``root_func`` (continuous, same
    sign as ``func``) before it can be accepted: a kink sitting between an
    endpoint and the outermost node is invisible to the Gauss-Kronrod error
    estimate, so this cannot wait for a failure. Sign changes are ignored
    where ``|func|`` is too small for the kink to matter at ``tol``.
    """
    a = edges[:-1].copy()
    b = edges[1:].copy()
    total_len = float(edges[-1] - edges[0])
    value = 0.0
    error = 0.0
    n_intervals = a.size
    if n_intervals > max_sub:
        raise QuadratureError(f"initial partition alone needs {n_intervals} intervals")
    while a.size:
        half = 0.5 * (b - a)
        mid = 0.5 * (a + b)
        nodes = mid[:, None] + half[:, None] * _XK[None, :]
        splits = mid.copy()
        if clip is None:
            fx = func(nodes.ravel()).reshape(nodes.shape)
            kinked = np.zeros(a.size, dtype=bool)
        else:
            pts = np.concatenate([a[:, None], nodes, b[:, None]], axis=1)
            raw = func(pts.ravel()).reshape(pts.shape)
            fx = _clip(raw[:, 1:-1], clip)
            kinked = _root_splits(root_func, pts, raw, tol / total_len, splits)
        kron = half * (fx @ _WK)
        gauss = half * (fx @ _WG)
        err = np.abs(kron - gauss)
        ok = (err <= tol * (b - a) / total_len) & ~kinked
        value += float(np.sum(kron[ok]))
        error += float(np.sum(err[ok]))
        if np.all(ok):
            break
        bad = ~ok
        ba, bb, splits = a[bad], b[bad], splits[bad]
        n_intervals += ba.size
        if n_intervals > max_sub:
            raise QuadratureError(
                f"tolerance {tol:g} not reached within {max_sub} subdivisions"
            )
        a = np.concatenate([ba, splits])
        b = np.concatenate([splits, bb])
    return value, error


def _root_splits(root_func, pts, raw, floor, splits):
    """Put interior sign-change roots into ``splits``; return which intervals moved.

    ``pts`` holds each interval's endpoints and nodes in order, ``raw`` the
    unclipped values there. Intervals with ``max |raw| <= floor`` are skipped.
    """
    change = raw[:, :-1] * raw[:, 1:] < 0
    candidates = np.any(change, axis=1) & (np.max(np.abs(raw), axis=1) > floor)
    kinked = np.zeros(pts.shape[0], dtype=bool)
    for i in np.nonzero(candidates)[0]:
        j = np.nonzero(change[i])[0][0]
        lo, hi = pts[i, 0], pts[i, -1]
        try:
            root = optimize.brentq(lambda t: float(root_func(np.array([t]))[0]),
                                   pts[i, j], pts[i, j + 1],
                                   xtol=1e-15, rtol=4 * np.finfo(float).eps)
        except ValueError:
            continue  # rounding-level flip that vanishes on re-evaluation
        # A root at an endpoint is already a breakpoint.
        if min(root - lo, hi - root) > 1e-12 * (hi - lo):
            splits[i] = root
            kinked[i] = True
    return kinked


def _clip(values, sign):
    return np.minimum(values, 0.0) if sign == "negative" else np.maximum(values, 0.0)


def _signed_region_1d(f: MarginalDensity, sign: str, tol: float, spec: QuadratureSpec):
    means = f.means[:, 0]
    sds = np.sqrt(f.covs[:, 0, 0])
    keep = f.weights != 0
    if not np.any(keep):
        return 0.0, 0.0
    edges = _breakpoints(means[keep], sds[keep], spec.radius)

    def values(x):
        return f(x[:, None])

    def scaled(x):
        return f.scaled(x[:, None])

    return _adaptive_1d(values, edges, tol, spec.max_subdivisions, clip=sign, root_func=scaled)


def _signed_region_2d(f: MarginalDensity, sign: str, spec: QuadratureSpec):
    keep = f.weights != 0
    if not np.any(keep):
        return 0.0, 0.0
    means = f.means[keep, 0]
    sds = np.sqrt(f.covs[keep, 0, 0])
    edges = _breakpoints(means, sds, spec.radius)
    outer_len = float(edges[-1] - edges[0])
    # Split the budget: half for the outer rule, half spread over inner slices.
    inner_tol = 0.5 * spec.tol / outer_len
    inner_err = [0.0]

    def outer(xs):
        vals = np.empty(xs.size)
        for i, x1 in enumerate(xs):
            sl = f.conditional(x1)
            if not np.any(sl.weights):
                vals[i] = 0.0
                continue
            v, e = _signed_region_1d(sl, sign, inner_tol, spec)
            vals[i] = v
            inner_err[0] = max(inner_err[0], e)
        return vals

    value, err = _adaptive_1d(outer, edges, 0.5 * spec.tol, spec.max_subdivisions)
    return value, err + inner_err[0] * outer_len


def integrate_signed_region(f: MarginalDensity, sign: str = "negative",
                            spec: QuadratureSpec | None = None) -> Estimate:
    """Integral of ``f`` over the region where ``f < 0`` (or ``f > 0``).

    Works by adaptive subdivision of ``min(f, 0)`` (``max(f, 0)``) over the
    union of component windows ``mean +- radius * sd``; the region itself is
    never constructed. Supports 1-D and 2-D densities; 2-D integrals are
    iterated, with each inner slice again a 1-D Gaussian mixture.
    """
    if sign not in ("negative", "positive"):
        raise ValueError("sign must be 'negative' or 'positive'")
    spec = spec or QuadratureSpec()
    n = f.dimension
    if n == 1:
        value, err = _signed_region_1d(f, sign, spec.tol, spec)
    elif n == 2:
        value, err = _signed_region_2d(f, sign, spec)
    else:
        raise ValueError(f"quadrature supports dimension 1 or 2, got {n}; use Monte Carlo")
    # Mass outside the window, per axis, bounds the truncation error.
    trunc = n * float(np.sum(np.abs(f.weights))) * special.erfc(spec.radius / np.sqrt(2))
    return Estimate(float(value), float(err + trunc), "quadrature")


def _worker_count(workers: int | None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("QSD_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def block_rng(seed: int, block: int) -> np.random.Generator:
    """Independent counter-based stream for one block of samples."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(block,))
    return np.random.Generator(np.random.Philox(ss))


def mc_expectation(sampler: Callable[[np.random.Generator, int], object],
                   statistic: Callable[[object], np.ndarray],
                   spec: MonteCarloSpec | None = None,
                   workers: int | None = None) -> Estimate:
    """Mean of ``statistic(sampler(rng, size))`` over ``spec.samples`` draws.

    Samples are drawn in fixed blocks of ``MC_BLOCK``, each block on its own
    Philox stream keyed by ``(seed, block index)``. Block sums are combined in
    block order, so the result is bit-identical for any worker count.
    """
    spec = spec or MonteCarloSpec()
    n_blocks = -(-spec.samples // MC_BLOCK)

    def run(block: int):
        size = min(MC_BLOCK, spec.samples - block * MC_BLOCK)
        vals = np.asarray(statistic(sampler(block_rng(spec.seed, block), size)), dtype=float)
        return vals.sum(), np.square(vals).sum()

    nworkers = min(_worker_count(workers), n_blocks)
    if nworkers > 1:
        with ThreadPoolExecutor(nworkers) as pool:
            parts = list(pool.map(run, range(n_blocks)))
    else:
        parts = [run(b) for b in range(n_blocks)]

    s1 = 0.0
    s2 = 0.0
    for a, b in parts:
        s1 += a
        s2 += b
    n = spec.samples
    mean = s1 / n
    var = max(s2 / n - mean * mean, 0.0) * n / (n - 1) if n > 1 else 0.0
    stderr = float(np.sqrt(var / n))
    z = stats.norm.ppf(0.5 + 0.5 * spec.confidence)
    return Estimate(float(mean), float(z * stderr), "monte-carlo", seed=spec.seed,
                    stderr=stderr, samples=n)
