"""Multimode Gaussian states, finite mixtures of them, and quadrature marginals.

Conventions used throughout the package:

* Quadratures are ordered ``xxpp``: ``(x_1, ..., x_n, p_1, ..., p_n)``.
* ``hbar = 1`` and the vacuum covariance matrix is the identity. A coherent
  state ``|alpha>`` has displacement ``sqrt(2) * (Re alpha, Im alpha)``.
* The Wigner function of a state with covariance ``cov`` and displacement
  ``disp`` is ``pi**-n det(cov)**-1/2 exp(-(r - d)^T cov^-1 (r - d))``.

Note that the exponent carries no factor 1/2. Homodyne outcome distributions
are therefore Gaussians with covariance ``cov_x / 2`` (variance 1/2 for the
vacuum), not ``cov_x``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

TOL_SYM = 1e-10
TOL_PSD = 1e-9
TOL_PROB = 1e-12
TOL_CONSTANT_P = 1e-9


class InvalidStateError(ValueError):
    """Raised for malformed or unphysical states and mixtures."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def symplectic_form(n: int) -> np.ndarray:
    """Return ``Omega = [[0, I], [-I, 0]]`` in xxpp ordering."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


@dataclass(frozen=True, eq=False)
class GaussianState:
    """An ``n``-mode Gaussian state given by its covariance and displacement.

    Construction validates symmetry and the uncertainty relation
    ``cov + i Omega >= 0``; nothing downstream re-checks.
    """

    n_modes: int
    cov: np.ndarray
    disp: np.ndarray

    def __post_init__(self):
        n = self.n_modes
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise InvalidStateError(f"n_modes must be a positive integer, got {n!r}")
        cov = np.asarray(self.cov, dtype=float)
        disp = np.asarray(self.disp, dtype=float)
        if cov.shape != (2 * n, 2 * n):
            raise InvalidStateError(
                f"covariance must be {2 * n}x{2 * n} for {n} modes, got {cov.shape}"
            )
        if disp.shape != (2 * n,):
            raise InvalidStateError(
                f"displacement must have length {2 * n}, got shape {disp.shape}"
            )
        if not (np.all(np.isfinite(cov)) and np.all(np.isfinite(disp))):
            raise InvalidStateError("covariance and displacement must be finite")
        asym = np.max(np.abs(cov - cov.T))
        if asym > TOL_SYM:
            raise InvalidStateError(f"covariance is not symmetric (max asymmetry {asym:.3g})")
        min_eig = np.linalg.eigvalsh(cov + 1j * symplectic_form(n)).min()
        if min_eig < -TOL_PSD:
            raise InvalidStateError(
                f"uncertainty relation violated: cov + i*Omega has eigenvalue {min_eig:.6g}"
            )
        object.__setattr__(self, "n_modes", int(n))
        object.__setattr__(self, "cov", _readonly(0.5 * (cov + cov.T)))
        object.__setattr__(self, "disp", _readonly(disp))

    @property
    def cov_x(self) -> np.ndarray:
        return self.cov[: self.n_modes, : self.n_modes]

    @property
    def cov_p(self) -> np.ndarray:
        return self.cov[self.n_modes :, self.n_modes :]

    @property
    def cov_xp(self) -> np.ndarray:
        return self.cov[: self.n_modes, self.n_modes :]

    @property
    def disp_x(self) -> np.ndarray:
        return self.disp[: self.n_modes]

    @property
    def disp_p(self) -> np.ndarray:
        return self.disp[self.n_modes :]

    def is_coherent(self, tol: float = TOL_SYM) -> bool:
        return bool(np.max(np.abs(self.cov - np.eye(2 * self.n_modes))) <= tol)

    def amplitudes(self) -> np.ndarray:
        """Complex coherent amplitudes ``(d_x + i d_p) / sqrt(2)`` per mode."""
        return (self.disp_x + 1j * self.disp_p) / np.sqrt(2.0)


def make_gaussian_state(n: int, cov, disp) -> GaussianState:
    return GaussianState(n, np.asarray(cov, dtype=float), np.asarray(disp, dtype=float))


def vacuum(n: int = 1) -> GaussianState:
    return GaussianState(n, np.eye(2 * n), np.zeros(2 * n))


def coherent_state(alphas: Sequence[complex] | complex) -> GaussianState:
    """Product coherent state ``|alpha_1> x ... x |alpha_n>``."""
    a = np.atleast_1d(np.asarray(alphas, dtype=complex))
    n = a.size
    disp = np.sqrt(2.0) * np.concatenate([a.real, a.imag])
    return GaussianState(n, np.eye(2 * n), disp)


def tensor(a: GaussianState, b: GaussianState) -> GaussianState:
    """Tensor product ``a x b`` in xxpp ordering (blocks are direct sums)."""
    na, nb = a.n_modes, b.n_modes

    def dsum(u, v):
        out = np.zeros((u.shape[0] + v.shape[0], u.shape[1] + v.shape[1]))
        out[: u.shape[0], : u.shape[1]] = u
        out[u.shape[0] :, u.shape[1] :] = v
        return out

    cx = dsum(a.cov_x, b.cov_x)
    cp = dsum(a.cov_p, b.cov_p)
    cxp = dsum(a.cov_xp, b.cov_xp)
    cov = np.block([[cx, cxp], [cxp.T, cp]])
    disp = np.concatenate([a.disp_x, b.disp_x, a.disp_p, b.disp_p])
    return GaussianState(na + nb, cov, disp)


def wigner(state: GaussianState, point) -> float | np.ndarray:
    """Wigner function at ``point`` (shape ``(2n,)`` or ``(..., 2n)``)."""
    r = np.asarray(point, dtype=float)
    n = state.n_modes
    if r.shape[-1] != 2 * n:
        raise ValueError(f"point must have trailing dimension {2 * n}")
    chol = np.linalg.cholesky(state.cov)
    diff = r - state.disp
    z = np.linalg.solve(chol, diff.reshape(-1, 2 * n).T)
    quad = np.sum(z * z, axis=0).reshape(r.shape[:-1])
    logdet = 2.0 * np.sum(np.log(np.diag(chol)))
    out = np.exp(-quad - n * np.log(np.pi) - 0.5 * logdet)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class GaussianMixture:
    """Finite convex combination ``sum_j weights[j] * components[j]``."""

    weights: np.ndarray
    components: tuple[GaussianState, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        w = np.asarray(self.weights, dtype=float).ravel()
        if not comps:
            raise InvalidStateError("a mixture needs at least one component")
        if w.shape != (len(comps),):
            raise InvalidStateError(
                f"{len(comps)} components but {w.size} weights"
            )
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise InvalidStateError("mixture weights must be finite and non-negative")
        if abs(w.sum() - 1.0) > TOL_PROB:
            raise InvalidStateError(f"mixture weights sum to {w.sum()!r}, not 1")
        modes = {c.n_modes for c in comps}
        if len(modes) != 1:
            raise InvalidStateError(f"components have differing mode counts {sorted(modes)}")
        object.__setattr__(self, "weights", _readonly(w))
        object.__setattr__(self, "components", comps)

    @classmethod
    def pure(cls, state: GaussianState) -> "GaussianMixture":
        return cls(np.ones(1), (state,))

    @property
    def n_modes(self) -> int:
        return self.components[0].n_modes

    def __len__(self) -> int:
        return len(self.components)


def as_mixture(obj: GaussianState | GaussianMixture) -> GaussianMixture:
    if isinstance(obj, GaussianMixture):
        return obj
    return GaussianMixture.pure(obj)


def tensor_mixture(a: GaussianMixture, b: GaussianMixture) -> GaussianMixture:
    """Mixture tensor product; components ordered with ``b`` varying fastest."""
    weights = np.outer(a.weights, b.weights).ravel()
    comps = tuple(tensor(s, t) for s in a.components for t in b.components)
    # Rescale so the product weights sum to 1 exactly, not just to rounding.
    return GaussianMixture(weights / weights.sum(), comps)


def wigner_mixture(mix: GaussianMixture, point) -> float | np.ndarray:
    total = 0.0
    for w, comp in zip(mix.weights, mix.components):
        if w:
            total = total + w * wigner(comp, point)
    return total


@dataclass(frozen=True, eq=False)
class MarginalDensity:
    """Weighted sum of Gaussian densities over R^n.

    Weights may be negative when the density is a signed combination such as
    a discrimination decision function. Evaluation is done in log space so
    that the sign stays correct far out in the tails.
    """

    means: np.ndarray  # (K, n)
    covs: np.ndarray  # (K, n, n)
    weights: np.ndarray  # (K,)
    _prec: np.ndarray = field(init=False, repr=False)
    _lognorm: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        means = np.atleast_2d(np.asarray(self.means, dtype=float))
        covs = np.asarray(self.covs, dtype=float)
        if covs.ndim == 2:
            covs = covs[None]
        weights = np.asarray(self.weights, dtype=float).ravel()
        k, n = means.shape
        if covs.shape != (k, n, n) or weights.shape != (k,):
            raise ValueError(
                f"inconsistent shapes: means {means.shape}, covs {covs.shape}, "
                f"weights {weights.shape}"
            )
        chol = np.linalg.cholesky(covs)
        inv_chol = np.linalg.inv(chol)
        prec = np.einsum("kji,kjl->kil", inv_chol, inv_chol)
        logdet = 2.0 * np.sum(np.log(np.diagonal(chol, axis1=1, axis2=2)), axis=1)
        object.__setattr__(self, "means", _readonly(means))
        object.__setattr__(self, "covs", _readonly(covs))
        object.__setattr__(self, "weights", _readonly(weights))
        object.__setattr__(self, "_prec", prec)
        object.__setattr__(self, "_lognorm", -0.5 * (n * np.log(2 * np.pi) + logdet))

    @property
    def dimension(self) -> int:
        return self.means.shape[1]

    def __len__(self) -> int:
        return self.means.shape[0]

    def mass(self) -> float:
        """Total integral, ``sum(weights)``."""
        return float(self.weights.sum())

    def component_logpdf(self, x) -> np.ndarray:
        """Log density of each unit-weight component, shape ``(..., K)``."""
        x = np.asarray(x, dtype=float)
        n = self.dimension
        if n == 1 and x.shape[-1:] != (1,):
            x = x[..., None]
        diff = x[..., None, :] - self.means
        quad = np.einsum("...ki,kij,...kj->...k", diff, self._prec, diff)
        return self._lognorm - 0.5 * quad

    def _scaled(self, x):
        """Return ``(s, m)`` with ``density(x) = s * exp(m)`` computed stably."""
        w = self.weights
        nz = w != 0
        if not np.any(nz):
            shape = np.shape(self.component_logpdf(x))[:-1]
            return np.zeros(shape), np.zeros(shape)
        logs = self.component_logpdf(x)[..., nz] + np.log(np.abs(w[nz]))
        m = logs.max(axis=-1)
        s = np.sum(np.sign(w[nz]) * np.exp(logs - m[..., None]), axis=-1)
        return s, m

    def __call__(self, x):
        s, m = self._scaled(x)
        out = s * np.exp(m)
        return float(out) if np.ndim(out) == 0 else out

    def scaled(self, x) -> np.ndarray:
        """``density(x)`` divided by its largest term's magnitude; never underflows."""
        return self._scaled(x)[0]

    def sign(self, x) -> np.ndarray:
        """Sign of the density at ``x``, exact even where the value underflows."""
        return np.sign(self._scaled(x)[0])

    def conditional(self, x_first: float) -> "MarginalDensity":
        """Slice of a 2-D density at fixed first coordinate, as a 1-D density.

        ``f(x1, x2) = sum_k w_k N(x1) N(x2 | x1)``, so the slice is a 1-D
        mixture with weights ``w_k N(x1)`` (these do not integrate to 1).
        """
        if self.dimension != 2:
            raise ValueError("conditional slices are only defined for 2-D densities")
        c = self.covs
        s11, s12, s22 = c[:, 0, 0], c[:, 0, 1], c[:, 1, 1]
        dx = x_first - self.means[:, 0]
        weights = self.weights * np.exp(-0.5 * dx * dx / s11) / np.sqrt(2 * np.pi * s11)
        means = self.means[:, 1] + s12 / s11 * dx
        var = s22 - s12 * s12 / s11
        return MarginalDensity(means[:, None], var[:, None, None], weights)

    def axis_marginal(self, axis: int) -> "MarginalDensity":
        return MarginalDensity(
            self.means[:, axis : axis + 1],
            self.covs[:, axis : axis + 1, axis : axis + 1],
            self.weights,
        )

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` points, shape ``(size, n)``. Requires non-negative weights."""
        w = self.weights
        if np.any(w < 0):
            raise ValueError("cannot sample from a signed density")
        idx = rng.choice(len(w), size=size, p=w / w.sum())
        z = rng.standard_normal((size, self.dimension))
        chol = np.linalg.cholesky(self.covs)
        return self.means[idx] + np.einsum("sij,sj->si", chol[idx], z)


def _marginal(mix: GaussianMixture, quadrature: str) -> MarginalDensity:
    n = mix.n_modes
    sl = slice(0, n) if quadrature == "x" else slice(n, 2 * n)
    means = np.array([c.disp[sl] for c in mix.components])
    covs = np.array([c.cov[sl, sl] / 2.0 for c in mix.components])
    return MarginalDensity(means, covs, mix.weights)


def x_marginal(mix: GaussianMixture | GaussianState) -> MarginalDensity:
    """Outcome density of x-homodyne detection on every mode.

    Component ``j`` contributes mean ``disp_x`` and covariance ``cov_x / 2``
    (the halving comes from the Wigner-exponent convention; the vacuum gives
    variance 1/2). Exact for any Gaussian component, constant-p or not.
    """
    return _marginal(as_mixture(mix), "x")


def p_marginal(mix: GaussianMixture | GaussianState) -> MarginalDensity:
    """Outcome density of p-homodyne detection: means ``disp_p``, covs ``cov_p / 2``."""
    return _marginal(as_mixture(mix), "p")


class ConstantPCheck(NamedTuple):
    ok: bool
    diagnostic: str | None

    def __bool__(self) -> bool:
        return self.ok


def is_constant_p_set(states: Sequence[GaussianState], tol: float = TOL_CONSTANT_P) -> ConstantPCheck:
    """Check that all states share ``cov_p`` and ``disp_p`` and have ``cov_xp = 0``.

    ``cov_x`` and ``disp_x`` may differ freely between states.
    """
    states = list(states)
    if not states:
        raise ValueError("constant-p check needs at least one state")
    n = states[0].n_modes
    if any(s.n_modes != n for s in states):
        raise ValueError("all states must have the same number of modes")
    ref = states[0]
    for j, s in enumerate(states):
        if np.max(np.abs(s.cov_xp)) > tol:
            return ConstantPCheck(False, f"state {j}: x-p correlation block is non-zero")
        if np.max(np.abs(s.cov_p - ref.cov_p)) > tol:
            return ConstantPCheck(False, f"state {j}: p-block covariance differs from state 0")
        if np.max(np.abs(s.disp_p - ref.disp_p)) > tol:
            return ConstantPCheck(False, f"state {j}: p-displacement differs from state 0")
    return ConstantPCheck(True, None)
