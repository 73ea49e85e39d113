"""Brute-force checks in a truncated Fock basis.

Independent of the phase-space code: coherent-state mixtures become dense
density matrices, and the Helstrom error comes straight from the trace norm
of ``p rho1 - (1 - p) rho2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np
from scipy import special

from .gaussian import GaussianMixture

MAX_DIM = 4096
MAX_LEAK = 1e-12


class CutoffError(ValueError):
    """The Fock cutoff cannot represent the state to the required accuracy."""


@dataclass(frozen=True, eq=False)
class FockOperator:
    n_modes: int
    cutoff: int
    matrix: np.ndarray
    hermitian: bool = True

    def __post_init__(self):
        dim = self.cutoff ** self.n_modes
        if self.matrix.shape != (dim, dim):
            raise ValueError(f"matrix must be {dim}x{dim}, got {self.matrix.shape}")
        if self.hermitian:
            dev = np.max(np.abs(self.matrix - self.matrix.conj().T)) if dim else 0.0
            if dev > 1e-12:
                raise ValueError(f"operator flagged Hermitian deviates by {dev:.3g}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))


def heuristic_cutoff(alpha_max: float, max_leak: float = MAX_LEAK) -> int:
    """``ceil(|a|^2 + 6|a| + 10)``, raised until the Poisson tail is below ``max_leak``."""
    a = abs(alpha_max)
    n = int(math.ceil(a * a + 6 * a + 10))
    mean = a * a
    while special.gammainc(n, mean) > max_leak:  # P(photon number >= n)
        n += 1
    return n


def coherent_fock(alpha: complex, cutoff: int, max_leak: float = MAX_LEAK):
    """Truncated ``|alpha>``; returns ``(vector, norm)``.

    ``norm`` is the norm of the truncated expansion before renormalisation,
    so ``1 - norm**2`` is the probability mass lost to the cutoff.
    """
    if cutoff < 1:
        raise CutoffError("cutoff must be at least 1")
    c = np.empty(cutoff, dtype=complex)
    c[0] = math.exp(-abs(alpha) ** 2 / 2)
    for k in range(1, cutoff):
        c[k] = c[k - 1] * alpha / math.sqrt(k)
    norm = float(np.linalg.norm(c))
    leak = 1.0 - norm * norm
    if leak > max_leak:
        raise CutoffError(
            f"cutoff {cutoff} loses {leak:.3g} of |{alpha}>; try {heuristic_cutoff(abs(alpha))}"
        )
    return c / norm, norm


def _ket(amplitudes: Sequence[complex], cutoff: int) -> np.ndarray:
    return reduce(np.kron, (coherent_fock(a, cutoff)[0] for a in amplitudes))


def mixture_density(components: Sequence[Sequence[complex]], weights: Sequence[float],
                    cutoff: int, max_dim: int = MAX_DIM) -> FockOperator:
    """``sum_j w_j |gamma_j><gamma_j|`` for multimode coherent components."""
    comps = [np.atleast_1d(np.asarray(c, dtype=complex)) for c in components]
    w = np.asarray(weights, dtype=float)
    if len(comps) != w.size or not comps:
        raise ValueError("need one weight per component")
    n = comps[0].size
    if any(c.size != n for c in comps):
        raise ValueError("components must all have the same number of modes")
    dim = cutoff ** n
    if dim > max_dim:
        raise ValueError(f"Fock dimension {dim} exceeds the cap of {max_dim}")
    rho = np.zeros((dim, dim), dtype=complex)
    for wj, amps in zip(w, comps):
        if wj:
            v = _ket(amps, cutoff)
            rho += wj * np.outer(v, v.conj())
    return FockOperator(n, cutoff, rho)


def from_gaussian_mixture(mix: GaussianMixture, cutoff: int | None = None,
                          max_dim: int = MAX_DIM) -> FockOperator:
    """Fock representation of a mixture whose components are all coherent."""
    if not all(c.is_coherent() for c in mix.components):
        raise ValueError("Fock oracle only handles coherent-state components")
    amps = [c.amplitudes() for c in mix.components]
    if cutoff is None:
        cutoff = heuristic_cutoff(max(np.max(np.abs(a)) for a in amps))
    return mixture_density(amps, mix.weights, cutoff, max_dim)


def trace_norm(matrix: np.ndarray) -> float:
    return float(np.sum(np.linalg.svd(matrix, compute_uv=False)))


def helstrom_error_numeric(rho1: FockOperator, rho2: FockOperator, prior: float = 0.5) -> float:
    """``(1 - ||p rho1 - (1-p) rho2||_1) / 2`` from singular values."""
    if rho1.matrix.shape != rho2.matrix.shape:
        raise ValueError("density matrices have different dimensions")
    if not 0.0 <= prior <= 1.0:
        raise ValueError("prior must lie in [0, 1]")
    x = prior * rho1.matrix - (1.0 - prior) * rho2.matrix
    return 0.5 * (1.0 - trace_norm(x))


def verify_comparison_identity(tau1: Sequence[complex] | complex, tau2: Sequence[complex] | complex,
                               q: float, cutoff: int, max_dim: int = MAX_DIM) -> float:
    """Max entry of ``|X (x) X - (p_E rho_E - p_D rho_D)|`` for ``X = q tau1 - (1-q) tau2``.

    ``tau1`` and ``tau2`` are coherent amplitudes (one per mode).
    """
    t1 = mixture_density([np.atleast_1d(tau1)], [1.0], cutoff, max_dim).matrix
    t2 = mixture_density([np.atleast_1d(tau2)], [1.0], cutoff, max_dim).matrix
    if t1.shape[0] ** 2 > max_dim:
        raise ValueError(f"two-copy dimension {t1.shape[0] ** 2} exceeds the cap of {max_dim}")
    x = q * t1 - (1 - q) * t2
    lhs = np.kron(x, x)
    pe_rhoe = q * q * np.kron(t1, t1) + (1 - q) ** 2 * np.kron(t2, t2)
    pd_rhod = q * (1 - q) * (np.kron(t1, t2) + np.kron(t2, t1))
    return float(np.max(np.abs(lhs - (pe_rhoe - pd_rhod))))
