"""Photon-detection receivers for BPSK coherent-state comparison.

Two systems each hold ``|alpha>`` or ``|-alpha>`` independently with
probability 1/2. Error curves versus the mean photon number ``alpha**2``:

* helstrom:        ``exp(-4 a^2) / 2``
* homodyne:        ``(1 - erf(sqrt(2) a)^2) / 2``
* displacement_pd: ``E (1 - E/2)`` with ``E = exp(-4 a^2)``; each mode is
  displaced by ``-alpha`` and sent to an on/off detector, and the pair is
  declared equal iff the number of clicks is even
* bs_pd:           ``exp(-2 a^2) / 2``; the two modes meet on a balanced beam
  splitter and a click on the difference port means "different"
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .comparison import bpsk_homodyne_comparison_error
from .discrimination import ErrorReport
from .numerics import MonteCarloSpec, mc_expectation


class ReceiverKind(str, enum.Enum):
    HELSTROM = "helstrom"
    HOMODYNE = "homodyne"
    DISPLACEMENT_PD = "displacement_pd"
    BS_PD = "bs_pd"


@dataclass(frozen=True)
class ClickModel:
    """Ideal on/off detector behind a displacement ``D(beta)``."""

    beta: complex = 0.0

    def p_off(self, gamma):
        return np.exp(-np.abs(np.asarray(gamma) + self.beta) ** 2)

    def p_on(self, gamma):
        return 1.0 - self.p_off(gamma)


def _check_alpha(alpha):
    a = np.asarray(alpha, dtype=float)
    if np.any(a < 0) or not np.all(np.isfinite(a)):
        raise ValueError("alpha must be finite and non-negative")
    return a


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def displacement_receiver_error(alpha):
    e = np.exp(-4.0 * _check_alpha(alpha) ** 2)
    return _scalar(e * (1.0 - 0.5 * e))


def bs_receiver_error(alpha):
    return _scalar(0.5 * np.exp(-2.0 * _check_alpha(alpha) ** 2))


def helstrom_comparison_error(alpha):
    return _scalar(0.5 * np.exp(-4.0 * _check_alpha(alpha) ** 2))


def homodyne_comparison_error(alpha):
    return _scalar(bpsk_homodyne_comparison_error(_check_alpha(alpha)))


CLOSED_FORMS = {
    ReceiverKind.HELSTROM: helstrom_comparison_error,
    ReceiverKind.HOMODYNE: homodyne_comparison_error,
    ReceiverKind.DISPLACEMENT_PD: displacement_receiver_error,
    ReceiverKind.BS_PD: bs_receiver_error,
}


def _pair_sampler(alpha: float):
    """Draw ``(equal, amplitudes, uniforms)``; equality is by label, not amplitude."""
    def sample(rng, size):
        signs = np.where(rng.random((size, 2)) < 0.5, 1.0, -1.0)
        return signs[:, 0] == signs[:, 1], alpha * signs, rng.random((size, 2))

    return sample


def simulate_receiver(kind: ReceiverKind | str, alpha: float,
                      spec: MonteCarloSpec | None = None,
                      workers: int | None = None) -> ErrorReport:
    """Monte Carlo error of a photon-detection comparison receiver."""
    kind = ReceiverKind(kind)
    alpha = float(_check_alpha(alpha))
    spec = spec or MonteCarloSpec()
    if kind is ReceiverKind.DISPLACEMENT_PD:
        model = ClickModel(beta=-alpha)

        def errors(batch):
            equal, gammas, u = batch
            clicks = u < model.p_on(gammas)
            said_equal = clicks.sum(axis=1) % 2 == 0
            return said_equal != equal

    elif kind is ReceiverKind.BS_PD:
        model = ClickModel()

        def errors(batch):
            equal, gammas, u = batch
            diff_port = (gammas[:, 0] - gammas[:, 1]) / np.sqrt(2.0)
            said_different = u[:, 0] < model.p_on(diff_port)
            return said_different == equal

    else:
        raise ValueError(f"simulate_receiver supports displacement_pd and bs_pd, not {kind.value}")

    est = mc_expectation(_pair_sampler(alpha), errors, spec, workers=workers)
    return ErrorReport(est, "monte-carlo", f"{kind.value}:{alpha!r}", False,
                       "non-Gaussian receiver")
