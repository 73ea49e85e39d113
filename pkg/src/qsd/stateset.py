"""JSON state-set files.

Schema (quadratures in xxpp order, ``gamma`` row-major)::

    {
      "n_modes": 1,
      "states": [{"gamma": [[1, 0], [0, 1]], "d": [1.414, 0]}, ...],
      "weights": [[1, 0], [0, 1]]          # optional, one row per hypothesis
    }

Without ``weights`` every state is its own hypothesis. NaN and Infinity are
rejected anywhere in the file.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .gaussian import GaussianMixture, GaussianState, InvalidStateError, TOL_PROB


class StateSetError(ValueError):
    """The file is not a valid state set."""


def _reject_constant(name):
    raise StateSetError(f"non-finite number {name} is not allowed")


def _finite_array(value, what: str, ndim: int) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise StateSetError(f"{what} must be numeric") from exc
    if arr.ndim != ndim:
        raise StateSetError(f"{what} must be a {ndim}-d array")
    if not np.all(np.isfinite(arr)):
        raise StateSetError(f"{what} contains a non-finite value")
    return arr


@dataclass(frozen=True)
class StateSet:
    n_modes: int
    states: tuple[GaussianState, ...]
    weights: np.ndarray | None = None

    def hypotheses(self) -> list[GaussianMixture]:
        if self.weights is None:
            return [GaussianMixture.pure(s) for s in self.states]
        return [GaussianMixture(row, self.states) for row in self.weights]

    def to_dict(self) -> dict:
        out = {
            "n_modes": self.n_modes,
            "states": [{"gamma": s.cov.tolist(), "d": s.disp.tolist()} for s in self.states],
        }
        if self.weights is not None:
            out["weights"] = self.weights.tolist()
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def parse_state_set(text: str) -> StateSet:
    try:
        raw = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise StateSetError(f"malformed JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise StateSetError("top level must be a JSON object")
    n = raw.get("n_modes")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise StateSetError("n_modes must be a positive integer")
    entries = raw.get("states")
    if not isinstance(entries, list) or not entries:
        raise StateSetError("states must be a non-empty array")
    states = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict) or "gamma" not in entry or "d" not in entry:
            raise StateSetError(f"state {i} needs 'gamma' and 'd'")
        gamma = _finite_array(entry["gamma"], f"state {i} gamma", 2)
        d = _finite_array(entry["d"], f"state {i} d", 1)
        try:
            states.append(GaussianState(n, gamma, d))
        except InvalidStateError as exc:
            raise StateSetError(f"state {i}: {exc}") from exc
    weights = None
    if raw.get("weights") is not None:
        weights = _finite_array(raw["weights"], "weights", 2)
        if weights.shape[1] != len(states):
            raise StateSetError(
                f"each weights row needs {len(states)} entries, got {weights.shape[1]}"
            )
        for r, row in enumerate(weights):
            if np.any(row < 0) or not math.isclose(row.sum(), 1.0, abs_tol=TOL_PROB):
                raise StateSetError(f"weights row {r} is not a probability vector")
    return StateSet(n, tuple(states), weights)


def load_state_set(path: str | Path) -> StateSet:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise StateSetError(f"cannot read {path}: {exc}") from exc
    return parse_state_set(text)
