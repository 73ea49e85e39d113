import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import optimize

from qsd import helstrom_pure
from qsd.numerics import MonteCarloSpec
from qsd.receivers import (
    CLOSED_FORMS,
    ClickModel,
    ReceiverKind,
    bs_receiver_error,
    displacement_receiver_error,
    helstrom_comparison_error,
    homodyne_comparison_error,
    simulate_receiver,
)

from .oracles import displacement_receiver_enumeration, erf_series

ALPHA_GRID = np.round(np.arange(1, 21) * 0.1, 10)


class TestClosedForms:
    @pytest.mark.parametrize("fn", [displacement_receiver_error, bs_receiver_error,
                                    helstrom_comparison_error, homodyne_comparison_error])
    def test_vacuum_is_half(self, fn):
        assert fn(0.0) == 0.5

    def test_alpha_one(self):
        assert displacement_receiver_error(1.0) == pytest.approx(0.0181479, abs=1e-7)
        assert bs_receiver_error(1.0) == pytest.approx(0.0676676, abs=1e-7)
        assert helstrom_comparison_error(1.0) == pytest.approx(0.0091578, abs=1e-7)
        e = erf_series(math.sqrt(2))
        assert homodyne_comparison_error(1.0) == pytest.approx(0.5 * (1 - e * e), abs=1e-15)

    def test_displacement_large_alpha(self):
        assert displacement_receiver_error(3.0) <= 3e-16

    def test_helstrom_matches_slot_formula(self):
        for a in ALPHA_GRID:
            p = 1 - helstrom_pure(math.exp(-4 * a * a))
            assert helstrom_comparison_error(a) == pytest.approx(2 * p * (1 - p), abs=1e-12)

    def test_vectorised(self):
        a = np.array([0.0, 0.5, 1.0])
        out = displacement_receiver_error(a)
        assert out.shape == (3,)
        assert out[2] == displacement_receiver_error(1.0)

    def test_negative_alpha_rejected(self):
        with pytest.raises(ValueError):
            bs_receiver_error(-0.1)

    def test_registry_is_complete(self):
        assert set(CLOSED_FORMS) == set(ReceiverKind)

    @pytest.mark.parametrize("alpha", [0.0, 0.3, 1.0, 1.7, 2.5])
    def test_parity_rule_enumeration(self, alpha):
        assert displacement_receiver_error(alpha) == pytest.approx(
            displacement_receiver_enumeration(alpha), abs=1e-12)


class TestOrdering:
    def test_helstrom_below_everything(self):
        for a in ALPHA_GRID:
            h = helstrom_comparison_error(a)
            for kind, fn in CLOSED_FORMS.items():
                assert h <= fn(a) + 1e-12, kind

    def test_displacement_beats_bs_on_grid(self):
        # Stated ordering over the whole grid (0, 2].
        for a in ALPHA_GRID:
            assert displacement_receiver_error(a) <= bs_receiver_error(a) + 1e-12, a

    def test_displacement_beats_both_above_point_two(self):
        # Stated ordering for mean photon number at least 0.2.
        for a in ALPHA_GRID[ALPHA_GRID ** 2 >= 0.2]:
            d = displacement_receiver_error(a)
            assert d < homodyne_comparison_error(a) - 1e-12, a
            assert d < bs_receiver_error(a) - 1e-12, a

    def test_crossover_with_bs(self):
        # E(1 - E/2) = exp(-2n)/2 reduces to y^2 + y - 1 = 0 for y = exp(-2n).
        n_star = math.log((1 + math.sqrt(5)) / 2) / 2
        assert n_star == pytest.approx(0.2406059, abs=1e-7)
        gap = lambda n: displacement_receiver_error(math.sqrt(n)) - bs_receiver_error(math.sqrt(n))
        assert abs(gap(n_star)) <= 1e-15
        assert gap(0.5 * n_star) > 0 and gap(1.5 * n_star) < 0
        for n in np.linspace(n_star * 1.001, 4, 200):
            assert gap(n) < 0

    def test_crossover_with_homodyne(self):
        gap = lambda n: (displacement_receiver_error(math.sqrt(n))
                         - homodyne_comparison_error(math.sqrt(n)))
        n_star = optimize.brentq(gap, 0.1, 1.0, xtol=1e-14)
        assert n_star == pytest.approx(0.3840993, abs=1e-7)
        assert gap(0.5 * n_star) > 0
        for n in np.linspace(n_star * 1.001, 4, 200):
            assert gap(n) < 0


class TestClickModel:
    @given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5))
    def test_povm_completeness(self, re, im, beta):
        m = ClickModel(beta)
        g = complex(re, im)
        assert m.p_on(g) + m.p_off(g) == 1.0

    def test_nulling(self):
        assert ClickModel(-1.5).p_off(1.5) == 1.0
        assert ClickModel(-1.5).p_off(-1.5) == pytest.approx(math.exp(-9))

    @given(st.floats(-5, 5), st.floats(-5, 5))
    def test_off_probability_range(self, g, beta):
        p = ClickModel(beta).p_off(g)
        assert 0.0 < p <= 1.0 or (p == 0.0 and abs(g + beta) > 27)


class TestSimulation:
    def test_displacement(self):
        rep = simulate_receiver("displacement_pd", 1.0, MonteCarloSpec(samples=1_000_000, seed=1))
        assert abs(rep.value - displacement_receiver_error(1.0)) <= 3 * rep.estimate.stderr
        assert not rep.optimality_guaranteed and rep.method == "monte-carlo"

    def test_beam_splitter(self):
        rep = simulate_receiver(ReceiverKind.BS_PD, 1.0, MonteCarloSpec(samples=1_000_000, seed=2))
        assert abs(rep.value - bs_receiver_error(1.0)) <= 3 * rep.estimate.stderr

    def test_beam_splitter_silent_on_equal_pairs(self):
        # Equal inputs leave the difference port in vacuum.
        diff = (np.array([1.3, -1.3]) - np.array([1.3, -1.3])) / math.sqrt(2)
        assert np.all(ClickModel().p_on(diff) == 0.0)
        # At alpha = 0 the labels carry no physical difference: a coin flip.
        rep = simulate_receiver("bs_pd", 0.0, MonteCarloSpec(samples=50_000))
        assert abs(rep.value - 0.5) <= 5 * rep.estimate.stderr

    def test_unsupported(self):
        with pytest.raises(ValueError):
            simulate_receiver("homodyne", 1.0)
        with pytest.raises(ValueError):
            simulate_receiver("dolinar", 1.0)

    def test_workers_do_not_matter(self):
        spec = MonteCarloSpec(samples=150_000, seed=9)
        a = simulate_receiver("displacement_pd", 0.7, spec, workers=1)
        b = simulate_receiver("displacement_pd", 0.7, spec, workers=3)
        assert a == b
