import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsd import GaussianMixture, coherent_state, helstrom_pure, make_gaussian_state, vacuum
from qsd.fock import (
    CutoffError,
    FockOperator,
    coherent_fock,
    from_gaussian_mixture,
    heuristic_cutoff,
    helstrom_error_numeric,
    mixture_density,
    trace_norm,
    verify_comparison_identity,
)


def bpsk_pair(alpha, cutoff):
    return (mixture_density([[alpha]], [1.0], cutoff), mixture_density([[-alpha]], [1.0], cutoff))


class TestCoherentFock:
    def test_vacuum(self):
        v, norm = coherent_fock(0.0, 10)
        assert norm == 1.0
        assert np.array_equal(v, np.eye(10)[0])

    def test_alpha_one(self):
        v, _ = coherent_fock(1.0, 30)
        assert abs(np.vdot(v, v) - 1) <= 1e-12
        assert abs(abs(v[0]) ** 2 - math.exp(-1)) <= 1e-12

    def test_overlap(self):
        a, _ = coherent_fock(1.0, 30)
        b, _ = coherent_fock(-1.0, 30)
        assert abs(np.vdot(a, b) - math.exp(-2)) <= 1e-10

    def test_complex_overlap(self):
        a, _ = coherent_fock(0.4 + 0.3j, 30)
        b, _ = coherent_fock(-0.2j, 30)
        ref = np.exp(-0.5 * abs(0.4 + 0.3j) ** 2 - 0.5 * 0.04 + np.conj(0.4 + 0.3j) * (-0.2j))
        assert abs(np.vdot(a, b) - ref) <= 1e-12

    def test_cutoff_too_small(self):
        with pytest.raises(CutoffError, match="try"):
            coherent_fock(2.0, 8)

    def test_heuristic_formula(self):
        assert [heuristic_cutoff(a) for a in (0, 1, 2)] == [10, 17, 26]

    def test_heuristic_is_enough(self):
        for a in (0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0):
            _, norm = coherent_fock(a, heuristic_cutoff(a))
            assert 1 - norm ** 2 <= 1e-12


class TestMixtureDensity:
    def test_vacuum_projector(self):
        rho = mixture_density([[0.0]], [1.0], 6)
        expected = np.zeros((6, 6))
        expected[0, 0] = 1
        assert np.allclose(rho.matrix, expected, atol=0)

    def test_cat_mixture_spectrum(self):
        rho = mixture_density([[1.0], [-1.0]], [0.5, 0.5], 30)
        assert abs(rho.trace() - 1) <= 1e-12
        ev = np.sort(np.linalg.eigvalsh(rho.matrix))[::-1]
        # Gram matrix of {|a>, |-a>} has off-diagonal exp(-2|a|^2).
        gram = np.array([[1, math.exp(-2)], [math.exp(-2), 1]])
        ref = np.sort(np.linalg.eigvalsh(0.5 * gram))[::-1]
        assert np.allclose(ref, [(1 + math.exp(-2)) / 2, (1 - math.exp(-2)) / 2])
        assert np.allclose(ev[:2], ref, atol=1e-12)
        assert np.all(np.abs(ev[2:]) <= 1e-12)

    def test_two_mode_trace(self):
        rho = mixture_density([[1.0, 1.0]], [1.0], 20)
        assert rho.dim == 400
        assert abs(rho.trace() - 1) <= 1e-10

    def test_dimension_cap(self):
        with pytest.raises(ValueError, match="cap"):
            mixture_density([[1.0, 1.0, 1.0]], [1.0], 20)

    def test_rejects_non_coherent(self):
        thermal = GaussianMixture.pure(make_gaussian_state(1, 3 * np.eye(2), [0, 0]))
        with pytest.raises(ValueError, match="coherent"):
            from_gaussian_mixture(thermal)

    def test_from_gaussian_mixture(self):
        mix = GaussianMixture([0.25, 0.75], [coherent_state([0.5j]), vacuum(1)])
        rho = from_gaussian_mixture(mix, cutoff=25)
        direct = mixture_density([[0.5j], [0.0]], [0.25, 0.75], 25)
        assert np.allclose(rho.matrix, direct.matrix, atol=1e-15)

    def test_hermitian_check(self):
        with pytest.raises(ValueError, match="Hermitian"):
            FockOperator(1, 2, np.array([[0, 1], [0, 0]], dtype=complex))


class TestHelstromNumeric:
    def test_identical(self):
        r, _ = bpsk_pair(0.8, 25)
        assert helstrom_error_numeric(r, r) == pytest.approx(0.5, abs=1e-12)

    def test_bpsk(self):
        r1, r2 = bpsk_pair(1.0, 30)
        assert helstrom_error_numeric(r1, r2) == pytest.approx(helstrom_pure(math.exp(-4)), abs=1e-7)

    def test_orthogonal_number_states(self):
        zero = FockOperator(1, 3, np.diag([1.0, 0, 0]).astype(complex))
        one = FockOperator(1, 3, np.diag([0, 1.0, 0]).astype(complex))
        assert helstrom_error_numeric(zero, one) == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 1.0, 1.5, 2.0])
    def test_matches_closed_form(self, alpha):
        r1, r2 = bpsk_pair(alpha, heuristic_cutoff(alpha))
        ref = helstrom_pure(math.exp(-4 * alpha * alpha))
        assert abs(helstrom_error_numeric(r1, r2) - ref) <= 1e-6

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    def test_cutoff_convergence(self, alpha):
        n = heuristic_cutoff(alpha)
        a = helstrom_error_numeric(*bpsk_pair(alpha, n))
        b = helstrom_error_numeric(*bpsk_pair(alpha, n + 5))
        assert abs(a - b) < 1e-8

    def test_unequal_prior(self):
        r1, r2 = bpsk_pair(0.6, 25)
        assert helstrom_error_numeric(r1, r2, 0.8) == pytest.approx(
            helstrom_pure(math.exp(-4 * 0.36), 0.8), abs=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            helstrom_error_numeric(mixture_density([[0]], [1], 5), mixture_density([[0]], [1], 6))

    @settings(max_examples=20)
    @given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), st.floats(0, 1))
    def test_trace_norm_bounds(self, a, b, c, p):
        r1 = mixture_density([[a], [b]], [0.5, 0.5], 22)
        r2 = mixture_density([[c]], [1.0], 22)
        x = p * r1.matrix - (1 - p) * r2.matrix
        tn = trace_norm(x)
        assert tn >= abs(np.trace(x)) - 1e-12
        assert tn <= 1 + 1e-12


class TestComparisonIdentity:
    def test_bpsk(self):
        assert verify_comparison_identity(1.0, -1.0, 0.5, 15) <= 1e-10

    def test_prior_zero(self):
        assert verify_comparison_identity(1.0, -1.0, 0.0, 15) <= 1e-12

    def test_vacuum(self):
        assert verify_comparison_identity(0.0, 0.0, 0.5, 10) <= 1e-12

    @settings(max_examples=10)
    @given(st.complex_numbers(max_magnitude=1.2), st.complex_numbers(max_magnitude=1.2),
           st.floats(0, 1))
    def test_random(self, t1, t2, q):
        assert verify_comparison_identity(t1, t2, q, 20) <= 1e-12

    def test_cap(self):
        with pytest.raises(ValueError, match="cap"):
            verify_comparison_identity(1.0, -1.0, 0.5, 70)
