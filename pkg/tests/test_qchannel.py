import math

import numpy as np
import pytest

from freecontract.additivity import product_bound
from freecontract.errors import DomainError
from freecontract.qchannel import (
    ChannelInstance,
    QuantumState,
    apply_channel,
    apply_complementary,
    apply_conjugate_channel,
    bell_output,
    binary_entropy,
    concentration_stat,
    entropy,
    hmin_estimate,
    random_channel,
    random_density_matrix,
    sample_output_spectra,
)
from freecontract.rng import complex_normal, stream
from freecontract.tnorm import default_probes, kkt_membership
from freecontract.additivity import simplex_bounds

LOG2 = math.log(2.0)


def _random_state(dim, seed):
    return random_density_matrix(dim, stream(seed, 0))


class TestChannelConstruction:
    def test_dimensions(self):
        ch = random_channel(3, 8, 0.25, seed=1)
        assert ch.d == 6
        assert ch.V.shape == (24, 6)
        assert ch.t_effective == pytest.approx(0.25)

    def test_determinism(self):
        a = random_channel(3, 8, 0.25, seed=5)
        b = random_channel(3, 8, 0.25, seed=5)
        np.testing.assert_array_equal(a.V, b.V)

    def test_zero_input_dim_rejected(self):
        with pytest.raises(DomainError):
            random_channel(2, 2, 0.1, seed=0)

    def test_scalar_channel(self):
        ch = random_channel(1, 4, 1.0, seed=2)
        out = apply_channel(ch, QuantumState.maximally_mixed(ch.d))
        assert out.dim == 1
        assert out.matrix[0, 0] == pytest.approx(1.0, abs=1e-12)


class TestApplyChannel:
    def test_unitary_case_fixes_mixed_state(self):
        # t = 1 makes V unitary, so the normalized identity maps to itself
        ch = random_channel(2, 3, 1.0, seed=3)
        out = apply_channel(ch, QuantumState.maximally_mixed(ch.d))
        np.testing.assert_allclose(out.matrix, np.eye(2) / 2, atol=1e-12)

    def test_rank_one_outputs_valid(self):
        ch = random_channel(3, 5, 0.5, seed=9)
        rng = stream(10, 1)
        for _ in range(5):
            psi = complex_normal(rng, ch.d)
            out = apply_channel(ch, QuantumState.pure(psi))
            lam = out.eigenvalues()
            assert abs(lam.sum() - 1.0) < 1e-10
            assert lam[0] > -1e-10

    def test_dimension_mismatch(self):
        ch = random_channel(2, 4, 0.5, seed=0)
        with pytest.raises(DomainError):
            apply_channel(ch, QuantumState.maximally_mixed(ch.d + 1))


class TestConjugateChannel:
    def test_real_isometry_fixed_point(self):
        # with a real isometry the conjugate channel acts identically
        k, n, d = 2, 3, 4
        v = np.zeros((k * n, d))
        v[:d, :d] = np.eye(d)
        ch = ChannelInstance(k=k, n=n, t=d / (k * n), d=d, V=v, seed=0)
        state = _random_state(d, 4)
        out1 = apply_channel(ch, state)
        out2 = apply_conjugate_channel(ch, state)
        np.testing.assert_allclose(out1.matrix, out2.matrix, atol=1e-12)

    def test_spectra_conjugation_equivariance(self):
        ch = random_channel(3, 6, 0.4, seed=6)
        state = _random_state(ch.d, 5)
        conj_state = QuantumState(ch.d, state.matrix.conj())
        lam1 = apply_channel(ch, state).eigenvalues()
        lam2 = apply_conjugate_channel(ch, conj_state).eigenvalues()
        np.testing.assert_allclose(lam1, lam2, atol=1e-10)

    def test_entropy_matches_on_matched_inputs(self):
        ch = random_channel(3, 6, 0.4, seed=8)
        rng = stream(12, 1)
        psi = complex_normal(rng, ch.d)
        h1 = entropy(apply_channel(ch, QuantumState.pure(psi)))
        h2 = entropy(apply_conjugate_channel(ch, QuantumState.pure(psi.conj())))
        assert h1 == pytest.approx(h2, abs=1e-10)


class TestComplementary:
    def test_rank_one_shares_nonzero_spectrum(self):
        ch = random_channel(3, 7, 0.3, seed=13)
        rng = stream(14, 1)
        psi = complex_normal(rng, ch.d)
        state = QuantumState.pure(psi)
        lam_direct = np.sort(apply_channel(ch, state).eigenvalues())[::-1]
        lam_comp = np.sort(apply_complementary(ch, state).eigenvalues())[::-1]
        m = min(ch.k, ch.n)
        np.testing.assert_allclose(lam_direct[:m], lam_comp[:m], atol=1e-9)


class TestBellOutput:
    def test_top_eigenvalue_dominates_fraction(self):
        for seed in range(10):
            ch = random_channel(3, 8, 0.25, seed=seed)
            lam_max = float(bell_output(ch).eigenvalues()[-1])
            assert lam_max >= ch.t_effective - 1e-10

    def test_entropy_below_product_bound(self):
        ch = random_channel(2, 6, 0.5, seed=21)
        out = bell_output(ch)
        assert ch.t_effective == pytest.approx(0.5)
        assert entropy(out) <= 2 * LOG2 + 1e-9
        assert entropy(out) <= product_bound(ch.k, ch.t_effective) + 1e-9

    def test_scalar_channel(self):
        ch = random_channel(1, 4, 0.5, seed=1)
        out = bell_output(ch)
        assert out.dim == 1
        assert out.eigenvalues()[-1] == pytest.approx(1.0, abs=1e-12)

    def test_resource_guard(self):
        ch = random_channel(2, 3, 0.5, seed=0)
        big = ChannelInstance(k=9, n=1, t=0.5, d=4,
                              V=np.linalg.qr(np.random.default_rng(0)
                                             .normal(size=(9, 4)))[0],
                              seed=0)
        with pytest.raises(DomainError):
            bell_output(big)


class TestEntropy:
    @pytest.mark.parametrize("p", [0.5, 1.0, 2.0])
    def test_uniform_vector(self, p):
        assert entropy(np.full(4, 0.25), p) == pytest.approx(math.log(4), abs=1e-12)

    def test_pure_state(self):
        assert entropy(np.array([1.0, 0.0, 0.0])) == 0.0

    def test_renyi_two(self):
        assert entropy(np.array([0.5, 0.5]), 2.0) == pytest.approx(LOG2, abs=1e-12)

    def test_invalid_order(self):
        with pytest.raises(DomainError):
            entropy(np.array([1.0]), 0.0)

    def test_binary_entropy_half(self):
        assert binary_entropy(0.5) == pytest.approx(LOG2)
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0


class TestOutputSpectra:
    def test_valid_simplex_points(self):
        ch = random_channel(4, 10, 0.3, seed=3)
        spectra = sample_output_spectra(ch, 200, seed=4)
        assert spectra.shape == (200, 4)
        np.testing.assert_allclose(spectra.sum(axis=1), 1.0, atol=1e-10)
        assert spectra.min() > -1e-10

    def test_determinism(self):
        ch = random_channel(3, 5, 0.5, seed=3)
        a = sample_output_spectra(ch, 50, seed=9)
        b = sample_output_spectra(ch, 50, seed=9)
        np.testing.assert_array_equal(a, b)

    def test_large_n_inside_slab(self):
        # at large environment the sampled spectra respect the limiting
        # eigenvalue slab up to delta = 0.05
        ch = random_channel(2, 300, 0.5, seed=5)
        spectra = sample_output_spectra(ch, 300, seed=6)
        lo, hi = simplex_bounds(2, ch.t_effective)
        assert spectra.min() >= lo - 0.05
        assert spectra.max() <= hi + 0.05

    def test_samples_pass_membership(self):
        ch = random_channel(2, 300, 0.5, seed=7)
        spectra = sample_output_spectra(ch, 12, seed=8)
        probes = default_probes(2, seed=1, count=24)
        for lam in spectra:
            _, margin, _ = kkt_membership(np.sort(lam)[::-1], ch.t_effective, probes)
            assert margin <= 0.05


class TestConcentration:
    def test_bound_holds_at_moderate_scale(self):
        ch = random_channel(4, 250, 0.1, seed=1)
        stat = concentration_stat(ch, 2000, seed=2)
        assert stat.regime_ok
        assert stat.bound == pytest.approx(0.4, abs=1e-12)
        assert stat.max_l2 <= stat.bound * 1.05

    def test_crude_cap(self):
        for seed in range(3):
            ch = random_channel(3, 12, 0.4, seed=seed)
            stat = concentration_stat(ch, 200, seed=seed + 50)
            assert stat.max_l2 <= math.sqrt(1.0 - 1.0 / ch.k) + 1e-12

    def test_scalar_channel_zero_distance(self):
        ch = random_channel(1, 5, 0.8, seed=2)
        with pytest.warns(UserWarning):
            stat = concentration_stat(ch, 20, seed=3)
        assert stat.max_l2 == pytest.approx(0.0, abs=1e-12)
        assert not stat.regime_ok


class TestHminEstimate:
    def test_scalar_channel(self):
        ch = random_channel(1, 4, 1.0, seed=1)
        assert hmin_estimate(ch, 2, seed=1) == pytest.approx(0.0, abs=1e-12)

    def test_unitary_case_brackets(self):
        ch = random_channel(2, 2, 1.0, seed=4)
        est = hmin_estimate(ch, 4, seed=5)
        assert -1e-12 <= est <= LOG2 + 1e-12

    def test_monotone_in_restarts(self):
        ch = random_channel(3, 10, 0.4, seed=6)
        e1 = hmin_estimate(ch, 1, seed=7)
        e4 = hmin_estimate(ch, 4, seed=7)
        assert e4 <= e1 + 1e-12

    def test_consistent_with_entropy_deficit(self):
        # when the concentration radius is informative (k*radius^2 < log k and
        # no product vectors in the range), the optimizer cannot descend below
        # log k - k * radius^2 up to finite-environment slack
        ch = random_channel(4, 250, 0.1, seed=8)
        stat = concentration_stat(ch, 3000, seed=9)
        est = hmin_estimate(ch, 4, seed=10)
        assert est >= math.log(4) - 4 * (stat.bound * 1.05) ** 2 - 0.1

    def test_product_vectors_found_above_threshold(self):
        # for t*k*n > (k-1)*(n-1) the random range generically contains
        # product vectors, so the true minimum output entropy is 0; the
        # multi-start optimizer locates such inputs
        ch = random_channel(2, 300, 0.5, seed=8)   # d = 300 > 299
        est = hmin_estimate(ch, 6, seed=11)
        assert est < 0.01


class TestQuantumStateValidation:
    def test_rejects_non_hermitian(self):
        with pytest.raises(DomainError):
            QuantumState(2, np.array([[0.5, 0.5], [0.0, 0.5]], dtype=complex))

    def test_rejects_wrong_trace(self):
        with pytest.raises(DomainError):
            QuantumState(2, np.eye(2, dtype=complex))

    def test_rejects_negative(self):
        m = np.diag([1.5, -0.5]).astype(complex)
        with pytest.raises(DomainError):
            QuantumState(2, m)
