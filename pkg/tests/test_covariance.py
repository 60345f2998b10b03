import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import pdcfilter as pf
from pdcfilter.errors import ConfigurationError, PhysicalityError

from oracles import lossy_epr_block, wick_covariance


class TestAnalyticBlock:
    def test_vacuum(self):
        assert np.array_equal(pf.analytic_epr_block(0.0), 0.5 * np.eye(4))

    def test_three_db_values(self):
        # frozen from cosh/sinh of 2r at r = 0.3454
        block = pf.analytic_epr_block(0.3454)
        assert block[0, 0] == pytest.approx(0.624121528125291, abs=1e-14)
        assert block[0, 2] == pytest.approx(0.3735340437891149, abs=1e-14)

    def test_sign_pattern(self):
        block = pf.analytic_epr_block(0.8)
        assert block[0, 2] > 0  # X-X correlated
        assert block[1, 3] < 0  # Y-Y anticorrelated

    @given(st.floats(min_value=0.0, max_value=3.0))
    @settings(max_examples=30, deadline=None)
    def test_pure_for_any_r(self, r):
        nu = pf.symplectic_eigenvalues(pf.analytic_epr_block(r))
        assert np.max(np.abs(nu - 0.5)) < 1e-9


class TestSymplectics:
    def test_vacuum_eigenvalues(self):
        nu = pf.symplectic_eigenvalues(0.5 * np.eye(12))
        assert nu.shape == (6,)
        assert np.allclose(nu, 0.5)

    def test_unphysical_diagnosed(self):
        passed, lowest = pf.check_physicality(0.4 * np.eye(4))
        assert not passed
        assert lowest == pytest.approx(0.4, abs=1e-12)

    def test_vacuum_passes(self):
        assert pf.check_physicality(0.5 * np.eye(8))[0]

    def test_epr_block_passes(self):
        assert pf.check_physicality(pf.analytic_epr_block(1.0))[0]

    def test_nonsymmetric_rejected(self):
        bad = np.eye(4)
        bad[0, 1] = 0.3
        with pytest.raises(ConfigurationError):
            pf.symplectic_eigenvalues(bad)

    def test_symplectic_form_structure(self):
        omega = pf.symplectic_form(2)
        assert np.array_equal(omega[:2, :2], [[0, 1], [-1, 0]])
        assert np.array_equal(omega @ omega, -np.eye(4))


class TestAssembleCovariance:
    def test_unfiltered_blocks_match_analytic(self, reference_200, kernels_200):
        _, schmidt, _ = reference_200
        ident = pf.make_identity_filter(schmidt.grid)
        basis = pf.MeasurementBasis.from_schmidt(schmidt, 5)
        proj = pf.filtered_projections(schmidt, ident, ident, basis, kernels=kernels_200)
        cov = pf.assemble_covariance(proj)
        for k in range(1, 6):
            expected = pf.analytic_epr_block(schmidt.r_values[k - 1])
            assert np.max(np.abs(cov.block(k) - expected)) < 1e-9
            for l in range(1, 6):
                if l != k:
                    assert np.max(np.abs(cov.block(k, l))) < 1e-9

    def test_blocking_gives_vacuum(self, reference_200, kernels_200):
        _, schmidt, _ = reference_200
        block = pf.make_blocking_filter(schmidt.grid)
        basis = pf.MeasurementBasis.from_schmidt(schmidt, 5)
        proj = pf.filtered_projections(schmidt, block, block, basis, kernels=kernels_200)
        cov = pf.assemble_covariance(proj)
        assert np.max(np.abs(cov.sigma - 0.5 * np.eye(20))) < 1e-12

    @pytest.mark.parametrize("eta", [0.25, 0.5, 0.9])
    def test_flat_loss_equals_beam_splitter(self, reference_200, kernels_200, eta):
        # flat filtering must reduce to ordinary loss, mode structure untouched
        _, schmidt, _ = reference_200
        flat = pf.make_flat_filter(np.sqrt(eta), schmidt.grid)
        basis = pf.MeasurementBasis.from_schmidt(schmidt, 5)
        proj = pf.filtered_projections(schmidt, flat, flat, basis, kernels=kernels_200)
        cov = pf.assemble_covariance(proj)
        for k in range(1, 6):
            expected = lossy_epr_block(eta, schmidt.r_values[k - 1])
            assert np.max(np.abs(cov.block(k) - expected)) < 1e-9

    def test_parity_selection_of_cross_blocks(self, reference_200, kernels_200, rect4_200):
        # symmetric filter couples only equal-parity modes: 1-3 yes, 1-2/2-3 no
        _, schmidt, _ = reference_200
        basis = pf.MeasurementBasis.from_schmidt(schmidt, 3)
        proj = pf.filtered_projections(schmidt, rect4_200, rect4_200, basis, kernels=kernels_200)
        cov = pf.assemble_covariance(proj)
        assert np.max(np.abs(cov.block(1, 2))) < 1e-9
        assert np.max(np.abs(cov.block(2, 3))) < 1e-9
        assert np.max(np.abs(cov.block(1, 3))) > 1e-2

    @given(seed=st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=15, deadline=None)
    def test_random_bases_and_filters_stay_physical(self, seed):
        # end to end: any orthonormal basis and any passive filter pair must
        # give exact commutators and a physical covariance matrix
        rng = np.random.default_rng(seed)
        grid = pf.build_frequency_grid(64, -10.0, 10.0)
        jsa = pf.build_gaussian_jsa(pf.GaussianJsaParams(6.0, 2.0, -np.pi / 4), grid)
        schmidt = pf.apply_gain(pf.schmidt_decompose(jsa, 5), rng.uniform(0.0, 1.2))
        filt_a = pf.make_rect_filter(rng.uniform(-3, 3), rng.uniform(0, 25), grid)
        filt_b = pf.make_gauss_filter(rng.uniform(-3, 3), rng.uniform(0.2, 25), grid)
        q, _ = pf.qr_orthonormalize(rng.standard_normal((64, 4)))
        basis = pf.MeasurementBasis.from_shared(q.T / np.sqrt(grid.d_omega), grid)
        proj = pf.filtered_projections(schmidt, filt_a, filt_b, basis)
        assert np.max(np.abs(pf.commutator_defects(proj))) < 1e-10
        cov = pf.assemble_covariance(proj)
        passed, lowest = pf.check_physicality(cov, tol=1e-9)
        assert passed, lowest
        assert np.max(np.abs(cov.sigma - wick_covariance(proj))) < 1e-12

    def test_against_wick_oracle(self, reference_200, kernels_200, rect4_200):
        _, schmidt, _ = reference_200
        basis = pf.MeasurementBasis.from_schmidt(schmidt, 4)
        proj = pf.filtered_projections(schmidt, rect4_200, rect4_200, basis, kernels=kernels_200)
        cov = pf.assemble_covariance(proj)
        oracle = wick_covariance(proj)
        assert np.max(np.abs(cov.sigma - oracle)) < 1e-12

    def test_wick_oracle_on_gauss_filter(self, reference_200, kernels_200):
        _, schmidt, _ = reference_200
        gauss = pf.make_gauss_filter(0.5, 3.0, schmidt.grid)
        basis = pf.MeasurementBasis.from_schmidt(schmidt, 3)
        proj = pf.filtered_projections(schmidt, gauss, gauss, basis, kernels=kernels_200)
        cov = pf.assemble_covariance(proj)
        assert np.max(np.abs(cov.sigma - wick_covariance(proj))) < 1e-12

    def test_complex_chirped_amplitude(self, grid100):
        # a frequency chirp makes modes and kernels complex, exercising the
        # imaginary parts of every block entry; the Wick oracle still applies
        params = pf.GaussianJsaParams(6.0, 2.0, -np.pi / 4)
        base = pf.build_gaussian_jsa(params, grid100)
        w = grid100.points
        chirp = np.exp(0.05j * (w[:, None] ** 2 + w[None, :] ** 2))
        jsa = pf.JsaMatrix(base.values * chirp, grid100)
        schmidt = pf.apply_gain(pf.schmidt_decompose(jsa, 5), 0.8)
        gauss = pf.make_gauss_filter(0.3, 4.0, grid100)
        basis = pf.MeasurementBasis.from_schmidt(schmidt, 4)
        proj = pf.filtered_projections(schmidt, gauss, gauss, basis)
        cov = pf.assemble_covariance(proj)
        assert np.max(np.abs(cov.sigma - wick_covariance(proj))) < 1e-12
        assert pf.check_physicality(cov)[0]
        assert np.max(np.abs(pf.commutator_defects(proj))) < 1e-12
        assert 0 < pf.purity(cov) <= 1 + 1e-12

    def test_symmetry_and_asymmetry_diagnostic(self, reference_200, kernels_200, rect4_200):
        _, schmidt, _ = reference_200
        basis = pf.MeasurementBasis.from_schmidt(schmidt, 4)
        proj = pf.filtered_projections(schmidt, rect4_200, rect4_200, basis, kernels=kernels_200)
        cov = pf.assemble_covariance(proj)
        assert np.array_equal(cov.sigma, cov.sigma.T)
        assert cov.asymmetry < 1e-12

    def test_truncated_kernels_raise_physicality(self, reference_200, rect4_200):
        # dropping the identity completion starves the measured modes of vacuum
        _, schmidt, _ = reference_200
        kernels = pf.build_uv_kernels(schmidt, n_modes=10)
        basis = pf.MeasurementBasis.from_schmidt(schmidt, 5)
        proj = pf.filtered_projections(schmidt, rect4_200, rect4_200, basis, kernels=kernels)
        with pytest.raises(PhysicalityError) as err:
            pf.assemble_covariance(proj)
        assert err.value.min_symplectic_eigenvalue < 0.5 - 1e-6

    def test_purity_one_for_identity_filter_any_gain(self, reference_200):
        _, schmidt, _ = reference_200
        strong = pf.apply_gain(schmidt, 1.5)
        ident = pf.make_identity_filter(schmidt.grid)
        basis = pf.MeasurementBasis.from_schmidt(strong, 6)
        proj = pf.filtered_projections(strong, ident, ident, basis)
        cov = pf.assemble_covariance(proj)
        assert pf.purity(cov) == pytest.approx(1.0, abs=1e-9)

    def test_n_modes_subselection(self, reference_200, kernels_200):
        _, schmidt, _ = reference_200
        ident = pf.make_identity_filter(schmidt.grid)
        basis = pf.MeasurementBasis.from_schmidt(schmidt, 5)
        proj = pf.filtered_projections(schmidt, ident, ident, basis, kernels=kernels_200)
        cov = pf.assemble_covariance(proj, n_modes=2)
        assert cov.sigma.shape == (8, 8)


class TestCsvRoundTrip:
    def test_exact_roundtrip(self, tmp_path, reference_200, kernels_200, rect4_200):
        _, schmidt, _ = reference_200
        basis = pf.MeasurementBasis.from_schmidt(schmidt, 3)
        proj = pf.filtered_projections(schmidt, rect4_200, rect4_200, basis, kernels=kernels_200)
        cov = pf.assemble_covariance(proj)
        path = tmp_path / "cov.csv"
        pf.write_covariance_csv(cov, path)
        loaded = pf.read_covariance_csv(path)
        assert np.max(np.abs(loaded - cov.sigma)) < 1e-15
