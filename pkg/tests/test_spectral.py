import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import pdcfilter as pf
from pdcfilter.errors import ConfigurationError, GridTruncationError

from oracles import (
    GAIN_6DB,
    R_3DB,
    R_6DB,
    geometric_lambdas,
    hermite_functions,
    mehler_mode_scale,
)


class TestFrequencyGrid:
    def test_reference_spacing(self):
        grid = pf.build_frequency_grid(100, -10, 10)
        assert grid.d_omega == pytest.approx(20 / 99, abs=1e-15)
        assert grid.n_points == 100  # reference resolution

    def test_two_point_grid(self):
        assert pf.build_frequency_grid(2, 0, 1).d_omega == 1.0

    def test_points_span_bounds(self):
        grid = pf.build_frequency_grid(7, -3.0, 4.0)
        assert grid.points[0] == -3.0 and grid.points[-1] == 4.0
        assert np.allclose(np.diff(grid.points), grid.d_omega)

    @pytest.mark.parametrize("args", [(1, 0, 1), (0, 0, 1), (10, 1, 1), (10, 2, -2)])
    def test_invalid_grid_rejected(self, args):
        with pytest.raises(ConfigurationError):
            pf.build_frequency_grid(*args)


class TestGaussianJsa:
    def test_normalized_to_1e12(self, grid100):
        jsa = pf.build_gaussian_jsa(pf.GaussianJsaParams(6.0, 2.0, -np.pi / 4), grid100)
        assert abs(jsa.l2_norm_sq - 1.0) <= 1e-12

    def test_diagonal_tilt_closed_form(self, grid100):
        # at theta = -pi/4 the amplitude factorizes over the +/- diagonals
        jsa = pf.build_gaussian_jsa(pf.GaussianJsaParams(6.0, 2.0, -np.pi / 4), grid100)
        w = grid100.points
        ws, wi = np.meshgrid(w, w, indexing="ij")
        expected = np.exp(-((ws - wi) ** 2) / (4 * 36)) * np.exp(-((ws + wi) ** 2) / (4 * 4))
        expected /= np.sqrt(np.sum(expected**2) * grid100.d_omega**2)
        assert np.max(np.abs(jsa.values - expected)) < 1e-12

    def test_anticorrelation_sign(self, grid100):
        jsa = pf.build_gaussian_jsa(pf.GaussianJsaParams(6.0, 2.0, -np.pi / 4), grid100)
        w = grid100.points
        anti = abs(w - 5.0).argmin(), abs(w + 5.0).argmin()
        corr = abs(w - 5.0).argmin(), abs(w - 5.0).argmin()
        assert jsa.values[anti] > 10 * jsa.values[corr]

    def test_separable_when_symmetric(self, grid100):
        jsa = pf.build_gaussian_jsa(pf.GaussianJsaParams(3.0, 3.0, 0.0), grid100)
        schmidt = pf.schmidt_decompose(jsa, n_retained=3)
        assert schmidt.lambdas[0] == pytest.approx(1.0, abs=1e-10)
        assert schmidt.lambdas[1] < 1e-8

    def test_truncation_refused(self):
        tight = pf.build_frequency_grid(64, -3, 3)
        with pytest.raises(GridTruncationError):
            pf.build_gaussian_jsa(pf.GaussianJsaParams(6.0, 2.0, -np.pi / 4), tight)

    def test_bad_params_rejected(self):
        with pytest.raises(ConfigurationError):
            pf.GaussianJsaParams(0.0, 2.0, 0.0)
        with pytest.raises(ConfigurationError):
            pf.GaussianJsaParams(6.0, 2.0, 0.0, gain_b=-1.0)


class TestSchmidtDecompose:
    def test_orthonormal_and_parseval(self, reference_200):
        _, schmidt, _ = reference_200
        dw = schmidt.grid.d_omega
        for modes in (schmidt.signal_modes, schmidt.idler_modes):
            gram = (modes @ modes.conj().T) * dw
            assert np.max(np.abs(gram - np.eye(len(modes)))) < 1e-10
        assert abs(np.sum(schmidt.lambdas**2) - 1.0) < 1e-10

    def test_descending_and_tail(self, reference_200):
        _, schmidt, _ = reference_200
        assert np.all(np.diff(schmidt.lambdas) <= 1e-14)
        tail = float(np.sum(schmidt.lambdas[schmidt.n_retained :] ** 2))
        assert schmidt.tail_weight == pytest.approx(tail, abs=0)

    def test_reconstruction_residual(self, reference_200):
        jsa, schmidt, _ = reference_200
        k = schmidt.n_retained
        approx = (schmidt.signal_modes[:k].T * schmidt.lambdas[:k]) @ schmidt.idler_modes[:k]
        resid = float(np.sum(np.abs(jsa.values - approx) ** 2) * schmidt.grid.d_omega**2)
        assert resid <= schmidt.tail_weight + 1e-10

    def test_geometric_spectrum(self, reference_wide):
        # closed-form oracle: amplitude ratio (6-2)/(6+2) = 0.5, lambda_1 = sqrt(3)/2
        _, schmidt, _ = reference_wide
        ratios = schmidt.lambdas[1:6] / schmidt.lambdas[:5]
        assert np.max(np.abs(ratios - 0.5)) < 1e-3
        expected = geometric_lambdas(6, 6.0, 2.0)
        assert np.max(np.abs(schmidt.lambdas[:6] - expected)) < 1e-6

    @pytest.mark.xfail(
        strict=True,
        reason="the default [-10, 10] window clips modes 4+; the geometric law only "
        "holds there to ~3e-2",
    )
    def test_geometric_spectrum_default_bounds(self, reference_200):
        _, schmidt, _ = reference_200
        ratios = schmidt.lambdas[1:6] / schmidt.lambdas[:5]
        assert np.max(np.abs(ratios - 0.5)) < 1e-3

    def test_mode_shapes_match_hermite_functions(self, reference_wide):
        _, schmidt, _ = reference_wide
        grid = schmidt.grid
        scale = mehler_mode_scale(6.0, 2.0)
        h = hermite_functions(6, grid.points / scale) / np.sqrt(scale)
        for k in range(6):
            overlap = abs(grid.overlap(schmidt.signal_modes[k], h[k]))
            assert overlap > 1 - 1e-6

    def test_idler_sign_alternation(self, reference_wide):
        # odd modes of the idler carry an extra -1 relative to the signal
        _, schmidt, _ = reference_wide
        grid = schmidt.grid
        for k in range(6):
            sign = np.real(grid.overlap(schmidt.signal_modes[k], schmidt.idler_modes[k]))
            assert sign == pytest.approx((-1.0) ** k, abs=1e-9)

    def test_phase_convention_deterministic(self, grid100):
        jsa = pf.build_gaussian_jsa(pf.GaussianJsaParams(6.0, 2.0, -np.pi / 4), grid100)
        a = pf.schmidt_decompose(jsa, 5)
        b = pf.schmidt_decompose(jsa, 5)
        assert np.array_equal(a.signal_modes, b.signal_modes)
        lead = np.max(np.abs(a.signal_modes[:5]), axis=1)
        idx = np.argmax(np.abs(a.signal_modes[:5]), axis=1)
        picked = a.signal_modes[np.arange(5), idx]
        assert np.allclose(np.real(picked), lead) and np.all(np.real(picked) > 0)

    def test_refinement_stability_wide(self):
        # doubling the resolution moves retained amplitudes by < 1e-6 once the
        # window holds the modes
        lams = {}
        for n in (100, 200):
            grid = pf.build_frequency_grid(n, -20, 20)
            jsa = pf.build_gaussian_jsa(pf.GaussianJsaParams(6.0, 2.0, -np.pi / 4), grid)
            lams[n] = pf.schmidt_decompose(jsa, 10).lambdas[:10]
        assert np.max(np.abs(lams[200] - lams[100])) < 1e-6

    @pytest.mark.xfail(
        strict=True,
        reason="boundary clipping on [-10, 10] dominates the refinement error "
        "(~2e-4 per doubling)",
    )
    def test_refinement_stability_default_bounds(self):
        lams = {}
        for n in (100, 200):
            grid = pf.build_frequency_grid(n, -10, 10)
            jsa = pf.build_gaussian_jsa(pf.GaussianJsaParams(6.0, 2.0, -np.pi / 4), grid)
            lams[n] = pf.schmidt_decompose(jsa, 10).lambdas[:10]
        assert np.max(np.abs(lams[200] - lams[100])) < 1e-6

    def test_n_retained_bounds(self, grid100):
        jsa = pf.build_gaussian_jsa(pf.GaussianJsaParams(6.0, 2.0, -np.pi / 4), grid100)
        with pytest.raises(ConfigurationError):
            pf.schmidt_decompose(jsa, 0)
        with pytest.raises(ConfigurationError):
            pf.schmidt_decompose(jsa, 101)


class TestGainAndDb:
    def test_zero_gain(self, reference_200):
        _, schmidt, _ = reference_200
        zero = pf.apply_gain(schmidt, 0.0)
        assert np.all(zero.r_values == 0)

    def test_linearity(self, reference_200):
        _, schmidt, _ = reference_200
        doubled = pf.apply_gain(schmidt, 2.0)
        single = pf.apply_gain(schmidt, 1.0)
        assert np.allclose(doubled.r_values, 2 * single.r_values)

    def test_six_db_gain_value(self, reference_wide):
        # inverse of the dB formula: B = (6 ln10 / 20) / lambda_1 = 0.79764
        _, schmidt, gain = reference_wide
        assert gain == pytest.approx(GAIN_6DB, abs=2e-7)
        assert schmidt.r_values[0] == pytest.approx(R_6DB, abs=1e-12)

    def test_negative_gain_rejected(self, reference_200):
        _, schmidt, _ = reference_200
        with pytest.raises(ConfigurationError):
            pf.apply_gain(schmidt, -0.1)

    def test_db_reference_points(self):
        assert pf.squeezing_db(0.0) == 0.0
        assert pf.squeezing_db(R_6DB) == pytest.approx(6.0, abs=1e-12)
        assert pf.squeezing_db(R_3DB) == pytest.approx(3.0, abs=1e-12)
        assert pf.squeezing_db(0.6908) == pytest.approx(6.000, abs=1e-3)

    def test_db_roundtrip(self):
        assert pf.r_for_squeezing_db(pf.squeezing_db(0.37)) == pytest.approx(0.37, abs=1e-15)

    @given(st.floats(min_value=0.0, max_value=5.0), st.floats(min_value=1e-6, max_value=5.0))
    @settings(max_examples=50, deadline=None)
    def test_db_strictly_increasing(self, r, step):
        assert pf.squeezing_db(r + step) > pf.squeezing_db(r)

    def test_negative_r_rejected(self):
        with pytest.raises(ConfigurationError):
            pf.squeezing_db(-0.1)

    def test_missing_gain_guard(self, grid100):
        jsa = pf.build_gaussian_jsa(pf.GaussianJsaParams(6.0, 2.0, -np.pi / 4), grid100)
        schmidt = pf.schmidt_decompose(jsa, 5)
        with pytest.raises(ConfigurationError):
            pf.build_uv_kernels(schmidt)
