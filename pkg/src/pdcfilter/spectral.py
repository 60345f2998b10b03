"""Joint spectral amplitudes and their broadband-mode (Schmidt) decompositions.

A pulsed two-mode squeezer is fully characterized by the Schmidt decomposition
of its joint spectral amplitude f(w_s, w_i): orthonormal broadband signal and
idler mode functions paired with non-negative amplitudes whose squares sum to
one.  Multiplying the amplitudes by the optical gain B gives the per-mode
squeezing parameters r_k = B * lambda_k, and r maps to decibels via
squeezing[dB] = -10 log10(exp(-2 r)).

Everything here is discretized on a uniform frequency grid with rectangle-rule
quadrature weight d_omega; mode functions are normalized so that
sum |psi|^2 d_omega = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .errors import ConfigurationError, GridTruncationError, NumericsError

_LOG10_E = float(np.log10(np.e))
_LN10 = float(np.log(10.0))


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform discretization of the (shared) signal/idler frequency axis.

    Frequencies are dimensionless detunings.  Signal and idler always share
    one grid; asymmetric grids are out of scope.
    """

    n_points: int
    omega_min: float
    omega_max: float

    def __post_init__(self):
        if self.n_points < 2:
            raise ConfigurationError(f"n_points must be >= 2, got {self.n_points}")
        if not self.omega_max > self.omega_min:
            raise ConfigurationError(
                f"omega_max must exceed omega_min, got [{self.omega_min}, {self.omega_max}]"
            )

    @property
    def d_omega(self) -> float:
        return (self.omega_max - self.omega_min) / (self.n_points - 1)

    @cached_property
    def points(self) -> np.ndarray:
        return np.linspace(self.omega_min, self.omega_max, self.n_points)

    def overlap(self, f: np.ndarray, g: np.ndarray) -> complex:
        """Quadrature inner product integral(conj(f) * g) d_omega."""
        return complex(np.sum(np.conjugate(f) * g) * self.d_omega)


def build_frequency_grid(n_points: int, omega_min: float, omega_max: float) -> FrequencyGrid:
    """Validated constructor for :class:`FrequencyGrid`."""
    return FrequencyGrid(int(n_points), float(omega_min), float(omega_max))


@dataclass(frozen=True)
class GaussianJsaParams:
    """Widths, tilt, and optical gain of the double-Gaussian amplitude.

    sigma_a and sigma_b are the 1/e half-widths of the two principal-axis
    Gaussians, theta the tilt of those axes in the (w_s, w_i) plane.  The
    reference configuration is sigma_a=6, sigma_b=2, theta=-pi/4: an
    anticorrelated ellipse along the -45 degree diagonal.
    """

    sigma_a: float
    sigma_b: float
    theta: float
    gain_b: float = 0.0

    def __post_init__(self):
        if not (self.sigma_a > 0 and self.sigma_b > 0):
            raise ConfigurationError("sigma_a and sigma_b must be strictly positive")
        if self.gain_b < 0:
            raise ConfigurationError(f"gain_b must be >= 0, got {self.gain_b}")


@dataclass(frozen=True)
class JsaMatrix:
    """Joint spectral amplitude sampled on grid x grid (rows = signal axis).

    Normalized so that the discrete L2 norm sum |f|^2 d_omega^2 equals one.
    """

    values: np.ndarray
    grid: FrequencyGrid

    def __post_init__(self):
        v = np.asarray(self.values)
        n = self.grid.n_points
        if v.shape != (n, n):
            raise ConfigurationError(f"JSA shape {v.shape} does not match grid size {n}")
        if abs(self.l2_norm_sq - 1.0) > 1e-12:
            raise NumericsError(
                f"JSA not normalized: sum|f|^2 d_omega^2 = {self.l2_norm_sq!r}"
            )

    @property
    def l2_norm_sq(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.d_omega**2)


@dataclass(frozen=True)
class SchmidtData:
    """Broadband-mode decomposition of a joint spectral amplitude.

    ``signal_modes`` / ``idler_modes`` hold one mode function per row for the
    complete discrete spectrum (all singular triples of the sampled
    amplitude); ``n_retained`` marks how many leading modes the analysis
    reports on and ``tail_weight`` is the spectral weight
    sum_{k > n_retained} lambda_k^2 beyond them.  ``r_values`` are the
    gain-scaled squeezing parameters r_k = B * lambda_k, present only after
    :func:`apply_gain`.
    """

    grid: FrequencyGrid
    signal_modes: np.ndarray
    idler_modes: np.ndarray
    lambdas: np.ndarray
    n_retained: int
    tail_weight: float
    r_values: np.ndarray | None = None

    @property
    def n_modes(self) -> int:
        """Total number of decomposed modes (the full discrete spectrum)."""
        return len(self.lambdas)

    def require_gain(self) -> np.ndarray:
        if self.r_values is None:
            raise ConfigurationError("SchmidtData has no r_values; call apply_gain first")
        return self.r_values


def build_gaussian_jsa(
    params: GaussianJsaParams,
    grid: FrequencyGrid,
    max_truncated_mass: float = 1e-2,
) -> JsaMatrix:
    """Sample and normalize the tilted double-Gaussian amplitude on the grid.

    Refuses (``GridTruncationError``) when more than ``max_truncated_mass`` of
    the analytic |f|^2 mass falls outside the grid square, since silently
    clipping the amplitude corrupts the normalization and the mode spectrum.

    Parameters
    ----------
    params : GaussianJsaParams
        Widths and tilt; the gain entry is not used here.
    grid : FrequencyGrid
        Shared signal/idler axis.
    max_truncated_mass : float
        Largest acceptable off-grid fraction of the analytic squared-amplitude
        mass.
    """
    w = grid.points
    ws, wi = np.meshgrid(w, w, indexing="ij")
    u = ws * np.cos(params.theta) + wi * np.sin(params.theta)
    v = -ws * np.sin(params.theta) + wi * np.cos(params.theta)
    raw = np.exp(-(u**2) / (2 * params.sigma_a**2)) * np.exp(
        -(v**2) / (2 * params.sigma_b**2)
    )
    grid_mass = float(np.sum(raw**2) * grid.d_omega**2)
    analytic_mass = float(np.pi * params.sigma_a * params.sigma_b)
    off_grid = 1.0 - grid_mass / analytic_mass
    if off_grid > max_truncated_mass:
        raise GridTruncationError(
            f"{off_grid:.3e} of the analytic |f|^2 mass lies outside "
            f"[{grid.omega_min}, {grid.omega_max}] (limit {max_truncated_mass:.1e}); "
            "enlarge the grid or shrink the widths"
        )
    return JsaMatrix(raw / np.sqrt(grid_mass), grid)


def _fix_phases(signal: np.ndarray, idler: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Rotate each signal mode so its largest-magnitude sample is real positive;
    # the paired idler mode absorbs the compensating phase.
    idx = np.argmax(np.abs(signal), axis=1)
    lead = signal[np.arange(signal.shape[0]), idx]
    mag = np.abs(lead)
    phase = np.where(mag > 0, lead / np.where(mag > 0, mag, 1.0), 1.0)
    return signal / phase[:, None], idler * phase[:, None]


def quadrature_svd(
    values: np.ndarray, grid: FrequencyGrid
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Singular-value decomposition under the rectangle-rule inner product.

    Decomposes ``values[i, j] = sum_k s_k * signal_k(w_i) * idler_k(w_j)``
    with both mode families orthonormal under the d_omega quadrature.
    Returns ``(s, signal_modes, idler_modes)`` with modes as rows, singular
    values descending, and the leading-sample phase convention applied.
    """
    dw = grid.d_omega
    try:
        u, s, vh = np.linalg.svd(np.asarray(values) * dw)
    except np.linalg.LinAlgError as exc:
        v = np.asarray(values)
        raise NumericsError(
            f"SVD failed to converge (matrix {v.shape}, max|f|={np.max(np.abs(v)):.3e}, "
            f"any NaN: {bool(np.any(np.isnan(v)))})"
        ) from exc
    signal = u.T / np.sqrt(dw)
    idler = vh.conj() / np.sqrt(dw)
    signal, idler = _fix_phases(signal, idler)
    return s, signal, idler


def schmidt_decompose(jsa: JsaMatrix, n_retained: int = 10) -> SchmidtData:
    """Decompose a normalized amplitude into broadband mode pairs.

    The complete discrete spectrum is kept (it is needed to represent the
    squeezer exactly on the grid); ``n_retained`` only marks the modes the
    analysis reports on.  Amplitudes are descending and satisfy
    sum lambda^2 = 1 to 1e-10.
    """
    if not 1 <= n_retained <= jsa.grid.n_points:
        raise ConfigurationError(
            f"n_retained must lie in [1, {jsa.grid.n_points}], got {n_retained}"
        )
    lambdas, signal, idler = quadrature_svd(jsa.values, jsa.grid)
    total = float(np.sum(lambdas**2))
    if abs(total - 1.0) > 1e-10:
        raise NumericsError(f"Schmidt amplitudes violate Parseval: sum lambda^2 = {total!r}")
    tail = float(np.sum(lambdas[n_retained:] ** 2))
    return SchmidtData(
        grid=jsa.grid,
        signal_modes=signal,
        idler_modes=idler,
        lambdas=lambdas,
        n_retained=int(n_retained),
        tail_weight=tail,
    )


def apply_gain(schmidt: SchmidtData, gain_b: float) -> SchmidtData:
    """Scale the mode amplitudes by the optical gain: r_k = B * lambda_k."""
    if gain_b < 0:
        raise ConfigurationError(f"gain must be >= 0, got {gain_b}")
    return replace(schmidt, r_values=gain_b * schmidt.lambdas)


def squeezing_db(r) -> float | np.ndarray:
    """Convert a squeezing amplitude to decibels: -10 log10(exp(-2 r))."""
    arr = np.asarray(r, dtype=float)
    if np.any(arr < 0):
        raise ConfigurationError("squeezing amplitude must be >= 0")
    out = 20.0 * arr * _LOG10_E
    return float(out) if np.isscalar(r) or arr.ndim == 0 else out


def r_for_squeezing_db(db: float) -> float:
    """Inverse of :func:`squeezing_db`."""
    return float(db) * _LN10 / 20.0


def gain_for_target_db(schmidt: SchmidtData, target_db: float) -> float:
    """Gain that puts ``target_db`` of squeezing in the first mode."""
    if target_db < 0:
        raise ConfigurationError(f"target squeezing must be >= 0 dB, got {target_db}")
    lam1 = float(schmidt.lambdas[0])
    if lam1 <= 0:
        raise ConfigurationError("first Schmidt amplitude vanishes; cannot set a gain target")
    return r_for_squeezing_db(target_db) / lam1
