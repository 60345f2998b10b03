"""Spectral filters as frequency-dependent beam splitters, and the projection
of the filtered squeezer onto an arbitrary measurement basis.

A filter transmits amplitude T(w) and couples in vacuum with amplitude
R(w) = sqrt(1 - |T(w)|^2).  The squeezer itself is the pair of Bogoliubov
kernels U (beam-splitter part, cosh weights) and V (squeezing part, sinh
weights) built from the broadband modes.  Projecting the filtered output onto
measurement modes f_k / g_k yields, per mode, six one-frequency kernels: the
U, V contractions against T_a f_k (resp. T_b g_k) plus the reflected-vacuum
amplitudes f_k R_a and g_k R_b.  Those six families are all the covariance
assembly needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .spectral import FrequencyGrid, SchmidtData

_ORTHO_TOL = 1e-8


@dataclass(frozen=True)
class Filter:
    """Complex transmission amplitude sampled on the grid, with |T| <= 1."""

    transmission: np.ndarray
    grid: FrequencyGrid
    kind: str = "custom"
    center: float | None = None
    width: float | None = None

    def __post_init__(self):
        t = np.asarray(self.transmission)
        if t.shape != (self.grid.n_points,):
            raise ConfigurationError(
                f"transmission shape {t.shape} does not match grid size {self.grid.n_points}"
            )
        if np.max(np.abs(t)) > 1.0 + 1e-12:
            raise ConfigurationError(f"|T| exceeds 1 (max {np.max(np.abs(t)):.6g})")

    @property
    def reflection(self) -> np.ndarray:
        """Reflected-vacuum amplitude sqrt(1 - |T|^2), never stored separately."""
        return np.sqrt(np.clip(1.0 - np.abs(self.transmission) ** 2, 0.0, None))


def make_rect_filter(center: float, width: float, grid: FrequencyGrid) -> Filter:
    """Rectangular passband; samples exactly on the edge transmit."""
    if width < 0:
        raise ConfigurationError(f"width must be >= 0, got {width}")
    t = (np.abs(grid.points - center) <= width / 2).astype(float)
    return Filter(t, grid, kind="rectangular", center=float(center), width=float(width))


def make_gauss_filter(center: float, fwhm: float, grid: FrequencyGrid) -> Filter:
    """Gaussian amplitude profile with unit peak; fwhm is the amplitude FWHM."""
    if fwhm <= 0:
        raise ConfigurationError(f"fwhm must be > 0, got {fwhm}")
    t = np.exp(-4 * np.log(2.0) * (grid.points - center) ** 2 / fwhm**2)
    return Filter(t, grid, kind="gaussian", center=float(center), width=float(fwhm))


def make_identity_filter(grid: FrequencyGrid) -> Filter:
    return Filter(np.ones(grid.n_points), grid, kind="identity")


def make_blocking_filter(grid: FrequencyGrid) -> Filter:
    return Filter(np.zeros(grid.n_points), grid, kind="blocking")


def make_flat_filter(amplitude: float, grid: FrequencyGrid) -> Filter:
    """Frequency-independent loss: T = amplitude everywhere (0 <= T <= 1)."""
    if not 0.0 <= amplitude <= 1.0:
        raise ConfigurationError(f"flat transmission amplitude must be in [0, 1], got {amplitude}")
    return Filter(np.full(grid.n_points, float(amplitude)), grid, kind="flat")


@dataclass(frozen=True)
class MeasurementBasis:
    """Orthonormal broadband modes in which the filtered state is measured."""

    signal_fns: np.ndarray
    idler_fns: np.ndarray
    grid: FrequencyGrid

    def __post_init__(self):
        object.__setattr__(self, "signal_fns", np.atleast_2d(np.asarray(self.signal_fns)))
        object.__setattr__(self, "idler_fns", np.atleast_2d(np.asarray(self.idler_fns)))
        for name, fns in (("signal", self.signal_fns), ("idler", self.idler_fns)):
            gram = fns @ fns.conj().T * self.grid.d_omega
            dev = np.max(np.abs(gram - np.eye(fns.shape[0])))
            if dev > _ORTHO_TOL:
                raise ConfigurationError(
                    f"{name} measurement modes not orthonormal (max deviation {dev:.3e})"
                )
        if self.signal_fns.shape != self.idler_fns.shape:
            raise ConfigurationError("signal and idler basis sizes differ")

    @property
    def n_modes(self) -> int:
        return self.signal_fns.shape[0]

    @classmethod
    def from_schmidt(cls, schmidt: SchmidtData, n_modes: int) -> "MeasurementBasis":
        return cls(schmidt.signal_modes[:n_modes], schmidt.idler_modes[:n_modes], schmidt.grid)

    @classmethod
    def from_shared(cls, modes: np.ndarray, grid: FrequencyGrid) -> "MeasurementBasis":
        """One common mode set for signal and idler."""
        m = np.atleast_2d(np.asarray(modes))
        return cls(m, m, grid)


@dataclass(frozen=True)
class BroadbandKernels:
    """Dense two-frequency Bogoliubov kernels of the (unfiltered) squeezer.

    u_* carry the cosh weights, v_* the sinh weights.  Built from
    ``n_kernel_modes`` broadband modes; when that is the complete discrete
    spectrum the kernels satisfy the bosonic commutation relations exactly on
    the grid, otherwise ``truncation_bound`` reports the omitted spectral
    weight sum_{k > m} lambda_k^2.
    """

    u_signal: np.ndarray
    u_idler: np.ndarray
    v_signal: np.ndarray
    v_idler: np.ndarray
    grid: FrequencyGrid
    n_kernel_modes: int
    truncation_bound: float


def build_uv_kernels(schmidt: SchmidtData, n_modes: int | None = None) -> BroadbandKernels:
    """Assemble the squeezer's Bogoliubov kernels from its broadband modes.

    By default every decomposed mode enters the sums (modes beyond the excited
    ones carry cosh(r) ~ 1 and complete the beam-splitter part to the identity
    on the grid, which keeps commutators and covariances exact).  Passing
    ``n_modes`` truncates the sums instead; the omitted weight is then
    reported as ``truncation_bound``.
    """
    r = schmidt.require_gain()
    m = schmidt.n_modes if n_modes is None else int(n_modes)
    if not 1 <= m <= schmidt.n_modes:
        raise ConfigurationError(f"kernel mode count must lie in [1, {schmidt.n_modes}]")
    psi = schmidt.signal_modes[:m]
    phi = schmidt.idler_modes[:m]
    ch = np.cosh(r[:m])
    sh = np.sinh(r[:m])
    u_signal = (psi.conj().T * ch) @ psi
    v_signal = (psi.conj().T * sh) @ phi.conj()
    u_idler = (phi.conj().T * ch) @ phi
    v_idler = (phi.conj().T * sh) @ psi.conj()
    bound = float(np.sum(schmidt.lambdas[m:] ** 2))
    return BroadbandKernels(
        u_signal=u_signal,
        u_idler=u_idler,
        v_signal=v_signal,
        v_idler=v_idler,
        grid=schmidt.grid,
        n_kernel_modes=m,
        truncation_bound=bound,
    )


@dataclass(frozen=True)
class ProjectionSet:
    """Per-measurement-mode kernels of the filtered squeezer.

    Rows of ``u_signal``/``v_signal`` are the signal-arm contractions of the
    measurement modes (through the signal filter) against the U and V
    kernels; ``r_signal`` rows are the pointwise products f_k(w) * R_a(w).
    Idler quantities mirror them with g_k and the idler filter.
    """

    u_signal: np.ndarray
    u_idler: np.ndarray
    v_signal: np.ndarray
    v_idler: np.ndarray
    r_signal: np.ndarray
    r_idler: np.ndarray
    grid: FrequencyGrid
    schmidt: SchmidtData = field(repr=False)
    filter_signal: Filter = field(repr=False)
    filter_idler: Filter = field(repr=False)
    basis: MeasurementBasis = field(repr=False)

    @property
    def n_modes(self) -> int:
        return self.u_signal.shape[0]


def filtered_projections(
    schmidt: SchmidtData,
    filter_signal: Filter,
    filter_idler: Filter,
    basis: MeasurementBasis,
    kernels: BroadbandKernels | None = None,
) -> ProjectionSet:
    """Project the filtered squeezer output onto a measurement basis.

    The contraction integrals use the measurement modes as written (not
    conjugated); for the real-valued reference scenario the distinction is
    immaterial.  ``kernels`` may be passed to reuse a previous
    :func:`build_uv_kernels` result.
    """
    grid = schmidt.grid
    for obj, name in ((filter_signal, "signal filter"), (filter_idler, "idler filter"), (basis, "basis")):
        if obj.grid != grid:
            raise ConfigurationError(f"{name} grid does not match the decomposition grid")
    if kernels is None:
        kernels = build_uv_kernels(schmidt)
    elif kernels.grid != grid:
        raise ConfigurationError("kernel grid does not match the decomposition grid")

    dw = grid.d_omega
    ta = filter_signal.transmission
    tb = filter_idler.transmission
    fa = basis.signal_fns * ta
    gb = basis.idler_fns * tb
    return ProjectionSet(
        u_signal=dw * (fa @ kernels.u_signal),
        v_signal=dw * (fa @ kernels.v_signal),
        u_idler=dw * (gb @ kernels.u_idler),
        v_idler=dw * (gb @ kernels.v_idler),
        r_signal=basis.signal_fns * filter_signal.reflection,
        r_idler=basis.idler_fns * filter_idler.reflection,
        grid=grid,
        schmidt=schmidt,
        filter_signal=filter_signal,
        filter_idler=filter_idler,
        basis=basis,
    )


def commutator_defects(projections: ProjectionSet) -> np.ndarray:
    """Per-mode deviation of the signal-arm bosonic commutator from one.

    For each measured mode the combination
    integral |u|^2 - integral |v|^2 + integral |r|^2 must equal 1; the return
    value is that expression minus 1, mode by mode.
    """
    dw = projections.grid.d_omega
    u2 = np.sum(np.abs(projections.u_signal) ** 2, axis=1)
    v2 = np.sum(np.abs(projections.v_signal) ** 2, axis=1)
    r2 = np.sum(np.abs(projections.r_signal) ** 2, axis=1)
    return dw * (u2 - v2 + r2) - 1.0
