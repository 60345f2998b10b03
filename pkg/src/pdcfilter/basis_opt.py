"""Measurement bases adapted to the applied filters.

Two decompositions live here.  The effective Schmidt basis comes from the
SVD of the filter-masked amplitude T_a(w_s) T_b(w_i) f(w_s, w_i): its modes
concentrate the surviving squeezing inside the passband and its singular
values, scaled by the gain, bound the per-mode squeezing left after
filtering (they contract: r'_k <= r_k whenever |T| <= 1 on both arms).

The second decomposition targets the special case of identical real
signal/idler modes, one common filter, and uniform gain: the SVD of the
filtered projector kernel T(w) sum_k psi_k(w) psi_k(w') yields per-mode
transmissions kappa_k and mode pairs in which that filter acts as ordinary
beam-splitter loss of transmissivity kappa_k^2, decoupling all modes.  It is
exact only under those preconditions, which are checked, not assumed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .filters import Filter
from .spectral import FrequencyGrid, JsaMatrix, SchmidtData, quadrature_svd


@dataclass(frozen=True)
class EffectiveSchmidt:
    """Filter-adapted broadband modes with gain-scaled amplitudes r'_k."""

    grid: FrequencyGrid
    signal_modes: np.ndarray
    idler_modes: np.ndarray
    r_primes: np.ndarray
    n_retained: int

    @property
    def n_modes(self) -> int:
        return len(self.r_primes)


def svd_effective_basis(
    jsa: JsaMatrix,
    gain_b: float,
    filter_signal: Filter,
    filter_idler: Filter,
    n_retained: int = 10,
) -> EffectiveSchmidt:
    """Decompose the filter-masked amplitude into the effective basis.

    The SVD is taken of the unscaled masked amplitude; a global positive gain
    does not change singular vectors, so the amplitudes are scaled by
    ``gain_b`` afterwards.  The complete discrete mode family is kept (rows
    beyond the filter rank are an arbitrary orthonormal completion with
    r' = 0); ``n_retained`` marks the reporting cut.
    """
    grid = jsa.grid
    if filter_signal.grid != grid or filter_idler.grid != grid:
        raise ConfigurationError("filter grids do not match the amplitude grid")
    if gain_b < 0:
        raise ConfigurationError(f"gain must be >= 0, got {gain_b}")
    if not 1 <= n_retained <= grid.n_points:
        raise ConfigurationError(f"n_retained must lie in [1, {grid.n_points}]")
    masked = (
        filter_signal.transmission[:, None]
        * filter_idler.transmission[None, :]
        * jsa.values
    )
    s, signal, idler = quadrature_svd(masked, grid)
    return EffectiveSchmidt(
        grid=grid,
        signal_modes=signal,
        idler_modes=idler,
        r_primes=gain_b * s,
        n_retained=int(n_retained),
    )


@dataclass(frozen=True)
class FilteredProjectorModes:
    """Per-mode transmissions and mode pairs of the uniform-gain special case.

    ``out_modes`` are the detection modes after the filter, ``in_modes`` the
    matching combinations of the original modes; ``transmissions`` are the
    amplitude transmissions kappa_k in [0, 1].
    """

    grid: FrequencyGrid
    transmissions: np.ndarray
    out_modes: np.ndarray
    in_modes: np.ndarray


def filtered_projector_decomposition(
    schmidt: SchmidtData, filt: Filter, mode_tol: float = 1e-10
) -> FilteredProjectorModes:
    """SVD of the filtered projector onto the retained (identical, real) modes.

    Preconditions of the special case are enforced: the retained signal and
    idler mode functions must be real and identical to within ``mode_tol``.
    The filter has |T| <= 1 by construction.  Transmissions are descending
    and lie in [0, 1] up to round-off.
    """
    if filt.grid != schmidt.grid:
        raise ConfigurationError("filter grid does not match the decomposition grid")
    m = schmidt.n_retained
    psi = schmidt.signal_modes[:m]
    phi = schmidt.idler_modes[:m]
    if np.max(np.abs(np.imag(psi))) > mode_tol or np.max(np.abs(np.imag(phi))) > mode_tol:
        raise ConfigurationError("retained modes must be real for the uniform-loss decomposition")
    if np.max(np.abs(psi - phi)) > mode_tol:
        raise ConfigurationError(
            "retained signal and idler modes must be identical for the uniform-loss decomposition"
        )
    psi = np.real(psi)
    kernel = filt.transmission[:, None] * (psi.T @ psi)
    s, out_modes, in_modes = quadrature_svd(kernel, schmidt.grid)
    return FilteredProjectorModes(
        grid=schmidt.grid,
        transmissions=s[:m],
        out_modes=out_modes[:m],
        in_modes=in_modes[:m],
    )


def write_modes_csv(grid: FrequencyGrid, modes: np.ndarray, path) -> None:
    """Dump mode functions as CSV columns (omega, mode_1, mode_2, ...).

    Complex modes are written as interleaved re/im column pairs.
    """
    import csv

    modes = np.atleast_2d(np.asarray(modes))
    is_complex = np.iscomplexobj(modes) and np.max(np.abs(np.imag(modes))) > 1e-12
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if is_complex:
            header = ["omega"]
            for k in range(modes.shape[0]):
                header += [f"mode_{k + 1}_re", f"mode_{k + 1}_im"]
            writer.writerow(header)
            for j, w in enumerate(grid.points):
                row = [format(w, ".17g")]
                for k in range(modes.shape[0]):
                    row += [format(modes[k, j].real, ".17g"), format(modes[k, j].imag, ".17g")]
                writer.writerow(row)
        else:
            writer.writerow(["omega"] + [f"mode_{k + 1}" for k in range(modes.shape[0])])
            for j, w in enumerate(grid.points):
                writer.writerow(
                    [format(w, ".17g")]
                    + [format(float(np.real(modes[k, j])), ".17g") for k in range(modes.shape[0])]
                )
