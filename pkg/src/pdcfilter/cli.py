"""End-to-end runs: configuration, sweeps, and report export.

Verbs: ``run`` executes one configuration and writes all artifacts, ``sweep``
produces the filter-width x gain trade-off table, ``validate`` runs the
invariant suite on a configuration.  Configuration is a flat ``key = value``
text file; every key has a default, unknown keys are rejected.  Exit codes:
0 success, 1 configuration error, 2 numerical/physicality error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .basis_opt import EffectiveSchmidt, svd_effective_basis, write_modes_csv
from .covariance import CovarianceMatrix, assemble_covariance, check_physicality, write_covariance_csv
from .errors import ConfigurationError, NumericsError
from .filters import (
    Filter,
    MeasurementBasis,
    build_uv_kernels,
    commutator_defects,
    filtered_projections,
    make_blocking_filter,
    make_flat_filter,
    make_gauss_filter,
    make_identity_filter,
    make_rect_filter,
)
from .genetic import GaParams, OptimizedBasis, ga_optimize_basis, make_state_context, write_convergence_csv
from .metrics import purity, single_mode_character, squeezing_report, write_squeezing_csv
from .spectral import (
    GaussianJsaParams,
    apply_gain,
    build_frequency_grid,
    build_gaussian_jsa,
    gain_for_target_db,
    schmidt_decompose,
    squeezing_db,
)

_BASIS_CHOICES = ("schmidt", "svd", "ga")
_FILTER_CHOICES = ("rect", "gauss", "identity", "blocking", "flat")


@dataclass(frozen=True)
class RunConfig:
    """Complete, validated description of one run or sweep."""

    n_points: int = 100
    omega_min: float = -10.0
    omega_max: float = 10.0
    sigma_a: float = 6.0
    sigma_b: float = 2.0
    theta: float = -math.pi / 4
    gain_b: float | None = None
    target_db: float | None = 6.0
    n_retained: int = 10
    basis: str = "svd"
    filter_kind: str = "rect"
    filter_center: float = 0.0
    filter_width: float = 4.0
    filter_amplitude: float = 1.0
    sweep_widths: tuple[float, ...] = (1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 20.0)
    sweep_target_dbs: tuple[float, ...] = (2.0, 4.0, 6.0)
    ga_modes: int = 5
    population: int = 256
    mutation_prob: float = 0.02
    mutation_sigma: float = 0.1
    convergence_tol: float = 1e-4
    convergence_window: int = 50
    max_generations: int = 10_000
    parent_fraction: float = 0.5
    mass_tolerance: float = 1e-2
    rng_seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.basis not in _BASIS_CHOICES:
            raise ConfigurationError(f"basis must be one of {_BASIS_CHOICES}, got {self.basis!r}")
        if self.filter_kind not in _FILTER_CHOICES:
            raise ConfigurationError(
                f"filter_kind must be one of {_FILTER_CHOICES}, got {self.filter_kind!r}"
            )
        if self.gain_b is not None and self.target_db is not None:
            raise ConfigurationError("set either gain_b or target_db, not both")
        if self.gain_b is None and self.target_db is None:
            raise ConfigurationError("one of gain_b / target_db is required")
        for name in ("sweep_widths", "sweep_target_dbs"):
            values = getattr(self, name)
            if not values:
                raise ConfigurationError(f"{name} must be non-empty")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise ConfigurationError(f"{name} must be strictly increasing")
        if self.threads < 1:
            raise ConfigurationError("threads must be >= 1")
        if self.n_retained < 1 or self.ga_modes < 1:
            raise ConfigurationError("n_retained and ga_modes must be >= 1")

    def ga_params(self) -> GaParams:
        return GaParams(
            population=self.population,
            mutation_prob=self.mutation_prob,
            mutation_sigma=self.mutation_sigma,
            convergence_tol=self.convergence_tol,
            convergence_window=self.convergence_window,
            max_generations=self.max_generations,
            parent_fraction=self.parent_fraction,
            rng_seed=self.rng_seed,
        )


_CONFIG_TYPES = {
    "n_points": int,
    "omega_min": float,
    "omega_max": float,
    "sigma_a": float,
    "sigma_b": float,
    "theta": float,
    "gain_b": float,
    "target_db": float,
    "n_retained": int,
    "basis": str,
    "filter_kind": str,
    "filter_center": float,
    "filter_width": float,
    "filter_amplitude": float,
    "sweep_widths": "float_list",
    "sweep_target_dbs": "float_list",
    "ga_modes": int,
    "population": int,
    "mutation_prob": float,
    "mutation_sigma": float,
    "convergence_tol": float,
    "convergence_window": int,
    "max_generations": int,
    "parent_fraction": float,
    "mass_tolerance": float,
    "rng_seed": int,
    "threads": int,
}


def parse_config_file(path) -> dict:
    """Read ``key = value`` lines; '#' starts a comment, unknown keys error."""
    values: dict = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_TYPES:
            raise ConfigurationError(f"{path}:{lineno}: unknown key {key!r}")
        kind = _CONFIG_TYPES[key]
        try:
            if kind == "float_list":
                values[key] = tuple(float(item) for item in value.split(",") if item.strip())
            elif kind is str:
                values[key] = value
            else:
                values[key] = kind(value)
        except ValueError as exc:
            raise ConfigurationError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    # a file that sets gain_b takes over from the default squeezing target
    if "gain_b" in values and "target_db" not in values:
        values["target_db"] = None
    return values


def build_config(config_path=None, **overrides) -> RunConfig:
    values: dict = {}
    if config_path is not None:
        values.update(parse_config_file(config_path))
    for key, val in overrides.items():
        if val is not None:
            values[key] = val
    return RunConfig(**values)


def _make_filter(config: RunConfig, grid) -> Filter:
    if config.filter_kind == "rect":
        return make_rect_filter(config.filter_center, config.filter_width, grid)
    if config.filter_kind == "gauss":
        return make_gauss_filter(config.filter_center, config.filter_width, grid)
    if config.filter_kind == "identity":
        return make_identity_filter(grid)
    if config.filter_kind == "blocking":
        return make_blocking_filter(grid)
    return make_flat_filter(config.filter_amplitude, grid)


@dataclass(frozen=True)
class RunReport:
    """Everything one pipeline execution produced."""

    config: RunConfig
    basis_method: str
    gain_b: float
    lambdas: np.ndarray
    r_values: np.ndarray
    tail_weight: float
    basis_modes: np.ndarray
    covariance: CovarianceMatrix
    squeezing: list
    purity: float
    single_mode_character: float
    effective: EffectiveSchmidt | None = None
    ga_result: OptimizedBasis | None = field(default=None, repr=False)


def run_single(config: RunConfig) -> RunReport:
    """Execute decomposition -> filtering -> basis selection -> covariance -> metrics."""
    grid = build_frequency_grid(config.n_points, config.omega_min, config.omega_max)
    params = GaussianJsaParams(config.sigma_a, config.sigma_b, config.theta)
    jsa = build_gaussian_jsa(params, grid, max_truncated_mass=config.mass_tolerance)
    schmidt = schmidt_decompose(jsa, n_retained=config.n_retained)
    gain = config.gain_b if config.gain_b is not None else gain_for_target_db(schmidt, config.target_db)
    schmidt = apply_gain(schmidt, gain)
    filt = _make_filter(config, grid)
    kernels = build_uv_kernels(schmidt)

    effective = None
    ga_result = None
    if config.basis == "schmidt":
        basis = MeasurementBasis.from_schmidt(schmidt, config.n_retained)
    elif config.basis == "svd":
        effective = svd_effective_basis(jsa, gain, filt, filt, n_retained=config.n_retained)
        basis = MeasurementBasis(
            effective.signal_modes[: config.n_retained],
            effective.idler_modes[: config.n_retained],
            grid,
        )
    else:
        ctx = make_state_context(schmidt, filt, filt, kernels=kernels)
        ga_result = ga_optimize_basis(ctx, config.ga_modes, config.ga_params())
        basis = MeasurementBasis.from_shared(ga_result.modes, grid)

    proj = filtered_projections(schmidt, filt, filt, basis, kernels=kernels)
    cov = assemble_covariance(proj)
    entries = squeezing_report(cov)
    return RunReport(
        config=config,
        basis_method=config.basis,
        gain_b=float(gain),
        lambdas=schmidt.lambdas[: config.n_retained],
        r_values=schmidt.r_values[: config.n_retained],
        tail_weight=schmidt.tail_weight,
        basis_modes=basis.signal_fns,
        covariance=cov,
        squeezing=entries,
        purity=purity(cov),
        single_mode_character=single_mode_character(entries),
        effective=effective,
        ga_result=ga_result,
    )


@dataclass(frozen=True)
class TradeoffRecord:
    """One point of the filter-width x gain trade-off table."""

    filter_width: float
    gain_b: float
    first_mode_squeezing_db: float
    single_mode_character: float
    purity: float
    tail_weight: float
    basis_method: str
    error: str = ""


def sweep_tradeoff(config: RunConfig) -> list[TradeoffRecord]:
    """Trade-off records over sweep_widths x sweep_target_dbs, sorted by (gain, width).

    A failing point is recorded with its error message and the sweep
    continues.  Points are independent; ``config.threads`` > 1 evaluates them
    in a thread pool (the record list is assembled sequentially afterwards).
    """
    grid = build_frequency_grid(config.n_points, config.omega_min, config.omega_max)
    params = GaussianJsaParams(config.sigma_a, config.sigma_b, config.theta)
    jsa = build_gaussian_jsa(params, grid, max_truncated_mass=config.mass_tolerance)
    schmidt0 = schmidt_decompose(jsa, n_retained=config.n_retained)

    points = []
    for target in config.sweep_target_dbs:
        gain = gain_for_target_db(schmidt0, target)
        schmidt = apply_gain(schmidt0, gain)
        kernels = build_uv_kernels(schmidt)
        for width in config.sweep_widths:
            points.append((gain, width, schmidt, kernels))

    def evaluate(point) -> TradeoffRecord:
        gain, width, schmidt, kernels = point
        try:
            run_cfg = dataclasses.replace(
                config, filter_kind=config.filter_kind, filter_width=width
            )
            filt = _make_filter(run_cfg, grid)
            if config.basis == "schmidt":
                basis = MeasurementBasis.from_schmidt(schmidt, config.n_retained)
            elif config.basis == "svd":
                eff = svd_effective_basis(jsa, gain, filt, filt, n_retained=config.n_retained)
                basis = MeasurementBasis(
                    eff.signal_modes[: config.n_retained],
                    eff.idler_modes[: config.n_retained],
                    grid,
                )
            else:
                ctx = make_state_context(schmidt, filt, filt, kernels=kernels)
                ga = ga_optimize_basis(ctx, config.ga_modes, config.ga_params())
                basis = MeasurementBasis.from_shared(ga.modes, grid)
            proj = filtered_projections(schmidt, filt, filt, basis, kernels=kernels)
            cov = assemble_covariance(proj)
            entries = squeezing_report(cov)
            return TradeoffRecord(
                filter_width=width,
                gain_b=gain,
                first_mode_squeezing_db=entries[0].squeezing_db,
                single_mode_character=single_mode_character(entries),
                purity=purity(cov),
                tail_weight=schmidt.tail_weight,
                basis_method=config.basis,
            )
        except (ConfigurationError, NumericsError) as exc:
            return TradeoffRecord(
                filter_width=width,
                gain_b=gain,
                first_mode_squeezing_db=math.nan,
                single_mode_character=math.nan,
                purity=math.nan,
                tail_weight=schmidt.tail_weight,
                basis_method=config.basis,
                error=f"{type(exc).__name__}: {exc}",
            )

    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            records = list(pool.map(evaluate, points))
    else:
        records = [evaluate(p) for p in points]
    records.sort(key=lambda rec: (rec.gain_b, rec.filter_width))
    return records


def _atomic_write(path: Path, writer) -> None:
    tmp = path.with_name(path.name + ".tmp")
    writer(tmp)
    os.replace(tmp, path)


def _fmt(x: float) -> str:
    return format(x, ".17g")


def export_report(report: RunReport, out_dir) -> list[Path]:
    """Write all artifacts of a single run; reruns with one seed are byte-identical."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def schmidt_csv(path):
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["mode_index", "lambda", "r", "squeezing_db"])
            for i, (lam, r) in enumerate(zip(report.lambdas, report.r_values), start=1):
                w.writerow([i, _fmt(lam), _fmt(r), _fmt(squeezing_db(r))])

    grid = _grid_of(report)
    targets = {
        "schmidt.csv": schmidt_csv,
        "modes.csv": lambda p: write_modes_csv(grid, report.basis_modes, p),
        "covariance.csv": lambda p: write_covariance_csv(report.covariance, p),
        "squeezing.csv": lambda p: write_squeezing_csv(report.squeezing, p),
        "manifest.json": lambda p: _write_manifest(report, p),
    }
    if report.ga_result is not None:
        targets["ga_convergence.csv"] = lambda p: write_convergence_csv(
            report.ga_result.convergence_log, p
        )
    for name, writer in targets.items():
        path = out / name
        _atomic_write(path, writer)
        written.append(path)
    return written


def _grid_of(report: RunReport):
    cfg = report.config
    return build_frequency_grid(cfg.n_points, cfg.omega_min, cfg.omega_max)


def _write_manifest(report: RunReport, path) -> None:
    payload = {
        "library": "pdcfilter",
        "version": __version__,
        "config": dataclasses.asdict(report.config),
        "results": {
            "basis_method": report.basis_method,
            "gain_b": report.gain_b,
            "tail_weight": report.tail_weight,
            "purity": report.purity,
            "single_mode_character": report.single_mode_character,
            "first_mode_squeezing_db": report.squeezing[0].squeezing_db,
            "min_symplectic_eigenvalue": check_physicality(report.covariance)[1],
        },
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def export_tradeoff(records: list[TradeoffRecord], config: RunConfig, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    def table(path):
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(
                [
                    "filter_width",
                    "gain_b",
                    "first_mode_squeezing_db",
                    "single_mode_character",
                    "purity",
                    "tail_weight",
                    "basis_method",
                    "error",
                ]
            )
            for rec in records:
                w.writerow(
                    [
                        _fmt(rec.filter_width),
                        _fmt(rec.gain_b),
                        _fmt(rec.first_mode_squeezing_db),
                        _fmt(rec.single_mode_character),
                        _fmt(rec.purity),
                        _fmt(rec.tail_weight),
                        rec.basis_method,
                        rec.error,
                    ]
                )

    def manifest(path):
        payload = {
            "library": "pdcfilter",
            "version": __version__,
            "config": dataclasses.asdict(config),
            "n_records": len(records),
            "n_failed": sum(1 for rec in records if rec.error),
        }
        Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")

    written = []
    for name, writer in (("tradeoff.csv", table), ("manifest.json", manifest)):
        path = out / name
        _atomic_write(path, writer)
        written.append(path)
    return written


def validate(config: RunConfig, stream=None) -> bool:
    """Run the invariant suite against one configuration, one line per check."""
    stream = stream or sys.stdout
    results: list[tuple[str, bool, str]] = []

    grid = build_frequency_grid(config.n_points, config.omega_min, config.omega_max)
    params = GaussianJsaParams(config.sigma_a, config.sigma_b, config.theta)
    jsa = build_gaussian_jsa(params, grid, max_truncated_mass=config.mass_tolerance)
    results.append(("jsa_normalization", abs(jsa.l2_norm_sq - 1) <= 1e-12, f"|norm-1| = {abs(jsa.l2_norm_sq - 1):.2e}"))

    schmidt = schmidt_decompose(jsa, n_retained=config.n_retained)
    dw = grid.d_omega
    for name, modes in (("signal", schmidt.signal_modes), ("idler", schmidt.idler_modes)):
        gram = modes @ modes.conj().T * dw
        dev = float(np.max(np.abs(gram - np.eye(modes.shape[0]))))
        results.append((f"{name}_orthonormality", dev <= 1e-10, f"max dev {dev:.2e}"))
    parseval = abs(float(np.sum(schmidt.lambdas**2)) - 1)
    results.append(("parseval", parseval <= 1e-10, f"|sum-1| = {parseval:.2e}"))

    gain = config.gain_b if config.gain_b is not None else gain_for_target_db(schmidt, config.target_db)
    schmidt = apply_gain(schmidt, gain)
    filt = _make_filter(config, grid)
    split = float(np.max(np.abs(np.abs(filt.transmission) ** 2 + filt.reflection**2 - 1)))
    results.append(("filter_energy_split", split <= 1e-12, f"max dev {split:.2e}"))

    report = run_single(config)
    proj = filtered_projections(schmidt, filt, filt, _report_basis(report, grid))
    defect = float(np.max(np.abs(commutator_defects(proj))))
    results.append(("commutator_preservation", defect <= 1e-8, f"max defect {defect:.2e}"))

    passed_phys, lowest = check_physicality(report.covariance, tol=1e-9)
    results.append(("physicality", passed_phys, f"min nu = {lowest!r}"))
    try:
        value = purity(report.covariance)
        results.append(("purity_crosscheck", True, f"purity = {value:.9f}"))
    except NumericsError as exc:
        results.append(("purity_crosscheck", False, str(exc)))
    product_ok = all(
        entry.delta2_minus * entry.delta2_plus >= 1 - 1e-9 for entry in report.squeezing
    )
    results.append(("uncertainty_products", product_ok, "min product >= 1 - 1e-9"))

    all_passed = True
    for name, ok, detail in results:
        all_passed &= ok
        print(f"[validate] {name}: {'PASS' if ok else 'FAIL'} ({detail})", file=stream)
    return all_passed


def _report_basis(report: RunReport, grid) -> MeasurementBasis:
    """Reconstruct the full (signal, idler) measurement basis of a run."""
    if report.basis_method == "svd" and report.effective is not None:
        n = report.basis_modes.shape[0]
        return MeasurementBasis(report.basis_modes, report.effective.idler_modes[:n], grid)
    if report.basis_method == "schmidt":
        cfg = report.config
        params = GaussianJsaParams(cfg.sigma_a, cfg.sigma_b, cfg.theta)
        jsa = build_gaussian_jsa(params, grid, max_truncated_mass=cfg.mass_tolerance)
        schmidt = schmidt_decompose(jsa, n_retained=cfg.n_retained)
        return MeasurementBasis.from_schmidt(schmidt, cfg.n_retained)
    return MeasurementBasis.from_shared(report.basis_modes, grid)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pdcfilter",
        description="Gaussian model of spectrally filtered two-mode squeezing",
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb, help_text in (
        ("run", "execute one configuration and write all artifacts"),
        ("sweep", "produce the filter-width x gain trade-off table"),
        ("validate", "run the invariant suite on a configuration"),
    ):
        p = sub.add_parser(verb, help=help_text)
        p.add_argument("--config", type=Path, default=None, help="key = value configuration file")
        p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override rng_seed")
        p.add_argument("--basis", choices=_BASIS_CHOICES, default=None, help="override basis method")
        p.add_argument("--threads", type=int, default=None, help="parallel sweep evaluation")

    args = parser.parse_args(argv)
    try:
        config = build_config(
            config_path=args.config,
            rng_seed=args.seed,
            basis=args.basis,
            threads=args.threads,
        )
        if args.verb == "run":
            report = run_single(config)
            written = export_report(report, args.out)
            first = report.squeezing[0].squeezing_db
            print(
                f"run complete: first mode {first:.4f} dB, purity {report.purity:.6f}, "
                f"single-mode character {report.single_mode_character:.4f}"
            )
            for path in written:
                print(f"  wrote {path}")
        elif args.verb == "sweep":
            records = sweep_tradeoff(config)
            written = export_tradeoff(records, config, args.out)
            failed = sum(1 for rec in records if rec.error)
            print(f"sweep complete: {len(records)} points, {failed} failed")
            for path in written:
                print(f"  wrote {path}")
        else:
            if not validate(config):
                return 2
            print("all invariants hold")
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except NumericsError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
