"""Parameter-sweep drivers: grid evaluation, CSV emission, text summaries.

A sweep varies one model parameter over a grid and evaluates a requested
set of metrics at each point, carrying a standard-error column for every
Monte-Carlo metric.  Output is deterministic for a fixed (spec, seed):
every grid point derives its randomness from the spec seed alone, so runs
are byte-reproducible regardless of worker count.
"""

from __future__ import annotations

import csv
import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .analysis import analytic_error_probs, expected_transmissions, transmission_savings_bounds
from .attack import deflection_coefficient, optimal_attack_strength
from .core import ModelConfig
from .protocol import run_batch

__all__ = [
    "SpecError",
    "SweepSpec",
    "SweepResult",
    "run_sweep",
    "emit_csv",
    "load_csv",
    "summarize",
    "preset_specs",
    "PRESET_NAMES",
]

SWEEP_PARAMS = ("N", "s", "D", "alpha0")
METRICS = (
    "pe_analytic",
    "pe_empirical",
    "nt_analytic",
    "ns_empirical",
    "ns_lb",
    "ns_ub",
    "dc",
    "d_star",
)
# Metrics estimated by Monte Carlo; each gets a companion "<name>_se" column.
MC_METRICS = frozenset({"pe_empirical", "ns_empirical", "nt_analytic"})


class SpecError(ValueError):
    """An experiment specification that cannot be run."""


@dataclass(frozen=True)
class SweepSpec:
    """One-parameter sweep request.

    ``grid`` must be nonempty and strictly increasing; ``metrics`` must be a
    nonempty subset of :data:`METRICS`.  ``n_trials`` is the Monte-Carlo
    budget per grid point (also used as the sample budget of the
    nt_analytic estimator, floored at its minimum of 1000).
    """

    base: ModelConfig
    sweep_param: str
    grid: tuple[float, ...]
    metrics: tuple[str, ...]
    n_trials: int = 10_000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.sweep_param not in SWEEP_PARAMS:
            raise SpecError(f"sweep_param must be one of {SWEEP_PARAMS}, got {self.sweep_param!r}")
        if len(self.grid) == 0:
            raise SpecError("grid must be nonempty")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise SpecError("grid must be strictly increasing")
        if len(self.metrics) == 0:
            raise SpecError("metrics must be nonempty")
        unknown = [m for m in self.metrics if m not in METRICS]
        if unknown:
            raise SpecError(f"unknown metrics {unknown}; choose from {METRICS}")
        if self.n_trials < 1:
            raise SpecError(f"n_trials must be >= 1, got {self.n_trials}")
        if self.sweep_param == "N" and any(v < 1 or v != int(v) for v in self.grid):
            raise SpecError("an N grid must contain positive integers")
        for value in self.grid:
            self.config_at(value)  # every grid point must form a valid config

    def config_at(self, value: float) -> ModelConfig:
        """The model config at one grid value of the swept parameter."""
        try:
            if self.sweep_param == "N":
                return self.base.replace(n_sensors=int(value))
            if self.sweep_param == "s":
                return self.base.replace(signal=float(value))
            if self.sweep_param == "D":
                return self.base.replace(attack_strength=float(value))
            return self.base.replace(byz_frac=float(value))
        except ValueError as exc:
            raise SpecError(f"grid value {value} invalid for {self.sweep_param}: {exc}") from exc

    def columns(self) -> tuple[str, ...]:
        cols = [self.sweep_param]
        for m in self.metrics:
            cols.append(m)
            if m in MC_METRICS:
                cols.append(m + "_se")
        return tuple(cols)

    def canonical(self) -> dict:
        """JSON-ready dict used for hashing and the CSV sidecar."""
        return {
            "base": {
                "n_sensors": self.base.n_sensors,
                "signal": self.base.signal,
                "noise_var": self.base.noise_var,
                "byz_frac": self.base.byz_frac,
                "attack_strength": self.base.attack_strength,
                "prior_h1": self.base.prior_h1,
            },
            "sweep_param": self.sweep_param,
            "grid": list(self.grid),
            "metrics": list(self.metrics),
            "n_trials": self.n_trials,
            "seed": self.seed,
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


@dataclass(frozen=True)
class SweepResult:
    """Tabular sweep output: one row per grid point, plus provenance."""

    columns: tuple[str, ...]
    rows: tuple[tuple[float | None, ...], ...]
    provenance: dict = field(default_factory=dict)

    def column(self, name: str) -> list[float | None]:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]


def _evaluate_point(spec: SweepSpec, value: float) -> tuple[float | None, ...]:
    cfg = spec.config_at(value)
    cells: dict[str, float | None] = {spec.sweep_param: float(value)}
    need_batch = bool(MC_METRICS.intersection(spec.metrics) - {"nt_analytic"})
    batch = run_batch(cfg, spec.n_trials, spec.seed) if need_batch else None
    need_bounds = "ns_lb" in spec.metrics or "ns_ub" in spec.metrics
    bounds = None
    if need_bounds and cfg.n_sensors >= 2:
        bounds = transmission_savings_bounds(cfg)
    for m in spec.metrics:
        if m == "pe_analytic":
            cells[m] = analytic_error_probs(cfg).p_e
        elif m == "pe_empirical":
            cells[m] = batch.pe.value
            cells[m + "_se"] = batch.pe.se
        elif m == "ns_empirical":
            cells[m] = batch.mean_saved.value
            cells[m + "_se"] = batch.mean_saved.se
        elif m == "nt_analytic":
            est = expected_transmissions(cfg, max(spec.n_trials, 1000), spec.seed)
            cells[m] = est.total.value
            cells[m + "_se"] = est.total.se
        elif m == "ns_lb":
            cells[m] = bounds.lb_saved if bounds is not None else None
        elif m == "ns_ub":
            cells[m] = bounds.ub_saved if bounds is not None else None
        elif m == "dc":
            cells[m] = deflection_coefficient(cfg).dc
        elif m == "d_star":
            # Undefined without compromised sensors: an explicit NA cell.
            cells[m] = optimal_attack_strength(cfg) if cfg.byz_frac > 0 else None
    return tuple(cells.get(c) for c in spec.columns())


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Evaluate every grid point of ``spec``.

    Grid points are independent; with ``workers > 1`` they run on a thread
    pool.  Rows are assembled in grid order either way, so the result is a
    pure function of the spec.
    """
    if workers < 1:
        raise SpecError(f"workers must be >= 1, got {workers}")
    if workers == 1 or len(spec.grid) == 1:
        rows = [_evaluate_point(spec, v) for v in spec.grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda v: _evaluate_point(spec, v), spec.grid))
    provenance = {
        "config_hash": spec.config_hash(),
        "seed": spec.seed,
        "version": __version__,
    }
    return SweepResult(columns=spec.columns(), rows=tuple(rows), provenance=provenance)


def _format_cell(value: float | None) -> str:
    return "NA" if value is None else repr(float(value))


def emit_csv(result: SweepResult, path: str | Path) -> Path:
    """Write the sweep table as UTF-8 CSV with LF line endings.

    Floats are written in shortest round-trip decimal form, missing values
    as ``NA``.  A ``<path>.meta.json`` sidecar records the provenance
    (config hash, seed, tool version).
    """
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(result.columns)
            for row in result.rows:
                writer.writerow([_format_cell(v) for v in row])
        meta = Path(str(path) + ".meta.json")
        with open(meta, "w", encoding="utf-8") as fh:
            json.dump(result.provenance, fh, sort_keys=True, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write sweep output to {path}: {exc}") from exc
    return path


def load_csv(path: str | Path) -> SweepResult:
    """Read back a CSV written by :func:`emit_csv` (values parse exactly)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        rows = tuple(
            tuple(None if cell == "NA" else float(cell) for cell in row) for row in reader
        )
    return SweepResult(columns=header, rows=rows)


def summarize(result: SweepResult) -> str:
    """Aligned plain-text table plus extrema of the savings/error metrics."""
    if not result.rows:
        raise ValueError("cannot summarize an empty result")
    header = list(result.columns)
    body = [[_format_shown(v) for v in row] for row in result.rows]
    widths = [max(len(header[i]), *(len(r[i]) for r in body)) for i in range(len(header))]
    lines = [
        "  ".join(h.rjust(w) for h, w in zip(header, widths)),
        "  ".join("-" * w for w in widths),
    ]
    lines += ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in body]
    param = result.columns[0]
    param_vals = result.column(param)
    for name in result.columns[1:]:
        if name.endswith("_se"):
            continue
        pairs = [(v, x) for v, x in zip(result.column(name), param_vals) if v is not None]
        if not pairs:
            continue
        if name.startswith("ns_"):
            v, x = min(pairs)
            lines.append(f"min {name} = {v:.6g} at {param} = {x:g}")
        elif name.startswith("pe_"):
            v, x = max(pairs)
            lines.append(f"max {name} = {v:.6g} at {param} = {x:g}")
    return "\n".join(lines)


def _format_shown(value: float | None) -> str:
    return "NA" if value is None else f"{value:.6g}"


PRESET_NAMES = ("fig1a", "fig1b", "fig2", "fig3", "fig4")

_DESK_N_GRID = (5.0, 10.0, 20.0, 40.0, 60.0, 80.0, 100.0)
_PAPER_N_GRID = (10.0, 25.0, 50.0, 100.0, 200.0, 300.0)


def _d_grid(step: float, stop: float = 12.0) -> tuple[float, ...]:
    n = int(round(stop / step))
    return tuple(i * step for i in range(n + 1))


def preset_specs(
    name: str,
    paper_scale: bool = False,
    n_trials: int | None = None,
    seed: int = 0,
) -> list[tuple[str, SweepSpec]]:
    """Named experiment presets as (label, spec) pairs, one spec per curve.

    Shared assumptions: equal priors, noise_var = 1.  The D sweeps fix
    s = 3 so the blinding strength lands at 5 for a 0.3 compromised
    fraction (and 3 for 0.5).  At desk scale the large-network presets run
    with N = 100; ``paper_scale`` raises them to N = 300 and widens the
    N sweeps.
    """
    if name not in PRESET_NAMES:
        raise SpecError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    big_n = 300 if paper_scale else 100
    out: list[tuple[str, SweepSpec]] = []
    if name in ("fig1a", "fig1b"):
        metrics = ("ns_empirical",) if name == "fig1a" else ("pe_analytic", "pe_empirical")
        trials = n_trials if n_trials is not None else 4000
        for s in (0.5, 4.0):
            base = ModelConfig(
                n_sensors=10, signal=s, noise_var=1.0, byz_frac=0.3, attack_strength=6.0
            )
            spec = SweepSpec(
                base=base,
                sweep_param="N",
                grid=_PAPER_N_GRID if paper_scale else _DESK_N_GRID,
                metrics=metrics,
                n_trials=trials,
                seed=seed,
            )
            out.append((f"s{s:g}", spec))
        return out
    if name == "fig2":
        trials = n_trials if n_trials is not None else 20_000
        for alpha in (0.3, 0.5):
            base = ModelConfig(
                n_sensors=10, signal=3.0, noise_var=1.0, byz_frac=alpha, attack_strength=0.0
            )
            spec = SweepSpec(
                base=base,
                sweep_param="D",
                grid=_d_grid(0.5),
                metrics=("ns_empirical", "nt_analytic"),
                n_trials=trials,
                seed=seed,
            )
            out.append((f"alpha{alpha:g}", spec))
        return out
    if name == "fig3":
        trials = n_trials if n_trials is not None else 4000
        metrics = ("ns_empirical", "ns_lb", "ns_ub")
        grid = _d_grid(1.0)
    else:  # fig4
        trials = n_trials if n_trials is not None else 10_000
        metrics = ("pe_analytic", "pe_empirical")
        grid = _d_grid(0.5)
    for alpha in (0.3, 0.5):
        base = ModelConfig(
            n_sensors=big_n, signal=3.0, noise_var=1.0, byz_frac=alpha, attack_strength=0.0
        )
        spec = SweepSpec(
            base=base,
            sweep_param="D",
            grid=grid,
            metrics=metrics,
            n_trials=trials,
            seed=seed,
        )
        out.append((f"alpha{alpha:g}", spec))
    return out
