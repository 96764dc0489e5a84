"""Experiment orchestration: configuration, Monte Carlo error estimation,
sweeps and report emission.

The error of a configuration is estimated by sampling a true temperature
from the prior per trajectory, simulating the protocol, and averaging the
final posterior mean-square log error across trajectories (the
Rao-Blackwellized estimator; it shares its expectation with the raw
squared estimator error but has lower variance).  Raw-error averaging is
kept behind ``use_raw_errors`` for validation.

Trajectories use independent counter-based streams keyed by
(master_seed, index) and results are reduced in index order, so reports
are byte-identical for a given seed regardless of the worker count.
"""

from __future__ import annotations

import csv
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .bayes import posterior_msle
from .bounds import BoundsReport, compute_bounds_report
from .errors import ConfigurationError
from .priors import GridDistribution, PriorSpec, discretize
from .protocol import (
    Adaptation,
    GapObjective,
    GapSearch,
    ProtocolConfig,
    run_trajectory,
    trajectory_rng,
)

__all__ = [
    "OutputSpec",
    "ExperimentConfig",
    "ExperimentReport",
    "load_config",
    "estimate_emsle",
    "run_sweep",
    "iter_sweep",
    "emit",
    "CSV_COLUMNS",
]

CSV_COLUMNS = [
    "n",
    "m",
    "N",
    "emsle",
    "emsle_se",
    "emsle_inverse",
    "ultimate_tight",
    "ultimate_heisenberg",
    "no_go",
    "alt_no_go",
    "trajectories",
    "seed",
]

# fraction of aborted trajectories above which a report is flagged
ABORT_FLAG_FRACTION = 0.01

_SEED_LIMIT = 2**64


@dataclass(frozen=True)
class OutputSpec:
    path: str | None = None
    format: str = "csv"

    def __post_init__(self) -> None:
        if self.format not in ("csv", "json"):
            raise ConfigurationError(f"output format must be 'csv' or 'json', got {self.format!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment needs: prior, protocol, budget and seeding."""

    prior: PriorSpec
    protocol: ProtocolConfig
    master_seed: int = 12345
    grid_size: int = 2048
    trajectories: int | None = None
    sweep: tuple[tuple[int, int], ...] | None = None
    max_total_probes: int | None = None
    workers: int = 1
    use_raw_errors: bool = False
    output: OutputSpec = field(default_factory=OutputSpec)

    def __post_init__(self) -> None:
        if not (0 <= self.master_seed < _SEED_LIMIT):
            raise ConfigurationError("master_seed must fit an unsigned 64-bit integer")
        if self.trajectories is not None and self.trajectories < 1:
            raise ConfigurationError(f"trajectories must be >= 1, got {self.trajectories}")
        if self.workers < 1:
            raise ConfigurationError(f"workers must be >= 1, got {self.workers}")
        if self.sweep is not None:
            pairs = tuple((int(n), int(m)) for n, m in self.sweep)
            for n, m in pairs:
                if n < 1 or m < 0:
                    raise ConfigurationError(f"invalid sweep pair (n={n}, m={m})")
                if self.max_total_probes is not None and n * m > self.max_total_probes:
                    raise ConfigurationError(
                        f"sweep pair (n={n}, m={m}) exceeds max_total_probes="
                        f"{self.max_total_probes}"
                    )
            object.__setattr__(self, "sweep", pairs)

    def resolved_trajectories(self, m: int | None = None) -> int:
        """Explicit budget, or the default max(500, ceil(1000/m))."""
        if self.trajectories is not None:
            return self.trajectories
        m = self.protocol.m if m is None else m
        if m == 0:
            return 1
        return max(500, math.ceil(1000 / m))

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {
            "prior",
            "protocol",
            "master_seed",
            "grid_size",
            "trajectories",
            "sweep",
            "max_total_probes",
            "workers",
            "use_raw_errors",
            "output",
        }
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        try:
            prior_d = dict(data["prior"])
            alpha = prior_d.get("alpha", 1.0)
            if isinstance(alpha, str):
                alpha = float(alpha)
            prior = PriorSpec(
                alpha=alpha,
                theta_min=float(prior_d["theta_min"]),
                theta_max=float(prior_d["theta_max"]),
            )
        except KeyError as exc:
            raise ConfigurationError(f"prior config missing key {exc}") from exc
        proto_d = dict(data.get("protocol", {}))
        gs_d = proto_d.pop("gap_search", None)
        gap_search = GapSearch(**gs_d) if gs_d else GapSearch()
        try:
            protocol = ProtocolConfig(
                n=int(proto_d.get("n", 1)),
                m=int(proto_d.get("m", 1)),
                d=int(proto_d.get("d", 2)),
                adaptation=Adaptation(proto_d.get("adaptation", "adaptive")),
                objective=GapObjective(proto_d.get("objective", "single_shot_emsle")),
                gap_search=gap_search,
            )
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"invalid protocol config: {exc}") from exc
        extra_proto = set(proto_d) - {"n", "m", "d", "adaptation", "objective"}
        if extra_proto:
            raise ConfigurationError(f"unknown protocol keys: {sorted(extra_proto)}")
        out_d = data.get("output")
        output = OutputSpec(**out_d) if out_d else OutputSpec()
        sweep = data.get("sweep")
        if sweep is not None:
            sweep = tuple((int(n), int(m)) for n, m in sweep)
        return cls(
            prior=prior,
            protocol=protocol,
            master_seed=int(data.get("master_seed", 12345)),
            grid_size=int(data.get("grid_size", 2048)),
            trajectories=data.get("trajectories"),
            sweep=sweep,
            max_total_probes=data.get("max_total_probes"),
            workers=int(data.get("workers", 1)),
            use_raw_errors=bool(data.get("use_raw_errors", False)),
            output=output,
        )

    def to_dict(self) -> dict:
        return {
            "prior": {
                "alpha": self.prior.alpha,
                "theta_min": self.prior.theta_min,
                "theta_max": self.prior.theta_max,
            },
            "protocol": {
                "n": self.protocol.n,
                "m": self.protocol.m,
                "d": self.protocol.d,
                "adaptation": self.protocol.adaptation.value,
                "objective": self.protocol.objective.value,
                "gap_search": {
                    "lo_factor": self.protocol.gap_search.lo_factor,
                    "hi_factor": self.protocol.gap_search.hi_factor,
                    "scan_points": self.protocol.gap_search.scan_points,
                    "rel_tol": self.protocol.gap_search.rel_tol,
                    "tail_mass": self.protocol.gap_search.tail_mass,
                },
            },
            "master_seed": self.master_seed,
            "grid_size": self.grid_size,
            "trajectories": self.trajectories,
            "sweep": [list(p) for p in self.sweep] if self.sweep is not None else None,
            "max_total_probes": self.max_total_probes,
            "workers": self.workers,
            "use_raw_errors": self.use_raw_errors,
            "output": {"path": self.output.path, "format": self.output.format},
        }


def load_config(path: str | Path) -> ExperimentConfig:
    """Read an ExperimentConfig from a JSON document."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError(f"config {path} must hold a JSON object")
    return ExperimentConfig.from_dict(data)


@dataclass
class ExperimentReport:
    """Results of one configuration: error estimate, bounds and series."""

    config: dict
    n: int
    m: int
    emsle: float
    emsle_se: float
    emsle_inverse: float
    emsle_inverse_se: float
    emsle_raw: float
    emsle_raw_se: float
    bounds: BoundsReport
    round_mean_msle: list[float]
    round_mean_abs_log_error: list[float]
    trajectories_requested: int
    trajectories_completed: int
    aborted_trajectories: int
    flagged: bool
    master_seed: int
    wall_time_s: float

    @property
    def total_probes(self) -> int:
        return self.n * self.m

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "n": self.n,
            "m": self.m,
            "N": self.total_probes,
            "emsle": self.emsle,
            "emsle_se": self.emsle_se,
            "emsle_inverse": self.emsle_inverse,
            "emsle_inverse_se": self.emsle_inverse_se,
            "emsle_raw": self.emsle_raw,
            "emsle_raw_se": self.emsle_raw_se,
            "bounds": self.bounds.as_dict(),
            "round_mean_msle": self.round_mean_msle,
            "round_mean_abs_log_error": self.round_mean_abs_log_error,
            "trajectories_requested": self.trajectories_requested,
            "trajectories_completed": self.trajectories_completed,
            "aborted_trajectories": self.aborted_trajectories,
            "flagged": self.flagged,
            "master_seed": self.master_seed,
            "wall_time_s": self.wall_time_s,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentReport":
        return cls(
            config=data["config"],
            n=data["n"],
            m=data["m"],
            emsle=data["emsle"],
            emsle_se=data["emsle_se"],
            emsle_inverse=data["emsle_inverse"],
            emsle_inverse_se=data["emsle_inverse_se"],
            emsle_raw=data["emsle_raw"],
            emsle_raw_se=data["emsle_raw_se"],
            bounds=BoundsReport(**data["bounds"]),
            round_mean_msle=list(data["round_mean_msle"]),
            round_mean_abs_log_error=list(data["round_mean_abs_log_error"]),
            trajectories_requested=data["trajectories_requested"],
            trajectories_completed=data["trajectories_completed"],
            aborted_trajectories=data["aborted_trajectories"],
            flagged=data["flagged"],
            master_seed=data["master_seed"],
            wall_time_s=data["wall_time_s"],
        )


def _prior_cdf(dist: GridDistribution) -> np.ndarray:
    # piecewise-linear CDF from trapezoid segments of the density
    th = dist.grid
    p = dist.weights
    seg = (th[1:] - th[:-1]) * (p[1:] + p[:-1]) * 0.5
    cdf = np.concatenate([[0.0], np.cumsum(seg)])
    return cdf / cdf[-1]


def _sample_theta(dist: GridDistribution, cdf: np.ndarray, u: float) -> float:
    i = int(np.searchsorted(cdf, u, side="right"))
    i = min(max(i, 1), cdf.size - 1)
    c0, c1 = cdf[i - 1], cdf[i]
    t0, t1 = dist.grid[i - 1], dist.grid[i]
    if c1 == c0:
        return float(t0)
    return float(t0 + (u - c0) / (c1 - c0) * (t1 - t0))


def estimate_emsle(config: ExperimentConfig) -> ExperimentReport:
    """Monte Carlo estimate of the expected mean square logarithmic error
    for ``config``'s protocol, with bounds attached."""
    start = time.perf_counter()
    dist = discretize(config.prior, config.grid_size)
    protocol = config.protocol
    n_traj = config.resolved_trajectories()
    cdf = _prior_cdf(dist)
    prior_msle = posterior_msle(dist)
    m = protocol.m

    def one(index: int):
        rng = trajectory_rng(config.master_seed, index)
        theta0 = _sample_theta(dist, cdf, rng.random())
        rec = run_trajectory(dist, theta0, protocol, rng)
        final_msle = float(rec.posterior_msles[-1]) if rec.num_rounds else prior_msle
        abs_log_err = np.abs(np.log(rec.estimators) - math.log(theta0))
        return final_msle, rec.final_log_error, rec.posterior_msles, abs_log_err, rec.aborted

    if config.workers == 1:
        results = [one(i) for i in range(n_traj)]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(one, range(n_traj)))

    # reductions run in trajectory order: results are independent of workers
    rb_vals = np.array([r[0] for r in results])
    raw_vals = np.array([r[1] for r in results])
    aborted = sum(1 for r in results if r[4])
    msle_sum = np.zeros(m)
    abs_sum = np.zeros(m)
    counts = np.zeros(m, dtype=np.int64)
    for _, _, msles, abs_err, _ in results:
        k = msles.size
        if k:
            msle_sum[:k] += msles
            abs_sum[:k] += abs_err
            counts[:k] += 1
    with np.errstate(invalid="ignore", divide="ignore"):
        round_mean_msle = np.where(counts > 0, msle_sum / counts, np.nan)
        round_mean_abs = np.where(counts > 0, abs_sum / counts, np.nan)

    def mean_se(vals: np.ndarray) -> tuple[float, float]:
        mean = float(vals.mean())
        se = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
        return mean, se

    rb_mean, rb_se = mean_se(rb_vals)
    raw_mean, raw_se = mean_se(raw_vals)
    emsle, emsle_se = (raw_mean, raw_se) if config.use_raw_errors else (rb_mean, rb_se)
    inverse = 1.0 / emsle if emsle > 0 else math.inf
    inverse_se = emsle_se / emsle**2 if emsle > 0 else 0.0
    bounds = compute_bounds_report(dist, protocol.n, m, protocol.d)
    return ExperimentReport(
        config=config.to_dict(),
        n=protocol.n,
        m=m,
        emsle=emsle,
        emsle_se=emsle_se,
        emsle_inverse=inverse,
        emsle_inverse_se=inverse_se,
        emsle_raw=raw_mean,
        emsle_raw_se=raw_se,
        bounds=bounds,
        round_mean_msle=[float(x) for x in round_mean_msle],
        round_mean_abs_log_error=[float(x) for x in round_mean_abs],
        trajectories_requested=n_traj,
        trajectories_completed=len(results),
        aborted_trajectories=aborted,
        flagged=aborted > ABORT_FLAG_FRACTION * n_traj,
        master_seed=config.master_seed,
        wall_time_s=time.perf_counter() - start,
    )


def iter_sweep(config: ExperimentConfig):
    """Yield one report per sweep point in (n, m) order.

    A failing point is reported to stderr and skipped; the sweep continues.
    """
    if not config.sweep:
        raise ConfigurationError("sweep requires a nonempty list of (n, m) pairs")
    for n, m in sorted(config.sweep):
        point = replace(
            config,
            protocol=replace(config.protocol, n=n, m=m),
            trajectories=config.trajectories
            if config.trajectories is not None
            else config.resolved_trajectories(m),
        )
        try:
            yield estimate_emsle(point)
        except Exception as exc:  # noqa: BLE001 - point isolation is the contract
            print(f"sweep point (n={n}, m={m}) failed: {exc}", file=sys.stderr)


def run_sweep(config: ExperimentConfig) -> list[ExperimentReport]:
    """All sweep-point reports, in stable (n, m) order."""
    return list(iter_sweep(config))


def _csv_value(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv_row(report: ExperimentReport) -> list[str]:
    b = report.bounds
    values = [
        report.n,
        report.m,
        report.total_probes,
        report.emsle,
        report.emsle_se,
        report.emsle_inverse,
        b.ultimate_inverse,
        b.heisenberg_inverse,
        b.no_go_inverse,
        b.alt_no_go_inverse,
        report.trajectories_completed,
        report.master_seed,
    ]
    return [_csv_value(v) for v in values]


def emit(reports, path: str | Path, fmt: str = "csv") -> Path:
    """Write report(s) to ``path`` as CSV rows or a JSON document.

    CSV columns follow ``CSV_COLUMNS`` (wall time is deliberately absent so
    equal-seed runs emit identical bytes).  JSON mirrors the full reports
    including the config echo and per-round series.
    """
    if isinstance(reports, ExperimentReport):
        reports = [reports]
    path = Path(path)
    try:
        if fmt == "csv":
            with open(path, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(CSV_COLUMNS)
                for rep in reports:
                    writer.writerow(_csv_row(rep))
        elif fmt == "json":
            payload = [rep.to_dict() for rep in reports]
            doc = payload[0] if len(payload) == 1 else payload
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(doc, fh, indent=2)
                fh.write("\n")
        else:
            raise ConfigurationError(f"unknown output format {fmt!r}")
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
    return path
