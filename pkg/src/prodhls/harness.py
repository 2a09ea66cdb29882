"""Experiment orchestration: pointwise campaigns, dilation sweeps, norm checks.

Configurations are plain JSON; identical configuration and seed produce
byte-identical CSV/JSON reports.  Every summary embeds the sha256 of the
canonical configuration and the library version.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .convolution import convolve_fast
from .grid import GridFunction, ProductGrid, dilate, lp_norm, sample_function
from .hedberg import (HedbergCertificate, certify_point, check_exponents,
                      prepare_certification)
from .kernel import Exponents, riesz_kernel
from .maximal import WindowFamily, strong_maximal

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "make_family",
    "FAMILY_NAMES",
    "run_pointwise_campaign",
    "PointwiseReport",
    "InstanceResult",
    "run_necessity_sweep",
    "SlopeReport",
    "SweepRow",
    "run_norm_check",
    "NormCheckReport",
    "run_bench_maximal",
    "write_summary_json",
    "write_certificates_json",
    "write_slopes_csv",
]

FAMILY_NAMES = ("gaussian", "box", "tensor-box", "spike", "random")

DEFAULT_STABILITY_FACTOR = 2.0
DEFAULT_SLOPE_TOLERANCE = 0.05
MIN_LADDER_POINTS = 5
MIN_LADDER_SPAN = 10.0


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit code 2)."""


@dataclass
class ExperimentConfig:
    """Declarative description of one experiment run."""

    grid: ProductGrid
    exponents: Exponents
    families: tuple[str, ...] = ("gaussian",)
    family_params: dict = field(default_factory=dict)
    dilations: tuple[tuple[float, float], ...] = ((1.0, 1.0),)
    seed: int = 0
    points_stride: int = 8
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name in self.families:
            if _canonical_family(name) not in FAMILY_NAMES:
                raise ConfigError(f"unknown function family {name!r}")
        if not self.dilations:
            raise ConfigError("dilation ladder must be nonempty")
        for s, t in self.dilations:
            if not (s > 0 and t > 0):
                raise ConfigError(f"dilations must be positive, got ({s}, {t})")
        if self.points_stride < 1:
            raise ConfigError(f"points_stride must be >= 1, got {self.points_stride}")
        if max(self.grid.m, self.grid.n) == 2 and self.grid.points_per_axis > 48:
            raise ConfigError(
                "grids with a 2-d block are capped at 48 points per axis "
                "(keeps the direct-sum oracle runnable)")

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        try:
            g = raw["grid"]
            grid = ProductGrid(m=int(g["m"]), n=int(g["n"]),
                               half_width=float(g["half_width"]),
                               points_per_axis=int(g["points_per_axis"]))
            e = raw["exponents"]
            if "q" in e and e["q"] is not None:
                exps = Exponents(m=grid.m, n=grid.n, alpha=float(e["alpha"]),
                                 beta=float(e["beta"]), p=float(e["p"]), q=float(e["q"]))
            else:
                exps = Exponents.from_balance(m=grid.m, n=grid.n, alpha=float(e["alpha"]),
                                              beta=float(e["beta"]), p=float(e["p"]))
            families = raw.get("families")
            if families is None:
                families = [raw["family"]] if "family" in raw else ["gaussian"]
            dil = tuple((float(s), float(t)) for s, t in raw.get("dilations", [(1.0, 1.0)]))
            return cls(grid=grid, exponents=exps, families=tuple(families),
                       family_params=dict(raw.get("family_params", {})),
                       dilations=dil, seed=int(raw.get("seed", 0)),
                       points_stride=int(raw.get("points_stride", 8)),
                       tolerances=dict(raw.get("tolerances", {})))
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad configuration: {exc}") from exc

    def to_canonical_dict(self) -> dict:
        return {
            "grid": {"m": self.grid.m, "n": self.grid.n,
                     "half_width": self.grid.half_width,
                     "points_per_axis": self.grid.points_per_axis},
            "exponents": {"alpha": self.exponents.alpha, "beta": self.exponents.beta,
                          "p": self.exponents.p, "q": self.exponents.q},
            "families": list(self.families),
            "family_params": self.family_params,
            "dilations": [[s, t] for s, t in self.dilations],
            "seed": self.seed,
            "points_stride": self.points_stride,
            "tolerances": self.tolerances,
        }

    def sha256(self) -> str:
        canon = json.dumps(self.to_canonical_dict(), sort_keys=True,
                           separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def stability_factor(self) -> float:
        return float(self.tolerances.get("stability_factor", DEFAULT_STABILITY_FACTOR))

    def slope_tolerance(self) -> float:
        return float(self.tolerances.get("slope_tolerance", DEFAULT_SLOPE_TOLERANCE))


def _canonical_family(name: str) -> str:
    return "random" if name == "random-seeded" else name


def make_family(name: str, grid: ProductGrid, params: dict | None = None,
                seed: int = 0):
    """Build a dilation family: a callable (s, t) -> GridFunction.

    The analytic families (gaussian, box, tensor-box, spike) are
    evaluated directly at the scaled coordinates, which is the exact
    dilation f(s x, t y); the seeded random family resamples a fixed
    noise field through :func:`prodhls.grid.dilate`.
    """
    params = dict(params or {})
    kind = _canonical_family(name)
    m, n = grid.m, grid.n

    def split_squares(coords, s, t):
        sq = sum((s * c) ** 2 for c in coords[:m])
        sq = sq + sum((t * c) ** 2 for c in coords[m:])
        return sq

    if kind == "gaussian":
        sigma = float(params.get("sigma", 0.125))

        def fam(s, t):
            return sample_function(
                grid, lambda *cs: np.exp(-split_squares(cs, s, t) / (2.0 * sigma ** 2)))
    elif kind == "box":
        w = float(params.get("half_extent", 0.5))

        def fam(s, t):
            def values(*cs):
                inside = 1.0
                for i, c in enumerate(cs):
                    scale = s if i < m else t
                    inside = inside * (np.abs(scale * c) <= w)
                return inside.astype(np.float64)
            return sample_function(grid, values)
    elif kind == "tensor-box":
        wx = float(params.get("half_extent_x", 0.5))
        wy = float(params.get("half_extent_y", 0.25))

        def fam(s, t):
            def values(*cs):
                inside = 1.0
                for i, c in enumerate(cs):
                    scale, w = (s, wx) if i < m else (t, wy)
                    inside = inside * (np.abs(scale * c) <= w)
                return inside.astype(np.float64)
            return sample_function(grid, values)
    elif kind == "spike":
        # near-delta: a unit-mass box a few cells wide at unit dilation,
        # wide enough that a 4x shrink still covers several cells
        w = float(params.get("half_extent", 8.0 * grid.spacing))
        amp = (2.0 * w) ** (-grid.rank)

        def fam(s, t):
            def values(*cs):
                inside = 1.0
                for i, c in enumerate(cs):
                    scale = s if i < m else t
                    inside = inside * (np.abs(scale * c) <= w)
                return amp * inside.astype(np.float64)
            return sample_function(grid, values)
    else:  # random
        rng = np.random.default_rng(seed)
        base = GridFunction(grid, rng.uniform(0.0, 1.0, size=grid.shape))

        def fam(s, t):
            return dilate(base, s, t)

    return fam


def _sample_points(grid: ProductGrid, stride: int) -> list[tuple[int, ...]]:
    axis = range(0, grid.points_per_axis, stride)
    pts: list[tuple[int, ...]] = [()]
    for _ in range(grid.rank):
        pts = [p + (i,) for p in pts for i in axis]
    return pts


@dataclass
class InstanceResult:
    """Certification outcome for one (family, s, t) instance."""

    family: str
    s: float
    t: float
    n_points: int
    max_ratio: float
    worst_point: tuple[int, ...] | None
    case_counts: dict
    certificates: list[HedbergCertificate]


@dataclass
class PointwiseReport:
    instances: list[InstanceResult]
    max_ratio: float
    family_stability: dict
    stability_factor: float
    suite_constant: float | None
    passed: bool

    def summary_dict(self) -> dict:
        return {
            "experiment": "pointwise",
            "max_lhs_over_bound": self.max_ratio,
            "suite_constant": self.suite_constant,
            "stability_factor_required": self.stability_factor,
            "family_stability": self.family_stability,
            "instances": [{
                "family": r.family, "s": r.s, "t": r.t, "points": r.n_points,
                "max_ratio": r.max_ratio,
                "worst_point": list(r.worst_point) if r.worst_point else None,
                "case_counts": r.case_counts,
            } for r in self.instances],
            "passed": self.passed,
        }


def _certify_instance(cfg: ExperimentConfig, family: str, s: float, t: float,
                      points) -> InstanceResult:
    fam = make_family(family, cfg.grid, cfg.family_params.get(family), cfg.seed)
    f = fam(s, t)
    if not np.any(f.values):
        return InstanceResult(family=family, s=s, t=t, n_points=0, max_ratio=0.0,
                              worst_point=None, case_counts={}, certificates=[])
    ctx = prepare_certification(f, cfg.exponents)
    certs = [certify_point(f, cfg.exponents, pt, context=ctx) for pt in points]
    ratios = [c.ratio for c in certs]
    worst = int(np.argmax(ratios))
    cases: dict[str, int] = {}
    for c in certs:
        cases[str(c.case_id)] = cases.get(str(c.case_id), 0) + 1
    return InstanceResult(family=family, s=s, t=t, n_points=len(certs),
                          max_ratio=float(ratios[worst]),
                          worst_point=certs[worst].point, case_counts=cases,
                          certificates=certs)


def run_pointwise_campaign(cfg: ExperimentConfig, parallel: int = 1) -> PointwiseReport:
    """Certify every configured instance on a sublattice of grid nodes.

    Raises :class:`prodhls.hedberg.CertificateViolation` if any region
    check fails anywhere; the CLI turns that into a diagnostic dump.
    """
    report = check_exponents(cfg.exponents)
    if not report.ok:
        raise ConfigError(
            f"pointwise campaign needs admissible exponents "
            f"(violated: {report.first_violation})")
    points = _sample_points(cfg.grid, cfg.points_stride)
    jobs = [(family, s, t) for family in cfg.families for s, t in cfg.dilations]
    if parallel > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=parallel) as pool:
            instances = list(pool.map(
                lambda j: _certify_instance(cfg, j[0], j[1], j[2], points), jobs))
    else:
        instances = [_certify_instance(cfg, *job, points) for job in jobs]

    max_ratio = max((r.max_ratio for r in instances), default=0.0)
    stability: dict[str, float | None] = {}
    for family in cfg.families:
        ratios = [r.max_ratio for r in instances
                  if r.family == family and r.max_ratio > 0.0]
        stability[family] = (max(ratios) / min(ratios)) if ratios else None

    factor = cfg.stability_factor()
    suite_constant = cfg.tolerances.get("suite_constant")
    stable = all(v is None or v < factor for v in stability.values())
    within = suite_constant is None or max_ratio <= float(suite_constant)
    finite = math.isfinite(max_ratio)
    return PointwiseReport(instances=instances, max_ratio=max_ratio,
                           family_stability=stability, stability_factor=factor,
                           suite_constant=suite_constant,
                           passed=bool(stable and within and finite))


@dataclass
class SweepRow:
    s: float
    t: float
    norm_q: float
    norm_p: float

    @property
    def ratio(self) -> float:
        return self.norm_q / self.norm_p if self.norm_p > 0.0 else 0.0


@dataclass
class SlopeReport:
    """Log-log slopes of the norm ratio under per-block dilation.

    The change-of-variables prediction is ``m (1/p - 1/q) - alpha`` for
    the x-dilation slope and ``n (1/p - 1/q) - beta`` for the
    y-dilation slope; both vanish exactly on balanced exponents.
    """

    rows: list[SweepRow]
    slope_s: float
    slope_t: float
    theoretical_slope_s: float
    theoretical_slope_t: float
    slope_tolerance: float
    passed: bool

    def summary_dict(self) -> dict:
        return {
            "experiment": "necessity",
            "slope_s": self.slope_s,
            "slope_t": self.slope_t,
            "theoretical_slope_s": self.theoretical_slope_s,
            "theoretical_slope_t": self.theoretical_slope_t,
            "slope_tolerance": self.slope_tolerance,
            "rows": len(self.rows),
            "passed": self.passed,
        }


def _validate_ladder(values: list[float], label: str) -> None:
    if len(values) < MIN_LADDER_POINTS:
        raise ConfigError(
            f"{label}-ladder has {len(values)} points; needs at least "
            f"{MIN_LADDER_POINTS}")
    span = max(values) / min(values)
    if span < MIN_LADDER_SPAN * (1.0 - 1e-9):
        raise ConfigError(
            f"{label}-ladder spans a factor {span:.3g}; needs at least a decade")


def run_necessity_sweep(cfg: ExperimentConfig) -> SlopeReport:
    """Fit the norm-ratio scaling exponents under anisotropic dilation.

    The configured dilation pairs must contain an (s, 1) ladder and a
    (1, t) ladder, each with at least five points spanning a decade.
    """
    family = cfg.families[0]
    fam = make_family(family, cfg.grid, cfg.family_params.get(family), cfg.seed)
    s_ladder = sorted({s for s, t in cfg.dilations if t == 1.0})
    t_ladder = sorted({t for s, t in cfg.dilations if s == 1.0})
    _validate_ladder(s_ladder, "s")
    _validate_ladder(t_ladder, "t")

    exps = cfg.exponents
    kernel = riesz_kernel(cfg.grid, exps)

    def measure(s: float, t: float) -> SweepRow:
        f = fam(s, t)
        return SweepRow(s=s, t=t, norm_q=lp_norm(convolve_fast(f, kernel), exps.q),
                        norm_p=lp_norm(f, exps.p))

    rows = [measure(s, 1.0) for s in s_ladder]
    rows += [measure(1.0, t) for t in t_ladder]

    def fit(points: list[SweepRow], key) -> float:
        xs = np.log([key(r) for r in points])
        ys = np.log([r.ratio for r in points])
        return float(np.polyfit(xs, ys, 1)[0])

    slope_s = fit([r for r in rows if r.t == 1.0], lambda r: r.s)
    slope_t = fit([r for r in rows if r.s == 1.0], lambda r: r.t)
    gap = 1.0 / exps.p - 1.0 / exps.q
    theo_s = exps.m * gap - exps.alpha
    theo_t = exps.n * gap - exps.beta
    tol = cfg.slope_tolerance()
    passed = abs(slope_s - theo_s) <= tol and abs(slope_t - theo_t) <= tol
    return SlopeReport(rows=rows, slope_s=slope_s, slope_t=slope_t,
                       theoretical_slope_s=theo_s, theoretical_slope_t=theo_t,
                       slope_tolerance=tol, passed=passed)


@dataclass
class NormCheckReport:
    """Norm-inequality ratios across families and dilations."""

    rows: list[dict]
    max_ratio: float
    family_stability: dict
    stability_factor: float
    pinned_constant: float | None
    passed: bool

    def summary_dict(self) -> dict:
        return {
            "experiment": "normcheck",
            "max_ratio": self.max_ratio,
            "pinned_constant": self.pinned_constant,
            "stability_factor_required": self.stability_factor,
            "family_stability": self.family_stability,
            "rows": self.rows,
            "passed": self.passed,
        }


def run_norm_check(cfg: ExperimentConfig) -> NormCheckReport:
    """Measure ||f * kernel||_q / ||f||_p over every configured instance."""
    report = check_exponents(cfg.exponents)
    if not report.ok:
        raise ConfigError(
            f"norm check needs admissible exponents "
            f"(violated: {report.first_violation})")
    exps = cfg.exponents
    kernel = riesz_kernel(cfg.grid, exps)
    rows = []
    for family in cfg.families:
        fam = make_family(family, cfg.grid, cfg.family_params.get(family), cfg.seed)
        for s, t in cfg.dilations:
            f = fam(s, t)
            norm_p = lp_norm(f, exps.p)
            norm_q = lp_norm(convolve_fast(f, kernel), exps.q) if norm_p > 0.0 else 0.0
            rows.append({"family": family, "s": s, "t": t, "norm_q": norm_q,
                         "norm_p": norm_p,
                         "ratio": norm_q / norm_p if norm_p > 0.0 else 0.0})
    max_ratio = max((r["ratio"] for r in rows), default=0.0)
    stability: dict[str, float | None] = {}
    for family in cfg.families:
        ratios = [r["ratio"] for r in rows if r["family"] == family and r["ratio"] > 0.0]
        stability[family] = (max(ratios) / min(ratios)) if ratios else None
    factor = cfg.stability_factor()
    pinned = cfg.tolerances.get("norm_constant")
    stable = all(v is None or v < factor for v in stability.values())
    within = pinned is None or max_ratio <= float(pinned)
    return NormCheckReport(rows=rows, max_ratio=max_ratio, family_stability=stability,
                           stability_factor=factor,
                           pinned_constant=pinned, passed=bool(stable and within))


def run_bench_maximal(cfg: ExperimentConfig) -> dict:
    """Time the strong maximal operator across grid sizes.

    Also cross-checks the windowed implementation against a naive
    enumeration on a small grid.  Timings vary run to run, so this
    report is exempt from the byte-determinism guarantee.
    """
    rng = np.random.default_rng(cfg.seed)
    results = []
    for N in (16, 32, 64, cfg.grid.points_per_axis):
        grid = ProductGrid(m=1, n=1, half_width=cfg.grid.half_width, points_per_axis=N)
        f = GridFunction(grid, rng.uniform(0.0, 1.0, size=grid.shape))
        w = WindowFamily.dyadic(grid)
        start = time.perf_counter()
        out = strong_maximal(f, w)
        elapsed = time.perf_counter() - start
        entry = {"points_per_axis": N, "seconds": elapsed}
        if N <= 16:
            naive = _naive_strong_maximal(f, w)
            entry["max_rel_dev_vs_naive"] = float(
                np.max(np.abs(out.values - naive) / np.maximum(naive, 1e-300)))
        results.append(entry)
    return {"experiment": "bench-maximal", "results": results}


def _naive_strong_maximal(f: GridFunction, w: WindowFamily) -> np.ndarray:
    # reference path: explicit loops, 1-d blocks only
    grid = f.grid
    N = grid.points_per_axis
    radii = w.cell_radii(grid)
    out = np.zeros(grid.shape)
    for i in range(N):
        for j in range(N):
            best = 0.0
            for rx in radii:
                for ry in radii:
                    xs = slice(max(i - rx + 1, 0), min(i + rx, N))
                    ys = slice(max(j - ry + 1, 0), min(j + ry, N))
                    total = float(f.values[xs, ys].sum())
                    best = max(best, total / ((2 * rx - 1) * (2 * ry - 1)))
            out[i, j] = best
    return out


def _embed_metadata(payload: dict, cfg: ExperimentConfig) -> dict:
    payload = dict(payload)
    payload["config_sha256"] = cfg.sha256()
    payload["library_version"] = __version__
    return payload


def write_summary_json(path, payload: dict, cfg: ExperimentConfig) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(_embed_metadata(payload, cfg), sort_keys=True,
                              indent=2) + "\n")
    return out


def write_certificates_json(path, report: PointwiseReport,
                            cfg: ExperimentConfig) -> Path:
    payload = _embed_metadata({
        "schema_version": 1,
        "instances": [{
            "family": r.family, "s": r.s, "t": r.t,
            "certificates": [c.to_json_dict() for c in r.certificates],
        } for r in report.instances],
    }, cfg)
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return out


def write_slopes_csv(path, report: SlopeReport) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    lines = ["s,t,norm_q,norm_p,ratio,log_s,log_ratio"]
    for r in report.rows:
        log_ratio = math.log(r.ratio) if r.ratio > 0.0 else math.nan
        lines.append(",".join(repr(v) for v in
                              (r.s, r.t, r.norm_q, r.norm_p, r.ratio,
                               math.log(r.s), log_ratio)))
    out.write_text("\n".join(lines) + "\n")
    return out
