"""Pointwise certification engine for the product fractional integral.

Given balanced, tail-admissible exponents, the convolution value at a
grid node is bounded by splitting the sum at radii (r1, r2) into four
regions:

* both offsets inside: controlled by the strong maximal value times
  the kernel mass over the inner product ball;
* both outside: Hoelder's inequality against the full L^p norm and the
  closed-form kernel tail integrals;
* mixed: the inner block contributes a ball constant against a partial
  maximal function, the outer block a tail constant against a slice
  norm.

Choosing the radii so that the inner and outer bounds coincide (and the
two mixed bounds coincide) collapses everything, via the balance
relation ``alpha/m = beta/n = 1/p - 1/q``, into

    case 1 (G f <= M f * ||f||):   M f^(p/q) * ||f||^(1 - p/q)
    case 2 (G f >  M f * ||f||):   G f^(p/q) * ||f||^(1 - 2 p/q)

Every inequality in the chain is checked numerically with explicit
constants; a violation beyond the documented discretization slack is a
hard failure, not a warning.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .convolution import RegionBounds, region_split
from .grid import GridFunction, lp_norm, normalize_point, slice_lp_norms_x, slice_lp_norms_y
from .kernel import Exponents, sphere_surface
from .maximal import (WindowFamily, partial_maximal_x, partial_maximal_y,
                      strong_maximal)

__all__ = [
    "ExponentError",
    "CertificateViolation",
    "AdmissibilityReport",
    "check_exponents",
    "inner_ball_constant",
    "tail_integral_constant",
    "bound_region11",
    "bound_region22",
    "bound_region12",
    "bound_region21",
    "region_slack_factors",
    "select_radii_case1",
    "select_radii_case2",
    "final_bound_case1",
    "final_bound_case2",
    "HedbergContext",
    "prepare_certification",
    "HedbergCertificate",
    "certify_point",
    "certificates_to_json",
]

CERTIFICATE_SCHEMA_VERSION = 1

_IDENTITY_TOL = 1e-12


class ExponentError(ValueError):
    """An exponent tuple fails an admissibility condition."""

    def __init__(self, condition: str, message: str):
        super().__init__(message)
        self.condition = condition


class CertificateViolation(RuntimeError):
    """A region sum exceeded its analytic bound beyond the allowed slack."""

    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class AdmissibilityReport:
    """Outcome of the three admissibility checks on an exponent tuple.

    ``balanced`` is the two-sided balance relation, ``combined`` the
    implied single identity 1/q = 1/p - (alpha+beta)/(m+n), and the two
    tail flags ask for (m-alpha) p' > m and (n-beta) p' > n, i.e. that
    the dual-power kernel tails are integrable.
    """

    balanced_x: bool
    balanced_y: bool
    combined: bool
    tail_x: bool
    tail_y: bool
    balance_residual_x: float
    balance_residual_y: float
    combined_residual: float
    tail_exponent_x: float
    tail_exponent_y: float

    @property
    def ok(self) -> bool:
        return (self.balanced_x and self.balanced_y and self.combined
                and self.tail_x and self.tail_y)

    @property
    def first_violation(self) -> str | None:
        for name, good in (("balance_alpha", self.balanced_x),
                           ("balance_beta", self.balanced_y),
                           ("combined_identity", self.combined),
                           ("tail_x", self.tail_x),
                           ("tail_y", self.tail_y)):
            if not good:
                return name
        return None


def check_exponents(exps: Exponents) -> AdmissibilityReport:
    """Report balance, the combined identity, and tail integrability."""
    gap = 1.0 / exps.p - 1.0 / exps.q
    res_x = gap - exps.alpha / exps.m
    res_y = gap - exps.beta / exps.n
    res_c = 1.0 / exps.q - (1.0 / exps.p - (exps.alpha + exps.beta) / (exps.m + exps.n))
    gx = exps.tail_exponent_x
    gy = exps.tail_exponent_y
    return AdmissibilityReport(
        balanced_x=abs(res_x) <= _IDENTITY_TOL,
        balanced_y=abs(res_y) <= _IDENTITY_TOL,
        combined=abs(res_c) <= _IDENTITY_TOL,
        tail_x=gx > exps.m,
        tail_y=gy > exps.n,
        balance_residual_x=res_x,
        balance_residual_y=res_y,
        combined_residual=res_c,
        tail_exponent_x=gx,
        tail_exponent_y=gy,
    )


def _require_admissible(exps: Exponents) -> None:
    report = check_exponents(exps)
    if not report.ok:
        raise ExponentError(report.first_violation,
                            f"exponents fail condition '{report.first_violation}'")


def inner_ball_constant(dim: int, exponent: float) -> float:
    """Integral of |u|^(exponent - dim) over the unit ball of R^dim."""
    if not 0.0 < exponent < dim:
        raise ValueError(f"exponent must lie in (0, {dim}), got {exponent}")
    return sphere_surface(dim) / exponent


def tail_integral_constant(dim: int, decay: float) -> float:
    """Integral of |u|^(-decay) over the complement of the unit ball."""
    if not decay > dim:
        raise ExponentError("tail_x" if dim == 1 else "tail",
                            f"tail decay {decay} must exceed the dimension {dim}")
    return sphere_surface(dim) / (decay - dim)


def _check_positive(**named) -> None:
    for name, value in named.items():
        if not (value > 0 and math.isfinite(value)):
            raise ValueError(f"{name} must be positive and finite, got {value}")


def bound_region11(mf_at_point: float, r1: float, r2: float, exps: Exponents) -> float:
    """Inner-inner bound: c11 * Mf * r1^alpha * r2^beta.

    c11 is the exact kernel mass over the unit product ball, scaled by
    power-law homogeneity to (r1, r2).
    """
    _check_positive(mf_at_point=mf_at_point, r1=r1, r2=r2)
    c11 = inner_ball_constant(exps.m, exps.alpha) * inner_ball_constant(exps.n, exps.beta)
    return c11 * mf_at_point * r1 ** exps.alpha * r2 ** exps.beta


def bound_region22(f_norm: float, r1: float, r2: float, exps: Exponents) -> float:
    """Outer-outer bound: c22 * ||f|| * r1^(alpha - m/p) * r2^(beta - n/p).

    c22 is the product of the two closed-form tail integrals of the
    kernel raised to the dual power p', itself raised to 1/p' per the
    Hoelder step.  Requires both tail conditions.
    """
    _check_positive(f_norm=f_norm, r1=r1, r2=r2)
    gx, gy = exps.tail_exponent_x, exps.tail_exponent_y
    if not gx > exps.m:
        raise ExponentError("tail_x", f"(m - alpha) p' = {gx} must exceed m = {exps.m}")
    if not gy > exps.n:
        raise ExponentError("tail_y", f"(n - beta) p' = {gy} must exceed n = {exps.n}")
    c22 = (tail_integral_constant(exps.m, gx)
           * tail_integral_constant(exps.n, gy)) ** (1.0 / exps.p_conjugate)
    return (c22 * f_norm
            * r1 ** (exps.alpha - exps.m / exps.p)
            * r2 ** (exps.beta - exps.n / exps.p))


def bound_region12(n1_at_x: float, r1: float, r2: float, exps: Exponents) -> float:
    """Inner-outer bound: c12 * ||M1 f(x, .)||_p * r1^alpha * r2^(beta - n/p)."""
    _check_positive(n1_at_x=n1_at_x, r1=r1, r2=r2)
    gy = exps.tail_exponent_y
    if not gy > exps.n:
        raise ExponentError("tail_y", f"(n - beta) p' = {gy} must exceed n = {exps.n}")
    c12 = (inner_ball_constant(exps.m, exps.alpha)
           * tail_integral_constant(exps.n, gy) ** (1.0 / exps.p_conjugate))
    return c12 * n1_at_x * r1 ** exps.alpha * r2 ** (exps.beta - exps.n / exps.p)


def bound_region21(n2_at_y: float, r1: float, r2: float, exps: Exponents) -> float:
    """Outer-inner bound: c21 * ||M2 f(., y)||_p * r1^(alpha - m/p) * r2^beta."""
    _check_positive(n2_at_y=n2_at_y, r1=r1, r2=r2)
    gx = exps.tail_exponent_x
    if not gx > exps.m:
        raise ExponentError("tail_x", f"(m - alpha) p' = {gx} must exceed m = {exps.m}")
    c21 = (inner_ball_constant(exps.n, exps.beta)
           * tail_integral_constant(exps.m, gx) ** (1.0 / exps.p_conjugate))
    return c21 * n2_at_y * r1 ** (exps.alpha - exps.m / exps.p) * r2 ** exps.beta


def _window_cover_slack(dim: int) -> float:
    # smallest strict dyadic cell-window covering a ball of arbitrary
    # radius, including the half-cell offset of the convolution lattice
    return 4.0 if dim == 1 else 26.0


def _shell_sum_slack(dim: int, exponent: float) -> float:
    # dyadic shells instead of the radial integral, one block
    return (_window_cover_slack(dim) * 2.0 ** dim * exponent
            / (dim * (2.0 ** exponent - 1.0)))


def _tail_sum_slack(dim: int, decay: float) -> float:
    # lattice tail sum of r^-decay against the tail integral
    if dim == 1:
        return 2.0 * decay - 1.0
    return (decay - 1.0) * 4.0 ** decay


def region_slack_factors(exps: Exponents) -> dict[str, float]:
    """Discretization safety factors for the four region checks.

    The analytic region bounds are continuum statements; on the lattice
    three gaps open up, each with a worst-case factor:

    * covering a ball of arbitrary radius by the smallest strictly
      larger dyadic cell window, absorbing the half-cell offset between
      the convolution lattice and the window centers (4 for a 1-d
      block, 26 for a 2-d block);
    * bounding the singular kernel factor over dyadic shells instead of
      integrating it (``2^d g / (d (2^g - 1))`` per block with profile
      exponent g);
    * comparing the lattice tail sum of a decreasing power ``r^-g``
      with the tail integral (``2g - 1`` for a 1-d block; a generous
      ``(g - 1) 4^g`` margin for a 2-d block).

    Inner blocks take the first two factors, tail blocks the third
    raised to 1/p' (it enters through the Hoelder step).  The factors
    are deliberately conservative: a region sum exceeding its analytic
    bound times the slack indicates a bug, not discretization noise.
    """
    inv_pc = 1.0 / exps.p_conjugate
    inner_x = _shell_sum_slack(exps.m, exps.alpha)
    inner_y = _shell_sum_slack(exps.n, exps.beta)
    tail_x = _tail_sum_slack(exps.m, exps.tail_exponent_x) ** inv_pc
    tail_y = _tail_sum_slack(exps.n, exps.tail_exponent_y) ** inv_pc
    return {
        "region11": inner_x * inner_y,
        "region12": inner_x * tail_y,
        "region21": inner_y * tail_x,
        "region22": tail_x * tail_y,
    }


def _balanced_radii(ratio: float, n1: float, n2: float, exps: Exponents) -> tuple[float, float]:
    b = n1 / n2
    r1 = (ratio * b) ** (-exps.p / (2.0 * exps.m))
    r2 = (ratio / b) ** (-exps.p / (2.0 * exps.n))
    # balancing identities the closed forms must reproduce
    res1 = r1 ** (-exps.m / exps.p) * r2 ** (-exps.n / exps.p) / ratio - 1.0
    res2 = (r1 ** (-exps.m / exps.p) / r2 ** (-exps.n / exps.p)) / b - 1.0
    if abs(res1) > _IDENTITY_TOL or abs(res2) > _IDENTITY_TOL:
        raise RuntimeError(
            f"radius balancing identities violated: residuals {res1}, {res2}")
    return r1, r2


def select_radii_case1(m_value: float, n1: float, n2: float, f_norm: float,
                       exps: Exponents) -> tuple[float, float]:
    """Radii equalizing the inner bound with the outer bound (case 1).

    Closed forms::

        r1 = [ (Mf/||f||) (n1/n2) ]^(-p/2m)
        r2 = [ (Mf/||f||) (n2/n1) ]^(-p/2n)

    Postconditions (verified): r1^(-m/p) r2^(-n/p) = Mf/||f|| and
    r1^(-m/p) / r2^(-n/p) = n1/n2, both to 1e-12 relative.
    """
    _check_positive(m_value=m_value, n1=n1, n2=n2, f_norm=f_norm)
    return _balanced_radii(m_value / f_norm, n1, n2, exps)


def select_radii_case2(g_value: float, n1: float, n2: float, f_norm: float,
                       exps: Exponents) -> tuple[float, float]:
    """Case-2 radii: the maximal ratio is replaced by G f / ||f||^2."""
    _check_positive(g_value=g_value, n1=n1, n2=n2, f_norm=f_norm)
    return _balanced_radii(g_value / f_norm ** 2, n1, n2, exps)


def final_bound_case1(m_value: float, f_norm: float, exps: Exponents) -> float:
    """Collapsed pointwise bound M f^(p/q) ||f||^(1 - p/q)."""
    e = exps.p / exps.q
    return m_value ** e * f_norm ** (1.0 - e)


def final_bound_case2(g_value: float, f_norm: float, exps: Exponents) -> float:
    """Collapsed pointwise bound G f^(p/q) ||f||^(1 - 2 p/q)."""
    e = exps.p / exps.q
    return g_value ** e * f_norm ** (1.0 - 2.0 * e)


@dataclass
class HedbergContext:
    """Shared read-only precomputation for certifying many points."""

    f: GridFunction
    exps: Exponents
    windows: WindowFamily
    mf: GridFunction
    n1: np.ndarray
    n2: np.ndarray
    f_norm: float


def prepare_certification(f: GridFunction, exps: Exponents,
                          windows: WindowFamily | None = None) -> HedbergContext:
    """Precompute the maximal fields and slice norms for a function.

    The slack factors reported by :func:`region_slack_factors` are
    derived for the dyadic window family; pass a custom family only for
    experimentation.
    """
    _require_admissible(exps)
    if (f.grid.m, f.grid.n) != (exps.m, exps.n):
        raise ValueError(
            f"grid blocks ({f.grid.m}, {f.grid.n}) do not match exponents "
            f"({exps.m}, {exps.n})")
    w = windows if windows is not None else WindowFamily.dyadic(f.grid)
    p = exps.p
    return HedbergContext(
        f=f,
        exps=exps,
        windows=w,
        mf=strong_maximal(f, w),
        n1=slice_lp_norms_x(partial_maximal_x(f, w), p),
        n2=slice_lp_norms_y(partial_maximal_y(f, w), p),
        f_norm=lp_norm(f, p),
    )


@dataclass(frozen=True)
class HedbergCertificate:
    """Machine-checkable record of the pointwise bound at one grid node.

    ``case_id`` is 1 exactly when ``g_value <= m_value * f_norm``.  The
    final bound is ``m_value^(p/q) f_norm^(1-p/q)`` in case 1 and
    ``g_value^(p/q) f_norm^(1-2p/q)`` in case 2; ``lhs`` is the actual
    convolution value, recovered as the total of the region sums.
    ``region_limits`` holds the analytic per-region bound values and
    ``slack_factors`` the discretization slacks they were checked with.
    """

    point: tuple[int, ...]
    point_coordinates: tuple[float, ...]
    case_id: int
    r1: float
    r2: float
    region_bounds: RegionBounds
    m_value: float
    g_value: float
    n1: float
    n2: float
    f_norm: float
    final_bound: float
    lhs: float
    region_limits: dict = field(default_factory=dict)
    slack_factors: dict = field(default_factory=dict)

    @property
    def ratio(self) -> float:
        """Observed lhs / final_bound (0 for the empty-function record)."""
        return self.lhs / self.final_bound if self.final_bound > 0.0 else 0.0

    def to_json_dict(self) -> dict:
        rb = self.region_bounds
        return {
            "schema_version": CERTIFICATE_SCHEMA_VERSION,
            "point": list(self.point),
            "point_coordinates": list(self.point_coordinates),
            "case_id": self.case_id,
            "r1": self.r1,
            "r2": self.r2,
            "regions": {"t11": rb.t11, "t12": rb.t12, "t21": rb.t21, "t22": rb.t22},
            "m_value": self.m_value,
            "g_value": self.g_value,
            "n1": self.n1,
            "n2": self.n2,
            "f_norm": self.f_norm,
            "final_bound": self.final_bound,
            "lhs": self.lhs,
            "ratio": self.ratio,
            "region_limits": dict(self.region_limits),
            "slack_factors": dict(self.slack_factors),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "HedbergCertificate":
        if d.get("schema_version") != CERTIFICATE_SCHEMA_VERSION:
            raise ValueError(f"unsupported certificate schema: {d.get('schema_version')}")
        regions = d["regions"]
        return cls(
            point=tuple(int(i) for i in d["point"]),
            point_coordinates=tuple(float(c) for c in d["point_coordinates"]),
            case_id=int(d["case_id"]),
            r1=float(d["r1"]),
            r2=float(d["r2"]),
            region_bounds=RegionBounds(t11=regions["t11"], t12=regions["t12"],
                                       t21=regions["t21"], t22=regions["t22"],
                                       r1=float(d["r1"]), r2=float(d["r2"])),
            m_value=float(d["m_value"]),
            g_value=float(d["g_value"]),
            n1=float(d["n1"]),
            n2=float(d["n2"]),
            f_norm=float(d["f_norm"]),
            final_bound=float(d["final_bound"]),
            lhs=float(d["lhs"]),
            region_limits=dict(d["region_limits"]),
            slack_factors=dict(d["slack_factors"]),
        )


# relative headroom for pure floating-point noise in the hard checks
_CHECK_REL = 1e-9


def certify_point(f: GridFunction, exps: Exponents, point,
                  context: HedbergContext | None = None) -> HedbergCertificate:
    """Run the full pointwise bound chain at one grid node.

    Selects the case from the computed maximal and mixed-norm values,
    picks the balancing radii in closed form, splits the convolution at
    those radii, and verifies every region sum against its analytic
    bound times the documented slack.  Raises
    :class:`CertificateViolation` if any region check fails and
    :class:`ExponentError` for inadmissible exponents.
    """
    ctx = context if context is not None else prepare_certification(f, exps)
    grid = f.grid
    idx = normalize_point(point, grid.rank, grid.points_per_axis)
    coords = grid.point_coordinates(idx)

    if ctx.f_norm == 0.0:
        return HedbergCertificate(
            point=idx, point_coordinates=coords, case_id=1, r1=0.0, r2=0.0,
            region_bounds=RegionBounds(0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
            m_value=0.0, g_value=0.0, n1=0.0, n2=0.0, f_norm=0.0,
            final_bound=0.0, lhs=0.0,
            region_limits={}, slack_factors=region_slack_factors(exps))

    x_idx = idx[:grid.m]
    y_idx = idx[grid.m:]
    m_value = float(ctx.mf.values[idx])
    n1_val = float(ctx.n1[x_idx])
    n2_val = float(ctx.n2[y_idx])
    g_value = n1_val * n2_val
    f_norm = ctx.f_norm

    case1 = g_value <= m_value * f_norm
    if case1:
        r1, r2 = select_radii_case1(m_value, n1_val, n2_val, f_norm, exps)
        final = final_bound_case1(m_value, f_norm, exps)
    else:
        r1, r2 = select_radii_case2(g_value, n1_val, n2_val, f_norm, exps)
        final = final_bound_case2(g_value, f_norm, exps)

    regions = region_split(f, exps, idx, r1, r2)
    limits = {
        "region11": bound_region11(m_value, r1, r2, exps),
        "region12": bound_region12(n1_val, r1, r2, exps),
        "region21": bound_region21(n2_val, r1, r2, exps),
        "region22": bound_region22(f_norm, r1, r2, exps),
    }
    slacks = region_slack_factors(exps)
    observed = {"region11": regions.t11, "region12": regions.t12,
                "region21": regions.t21, "region22": regions.t22}
    for name, value in observed.items():
        allowance = slacks[name] * limits[name] * (1.0 + _CHECK_REL)
        if value > allowance:
            raise CertificateViolation(
                f"{name} sum {value} exceeds analytic bound {limits[name]} "
                f"times slack {slacks[name]} at point {idx}",
                diagnostics={"point": list(idx), "region": name, "value": value,
                             "limit": limits[name], "slack": slacks[name],
                             "r1": r1, "r2": r2, "case_id": 1 if case1 else 2})

    if case1:
        # the mixed-bound common value must itself collapse under the
        # case hypothesis: n1 r1^a r2^(b - n/p) <= Mf^(p/q) ||f||^(1-p/q)
        mixed_common = n1_val * r1 ** exps.alpha * r2 ** (exps.beta - exps.n / exps.p)
        if mixed_common > final * (1.0 + _CHECK_REL):
            raise CertificateViolation(
                f"mixed-region collapse failed at point {idx}: "
                f"{mixed_common} > {final}",
                diagnostics={"point": list(idx), "region": "mixed_collapse",
                             "value": mixed_common, "limit": final,
                             "slack": 1.0, "r1": r1, "r2": r2, "case_id": 1})

    return HedbergCertificate(
        point=idx, point_coordinates=coords, case_id=1 if case1 else 2,
        r1=r1, r2=r2, region_bounds=regions, m_value=m_value, g_value=g_value,
        n1=n1_val, n2=n2_val, f_norm=f_norm, final_bound=final,
        lhs=regions.total, region_limits=limits, slack_factors=slacks)


def certificates_to_json(certificates, path, metadata: dict | None = None) -> Path:
    """Serialize a certificate list (schema-versioned) to a JSON file."""
    payload = {
        "schema_version": CERTIFICATE_SCHEMA_VERSION,
        "certificates": [c.to_json_dict() for c in certificates],
    }
    if metadata:
        payload.update(metadata)
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return out
