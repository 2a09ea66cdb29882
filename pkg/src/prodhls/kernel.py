"""Product power-law kernels and dyadic layer-cake envelopes.

The kernel on the product box is separable: one radial power profile
``r -> r^(a - d)`` per block, singular at the block origin and locally
integrable there whenever ``0 < a < d``.  A layer cake replaces such a
profile by a finite positive combination of origin-centered ball
indicators with dyadically shrinking radii; the resulting step function
dominates the profile from above and is itself at most ``2^(d - a)``
times the profile on the covered range of radii.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import GridFunction, ProductGrid

__all__ = [
    "BALANCE_TOL",
    "Exponents",
    "riesz_kernel",
    "LayerCake",
    "layer_cake",
    "sphere_surface",
    "ball_volume",
    "profile_ball_integral",
]

BALANCE_TOL = 1e-12

# Surface measure of the unit sphere and volume of the unit ball, d = 1, 2.
_SPHERE_SURFACE = {1: 2.0, 2: 2.0 * math.pi}
_BALL_VOLUME = {1: 2.0, 2: math.pi}


def sphere_surface(dim: int) -> float:
    """Surface measure of the unit sphere in R^dim (dim = 1 or 2)."""
    try:
        return _SPHERE_SURFACE[dim]
    except KeyError:
        raise ValueError(f"dimension must be 1 or 2, got {dim}") from None


def ball_volume(dim: int, radius: float) -> float:
    """Lebesgue measure of the ball of the given radius in R^dim."""
    try:
        return _BALL_VOLUME[dim] * radius ** dim
    except KeyError:
        raise ValueError(f"dimension must be 1 or 2, got {dim}") from None


def profile_ball_integral(dim: int, exponent: float, radius: float) -> float:
    """Closed form of the integral of |u|^(exponent - dim) over |u| <= radius."""
    if not 0.0 < exponent < dim:
        raise ValueError(f"profile exponent must lie in (0, {dim}), got {exponent}")
    return sphere_surface(dim) * radius ** exponent / exponent


@dataclass(frozen=True)
class Exponents:
    """The exponent tuple (m, n, alpha, beta, p, q).

    Constraints enforced at construction: ``0 < alpha < m``,
    ``0 < beta < n`` and ``1 < p < q < inf``.  :attr:`balanced` reports
    whether ``1/p - 1/q = alpha/m = beta/n`` holds to ``BALANCE_TOL``;
    the pointwise certification engine requires balance, while the
    dilation experiments deliberately violate it.
    """

    m: int
    n: int
    alpha: float
    beta: float
    p: float
    q: float

    def __post_init__(self) -> None:
        if self.m not in (1, 2):
            raise ValueError(f"m must be 1 or 2, got {self.m}")
        if self.n not in (1, 2):
            raise ValueError(f"n must be 1 or 2, got {self.n}")
        if not 0.0 < self.alpha < self.m:
            raise ValueError(f"alpha must lie in (0, m) = (0, {self.m}), got {self.alpha}")
        if not 0.0 < self.beta < self.n:
            raise ValueError(f"beta must lie in (0, n) = (0, {self.n}), got {self.beta}")
        if not (1.0 < self.p < self.q and math.isfinite(self.q)):
            raise ValueError(f"need 1 < p < q < inf, got p={self.p}, q={self.q}")

    @classmethod
    def from_balance(cls, m: int, n: int, alpha: float, beta: float, p: float) -> "Exponents":
        """Build a balanced tuple, deriving q from ``1/q = 1/p - alpha/m``.

        Accepting only (p, alpha, beta) and deriving q removes the
        possibility of an inconsistent parameter state.
        """
        if abs(alpha / m - beta / n) > BALANCE_TOL:
            raise ValueError(
                f"alpha/m = {alpha / m} and beta/n = {beta / n} differ; cannot balance")
        inv_q = 1.0 / p - alpha / m
        if inv_q <= 0.0:
            raise ValueError(
                f"alpha/m = {alpha / m} must be below 1/p = {1.0 / p} for a finite q")
        return cls(m=m, n=n, alpha=alpha, beta=beta, p=p, q=1.0 / inv_q)

    @property
    def balanced(self) -> bool:
        gap = 1.0 / self.p - 1.0 / self.q
        return (abs(gap - self.alpha / self.m) <= BALANCE_TOL
                and abs(gap - self.beta / self.n) <= BALANCE_TOL)

    @property
    def p_conjugate(self) -> float:
        return self.p / (self.p - 1.0)

    @property
    def tail_exponent_x(self) -> float:
        """Decay rate (m - alpha) p' of the x-factor raised to the dual power."""
        return (self.m - self.alpha) * self.p_conjugate

    @property
    def tail_exponent_y(self) -> float:
        return (self.n - self.beta) * self.p_conjugate


def riesz_kernel(grid: ProductGrid, exps: Exponents) -> GridFunction:
    """Materialize |x|^(alpha-m) |y|^(beta-n) at the cell centers.

    The array is built as the outer product of the x-block factor and
    the y-block factor, so separability holds exactly.  Every value is
    finite because no cell center sits at either block origin.
    """
    if (grid.m, grid.n) != (exps.m, exps.n):
        raise ValueError(
            f"grid blocks ({grid.m}, {grid.n}) do not match exponents ({exps.m}, {exps.n})")
    x_factor = grid.x_norms() ** (exps.alpha - exps.m)
    y_factor = grid.y_norms() ** (exps.beta - exps.n)
    return GridFunction(grid, np.multiply.outer(x_factor, y_factor))


@dataclass(frozen=True)
class LayerCake:
    """Dyadic step-function envelope of a radial power profile.

    ``levels`` holds (coefficient, ball_radius) pairs, radii halving
    from ``truncation_radius`` downward.  The induced step function

        step(r) = sum of coefficients of levels with ball_radius >= r

    satisfies, for every r in ``(truncation_radius * 2^-depth,
    truncation_radius]``,

        step(r) >= profile(r) >= step(r) * 2^-(dim - exponent)

    with ``profile(r) = r^(exponent - dim)``.
    """

    levels: tuple[tuple[float, float], ...]
    truncation_radius: float
    dim: int
    exponent: float

    def __post_init__(self) -> None:
        if not self.levels:
            raise ValueError("a layer cake needs at least one level")
        radii = [r for _, r in self.levels]
        if abs(radii[0] - self.truncation_radius) > 1e-12 * self.truncation_radius:
            raise ValueError("the first level must sit at the truncation radius")
        for (a, r), (_, r_next) in zip(self.levels, self.levels[1:]):
            if abs(r_next - 0.5 * r) > 1e-12 * r:
                raise ValueError("level radii must halve dyadically")
        if any(a <= 0.0 for a, _ in self.levels):
            raise ValueError("level coefficients must be positive")

    @property
    def depth(self) -> int:
        return len(self.levels)

    def profile(self, r):
        """The approximated profile r^(exponent - dim)."""
        return np.asarray(r, dtype=np.float64) ** (self.exponent - self.dim)

    def step(self, r):
        """Evaluate the step function at radii ``r`` (scalar or array)."""
        r = np.asarray(r, dtype=np.float64)
        coeffs = np.array([a for a, _ in self.levels])
        radii_desc = np.array([rad for _, rad in self.levels])
        csum = np.concatenate([[0.0], np.cumsum(coeffs)])
        # number of levels whose ball still contains radius r
        count = len(radii_desc) - np.searchsorted(radii_desc[::-1], r, side="left")
        return csum[count]

    def level_sum(self) -> float:
        """Sum of coefficient times ball measure over all levels."""
        return float(sum(a * ball_volume(self.dim, r) for a, r in self.levels))


def layer_cake(profile_exponent: float, dim: int, truncation_radius: float,
               depth: int) -> LayerCake:
    """Dyadic layer-cake approximation of ``r -> r^(profile_exponent - dim)``.

    Level j (j = 1..depth) attaches to the ball of radius
    ``R * 2^(1-j)`` the increment of the profile between successive
    half-radii, so on each dyadic annulus the step equals the profile at
    the annulus' inner edge.  That makes the step an upper envelope of
    the profile, tight to within the factor ``2^(dim - profile_exponent)``
    down to radius ``R * 2^-depth``, and makes the total level mass
    comparable to the integral of the profile over the ball of radius R.
    """
    if not 0.0 < profile_exponent < dim:
        raise ValueError(
            f"profile exponent must lie in (0, dim) = (0, {dim}), got {profile_exponent}")
    if not (truncation_radius > 0 and math.isfinite(truncation_radius)):
        raise ValueError(f"truncation radius must be positive, got {truncation_radius}")
    if not (isinstance(depth, int) and depth >= 1):
        raise ValueError(f"depth must be a positive integer, got {depth}")
    radii = truncation_radius * 2.0 ** (-np.arange(depth, dtype=np.float64))
    eval_radii = radii / 2.0
    prof = eval_radii ** (profile_exponent - dim)
    coeffs = np.empty(depth)
    coeffs[0] = prof[0]
    coeffs[1:] = prof[1:] - prof[:-1]
    levels = tuple((float(a), float(r)) for a, r in zip(coeffs, radii))
    return LayerCake(levels=levels, truncation_radius=truncation_radius,
                     dim=dim, exponent=profile_exponent)
