"""Kellogg-type checkerboard interface benchmark on [-1, 1]^2.

The exact pressure is ``p = r**gamma * eta(theta)`` with a piecewise-cosine
angular profile; permeability is ``R`` in quadrants 1 and 3 and ``1`` in
quadrants 2 and 4. Each branch of ``eta`` satisfies ``eta'' = -gamma**2 eta``,
so ``p`` is harmonic inside every quadrant and the source term vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi


class DomainError(ValueError):
    """Argument outside the domain where a formula is defined."""


@dataclass(frozen=True)
class QuadrantPermeability:
    k1: float
    k2: float
    k3: float
    k4: float

    def __post_init__(self):
        if min(self.k1, self.k2, self.k3, self.k4) <= 0:
            raise DomainError("permeabilities must be positive")

    def of_quadrant(self, q: int) -> float:
        return (self.k1, self.k2, self.k3, self.k4)[q - 1]


@dataclass(frozen=True)
class ProblemSpec:
    """Parameters of the singular solution.

    ``rho`` and ``sigma`` are the angle parameters of the cosine profile and
    ``R`` the permeability of quadrants 1 and 3. Values are stored as
    given; nothing is re-derived from ``gamma``.
    """

    gamma: float = 0.1
    R: float = 161.4476
    rho: float = 0.7854
    sigma: float = -14.9225
    domain: tuple[float, float, float, float] = (-1.0, 1.0, -1.0, 1.0)

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise DomainError(f"gamma must lie in (0, 1), got {self.gamma}")
        if self.R <= 0.0:
            raise DomainError(f"R must be positive, got {self.R}")

    @property
    def quadrant_permeability(self) -> QuadrantPermeability:
        return QuadrantPermeability(self.R, 1.0, self.R, 1.0)

    def exact_pressure(self, x, y):
        return exact_pressure(x, y, self)

    def permeability(self, x, y):
        return permeability(x, y, self)

    def source(self, x, y):
        return source(x, y, self)


KELLOGG_GAMMA_01 = ProblemSpec()


def _branch(theta: float) -> int:
    if theta <= HALF_PI:
        return 0
    if theta <= math.pi:
        return 1
    if theta <= 1.5 * math.pi:
        return 2
    return 3


def _branch_terms(branch: int, spec: ProblemSpec) -> tuple[float, float]:
    """(amplitude, phase shift) so that eta = amp * cos(gamma * (theta - shift))."""
    g, rho, sigma = spec.gamma, spec.rho, spec.sigma
    if branch == 0:
        return math.cos((HALF_PI - sigma) * g), HALF_PI - rho
    if branch == 1:
        return math.cos(rho * g), math.pi - sigma
    if branch == 2:
        return math.cos(sigma * g), math.pi + rho
    return math.cos((HALF_PI - rho) * g), 1.5 * math.pi + sigma


def _check_theta(theta: float) -> None:
    if not 0.0 <= theta <= TWO_PI:
        raise DomainError(f"theta={theta} outside [0, 2*pi]; normalize first")


def eta_branch(theta: float, branch: int, spec: ProblemSpec) -> float:
    """Evaluate one branch formula (0-based) at any angle, no interval check."""
    amp, shift = _branch_terms(branch, spec)
    return amp * math.cos(spec.gamma * (theta - shift))


def eta_prime_branch(theta: float, branch: int, spec: ProblemSpec) -> float:
    amp, shift = _branch_terms(branch, spec)
    return -spec.gamma * amp * math.sin(spec.gamma * (theta - shift))


def eta_second_branch(theta: float, branch: int, spec: ProblemSpec) -> float:
    amp, shift = _branch_terms(branch, spec)
    return -spec.gamma**2 * amp * math.cos(spec.gamma * (theta - shift))


def eta(theta: float, spec: ProblemSpec = KELLOGG_GAMMA_01) -> float:
    _check_theta(theta)
    return eta_branch(theta, _branch(theta), spec)


def eta_prime(theta: float, spec: ProblemSpec = KELLOGG_GAMMA_01, side: str = "auto") -> float:
    """Angular derivative of ``eta``.

    At a branch endpoint pass ``side="left"`` or ``side="right"`` for the
    one-sided derivative; ``"auto"`` uses the branch owning ``theta``.
    """
    _check_theta(theta)
    b = _branch(theta)
    if side == "right" and theta == _UPPER[b]:
        if b == 3:
            return eta_prime_branch(0.0, 0, spec)
        b += 1
    elif side == "left" and theta == 0.0:
        return eta_prime_branch(TWO_PI, 3, spec)
    return eta_prime_branch(theta, b, spec)


def eta_second(theta: float, spec: ProblemSpec = KELLOGG_GAMMA_01) -> float:
    _check_theta(theta)
    return eta_second_branch(theta, _branch(theta), spec)


_UPPER = (HALF_PI, math.pi, 1.5 * math.pi, TWO_PI)


def polar_angle(x: float, y: float) -> float:
    """atan2 mapped to [0, 2*pi); axis points go to the following quadrant."""
    t = math.atan2(y, x)
    if t < 0.0:
        t += TWO_PI
    if t >= TWO_PI:
        t = 0.0
    return t


def exact_pressure(x: float, y: float, spec: ProblemSpec = KELLOGG_GAMMA_01) -> float:
    r = math.hypot(x, y)
    if r == 0.0:
        return 0.0
    t = polar_angle(x, y)
    if y == 0.0:
        b = 0 if x > 0.0 else 2
    elif x == 0.0:
        b = 1 if y > 0.0 else 3
    else:
        b = _branch(t)
    return r**spec.gamma * eta_branch(t, b, spec)


def quadrant(x: float, y: float) -> int:
    """Quadrant index 1..4 of a point strictly off the axes."""
    if x == 0.0 or y == 0.0:
        raise DomainError(f"point ({x}, {y}) lies on a coordinate axis")
    if x > 0.0:
        return 1 if y > 0.0 else 4
    return 2 if y > 0.0 else 3


def permeability(x: float, y: float, spec: ProblemSpec = KELLOGG_GAMMA_01) -> float:
    return spec.quadrant_permeability.of_quadrant(quadrant(x, y))


def source(x: float, y: float, spec: ProblemSpec = KELLOGG_GAMMA_01) -> float:
    return 0.0


@dataclass(frozen=True)
class AffineProblem:
    """Smooth test problem: constant permeability and affine exact pressure."""

    a: float = 0.0
    b: float = 1.0
    c: float = 0.0
    k: float = 1.0

    def exact_pressure(self, x, y):
        return self.a + self.b * x + self.c * y

    def permeability(self, x, y):
        return self.k

    def source(self, x, y):
        return 0.0
