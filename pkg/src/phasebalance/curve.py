"""
Geometry of the desired orbit as seen from an agent's heading.

Curves are origin-centred and axis-aligned: a circle of radius r, or the
ellipse (a cos t, b sin t). Every quantity the controller needs is a function
of the heading theta alone, through the projection theta -> t that picks the
curve point whose counter-clockwise tangent points along theta.
"""

import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .specfun import _incomplete_scalar, ellint_e_complete, ellint_e_incomplete

__all__ = [
    "CurveSpec",
    "CurveFrame",
    "project",
    "point_on_curve",
    "heading_point",
    "tangent_heading",
    "speed",
    "radial_distance",
    "curvature",
    "curvature_at",
    "arc_length",
    "arc_length_at",
    "perimeter",
    "curve_phase",
    "position_error",
    "offset_boundary",
    "min_curvature_radius",
    "frame",
]

TWO_PI = 2.0 * math.pi
PERIMETER_MODES = ("exact", "ramanujan")


@dataclass(frozen=True)
class CurveSpec:
    """Desired closed orbit.

    Use :meth:`circle` or :meth:`ellipse` rather than the constructor. A circle
    stores ``a == b == r`` so the ellipse formulas apply unchanged, while
    ``kind`` lets the circle take closed-form shortcuts.
    """

    kind: str
    a: float
    b: float
    perimeter_mode: str = "exact"

    def __post_init__(self):
        if self.kind not in ("circle", "ellipse"):
            raise ValueError(f"unknown curve kind {self.kind!r}")
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or self.a <= 0 or self.b <= 0:
            raise ValueError(f"curve axes must be finite and > 0, got a={self.a}, b={self.b}")
        if self.kind == "circle" and self.a != self.b:
            raise ValueError("circle requires a == b")
        if self.perimeter_mode not in PERIMETER_MODES:
            raise ValueError(f"perimeter_mode must be one of {PERIMETER_MODES}")

    @classmethod
    def circle(cls, r, perimeter_mode="exact"):
        return cls("circle", float(r), float(r), perimeter_mode)

    @classmethod
    def ellipse(cls, a, b, perimeter_mode="exact"):
        return cls("ellipse", float(a), float(b), perimeter_mode)

    @property
    def r(self):
        if self.kind != "circle":
            raise AttributeError("only circles have a radius")
        return self.a

    @property
    def m(self):
        """Elliptic parameter 1 - (a/b)^2 used for arc length."""
        return 1.0 - (self.a / self.b) ** 2

    @property
    def is_circle(self):
        return self.kind == "circle"

    @cached_property
    def complete_e(self):
        """E(pi/2 | m); a quarter of the perimeter over b."""
        return ellint_e_complete(self.m)


@dataclass(frozen=True)
class CurveFrame:
    """Everything the controller reads off the curve for one heading."""

    t_param: float
    point: tuple
    R: float
    kappa: float
    sigma: float
    psi: float


def project(curve, theta):
    """Curve parameter t in (-pi, pi] whose CCW tangent is along ``theta``.

    Picks the branch of tan t = -(b/a) cot(theta) with the tangent aligned to
    (cos theta, sin theta), not anti-aligned.
    """
    return math.atan2(-curve.b * math.cos(theta), curve.a * math.sin(theta))


def point_on_curve(curve, t):
    return (curve.a * math.cos(t), curve.b * math.sin(t))


def tangent_heading(curve, t):
    """Heading of the CCW tangent at parameter ``t``; inverse of :func:`project`."""
    return math.atan2(curve.b * math.cos(t), -curve.a * math.sin(t))


def speed(curve, t):
    """|d rho / dt| for the parametrisation (a cos t, b sin t)."""
    return math.hypot(curve.a * math.sin(t), curve.b * math.cos(t))


def radial_distance(curve, theta):
    """sqrt(a^2 sin^2 theta + b^2 cos^2 theta); reported, not used for e_k."""
    if curve.is_circle:
        return curve.a
    return math.hypot(curve.a * math.sin(theta), curve.b * math.cos(theta))


def curvature(curve, theta):
    """Curvature at the projected point, written in terms of the heading."""
    if curve.is_circle:
        return 1.0 / curve.a
    a, b = curve.a, curve.b
    q = (a * math.sin(theta)) ** 2 + (b * math.cos(theta)) ** 2
    return q * math.sqrt(q) / (a * a * b * b)


def curvature_at(curve, t):
    """Parametric curvature ab / (a^2 sin^2 t + b^2 cos^2 t)^(3/2)."""
    a, b = curve.a, curve.b
    q = (a * math.sin(t)) ** 2 + (b * math.cos(t)) ** 2
    return a * b / (q * math.sqrt(q))


def min_curvature_radius(curve):
    lo, hi = sorted((curve.a, curve.b))
    return lo * lo / hi


def arc_length_at(curve, t, interpolant=None):
    """Signed arc length from the point (0, b) to the point at parameter ``t``.

    Uses b * [E(t | 1 - (a/b)^2) - E(pi/2 | 1 - (a/b)^2)], whose t-derivative
    is exactly the parametric speed.
    """
    if curve.is_circle:
        return curve.a * (t - 0.5 * math.pi)
    if interpolant is not None:
        return interpolant(t) - 0.25 * interpolant.period_length
    ec = curve.complete_e
    if np.ndim(t) == 0:
        # m is valid by construction; skip argument checks on the hot path
        return curve.b * (_incomplete_scalar(float(t), curve.m, ec) - ec)
    return curve.b * (ellint_e_incomplete(t, curve.m) - ec)


def arc_length(curve, theta, interpolant=None):
    """Arc length at the heading-projected point (see :func:`arc_length_at`)."""
    return arc_length_at(curve, project(curve, theta), interpolant)


def perimeter(curve, mode=None):
    """Perimeter in ``mode`` (defaults to the curve's own perimeter_mode)."""
    mode = curve.perimeter_mode if mode is None else mode
    a, b = curve.a, curve.b
    if curve.is_circle:
        return TWO_PI * a
    if mode == "ramanujan":
        return math.pi * (3.0 * (a + b) - math.sqrt((3.0 * a + b) * (a + 3.0 * b)))
    if mode != "exact":
        raise ValueError(f"unknown perimeter mode {mode!r}")
    hi, lo = max(a, b), min(a, b)
    return 4.0 * hi * ellint_e_complete(1.0 - (lo / hi) ** 2)


def _phase_from_sigma(sigma, gamma):
    psi = math.fmod(TWO_PI * sigma / gamma, TWO_PI)
    if psi < 0.0:
        psi += TWO_PI
    # fmod can land on 2pi after the shift for tiny negative inputs
    return 0.0 if psi >= TWO_PI else psi


def curve_phase(curve, theta, interpolant=None, gamma=None):
    """Curve-phase (2 pi / perimeter) * sigma wrapped to [0, 2 pi)."""
    gamma = perimeter(curve) if gamma is None else gamma
    return _phase_from_sigma(arc_length(curve, theta, interpolant), gamma)


def heading_point(curve, theta):
    """Curve point whose CCW tangent is along ``theta``."""
    if curve.is_circle:
        # closed form of point_on_curve(project(theta)); avoids the atan2 round trip
        return (curve.a * math.sin(theta), -curve.a * math.cos(theta))
    return point_on_curve(curve, project(curve, theta))


def position_error(curve, state):
    """Agent position minus the heading-projected curve point."""
    x, y, theta = state[0], state[1], state[2]
    px, py = heading_point(curve, theta)
    return (x - px, y - py)


def frame(curve, theta, interpolant=None, gamma=None):
    """All heading-dependent curve quantities at once."""
    t = project(curve, theta)
    gamma = perimeter(curve) if gamma is None else gamma
    sigma = arc_length_at(curve, t, interpolant)
    return CurveFrame(
        t_param=t,
        point=point_on_curve(curve, t),
        R=radial_distance(curve, theta),
        kappa=curvature(curve, theta),
        sigma=sigma,
        psi=_phase_from_sigma(sigma, gamma),
    )


def offset_boundary(curve, delta, n):
    """Outer and inner parallel curves at normal distance ``delta``.

    Returns
    -------
    outer, inner : ndarray, shape (n, 2)
        Samples at t = 2 pi k / n along rho(t) +/- delta * n_hat(t).

    Warns
    -----
    RuntimeWarning
        If ``delta`` reaches the minimum radius of curvature, where the inner
        offset degenerates or self-intersects.
    """
    if delta <= 0:
        raise ValueError("delta must be > 0")
    if n < 16:
        raise ValueError("need at least 16 samples")
    rmin = min_curvature_radius(curve)
    if delta >= rmin:
        warnings.warn(
            f"inner offset at delta={delta} is degenerate: minimum radius of curvature is {rmin:.6g}",
            RuntimeWarning,
            stacklevel=2,
        )
    t = np.linspace(0.0, TWO_PI, n, endpoint=False)
    a, b = curve.a, curve.b
    base = np.column_stack([a * np.cos(t), b * np.sin(t)])
    normal = np.column_stack([b * np.cos(t), a * np.sin(t)])
    normal /= np.hypot(normal[:, 0], normal[:, 1])[:, None]
    return base + delta * normal, base - delta * normal
