"""
Tabulated arc length for fast repeated evaluation.

Direct evaluation of arc length needs an incomplete elliptic integral per
call. The interpolant here tabulates f(t) = b E(t | 1 - (a/b)^2), the arc
length from the vertex (a, 0), on a uniform grid over one period and joins
the nodes with quintic Hermite pieces built from the exact first and second
derivatives (the parametric speed and its derivative). Outside [0, 2 pi) it
extends by f(t + 2 pi) = f(t) + perimeter.
"""

import math
from dataclasses import dataclass

import numpy as np

from .specfun import ellint_e_complete, ellint_e_incomplete

__all__ = ["CertificationError", "SigmaInterpolant", "build_sigma_interpolant", "MAX_ABS_ERROR"]

TWO_PI = 2.0 * math.pi
MAX_ABS_ERROR = 1e-9


class CertificationError(RuntimeError):
    """The interpolant misses its error bound against direct evaluation."""


@dataclass(frozen=True, eq=False)
class SigmaInterpolant:
    """Certified piecewise-quintic arc length over one parameter period.

    Attributes
    ----------
    grid : ndarray
        Uniform nodes on [0, 2 pi], ``grid_size + 1`` of them.
    sigma : ndarray
        Arc length from (a, 0) at each node, strictly increasing.
    coeffs : ndarray, shape (grid_size, 6)
        Per-interval polynomial coefficients in the local variable s in [0, 1].
    degree : int
    max_abs_error : float
        Largest deviation from direct evaluation seen on the certification sweep.
    period_length : float
        Exact perimeter; the jump of f over one period.
    """

    grid: np.ndarray
    sigma: np.ndarray
    coeffs: np.ndarray
    degree: int
    max_abs_error: float
    period_length: float
    a: float
    b: float

    def __post_init__(self):
        for arr in (self.grid, self.sigma, self.coeffs):
            arr.setflags(write=False)
        # plain-float copies for the scalar path
        object.__setattr__(self, "_rows", [tuple(row) for row in self.coeffs.tolist()])
        object.__setattr__(self, "_n", self.coeffs.shape[0])
        object.__setattr__(self, "_h", TWO_PI / self.coeffs.shape[0])

    def __call__(self, t):
        if type(t) is float:
            return self._eval_scalar(t)
        if np.ndim(t) == 0:
            return self._eval_scalar(float(t))
        return self.evaluate(t)

    def _eval_scalar(self, t):
        laps = math.floor(t / TWO_PI)
        x = (t - laps * TWO_PI) / self._h
        i = int(x)
        if i >= self._n:
            i = self._n - 1
        s = x - i
        c0, c1, c2, c3, c4, c5 = self._rows[i]
        return c0 + s * (c1 + s * (c2 + s * (c3 + s * (c4 + s * c5)))) + laps * self.period_length

    def evaluate(self, t):
        """Vectorised evaluation over an array of parameters."""
        t = np.asarray(t, dtype=float)
        laps = np.floor(t / TWO_PI)
        x = (t - laps * TWO_PI) / self._h
        i = np.minimum(x.astype(np.intp), self._n - 1)
        s = x - i
        c = self.coeffs[i]
        val = c[..., 5]
        for j in range(4, -1, -1):
            val = val * s + c[..., j]
        return val + laps * self.period_length


def _direct(a, b, t):
    return b * ellint_e_incomplete(t, 1.0 - (a / b) ** 2)


def _quintic_coeffs(f, d, dd, h):
    f0, f1 = f[:-1], f[1:]
    d0, d1 = h * d[:-1], h * d[1:]
    dd0, dd1 = h * h * dd[:-1], h * h * dd[1:]
    c0, c1, c2 = f0, d0, 0.5 * dd0
    p = f1 - (c0 + c1 + c2)
    q = d1 - (c1 + 2.0 * c2)
    w = dd1 - 2.0 * c2
    c3 = 10.0 * p - 4.0 * q + 0.5 * w
    c4 = -15.0 * p + 7.0 * q - w
    c5 = 6.0 * p - 3.0 * q + 0.5 * w
    return np.column_stack([c0, c1, c2, c3, c4, c5])


def build_sigma_interpolant(curve, grid_size=1024, density=16, tol=MAX_ABS_ERROR):
    """Tabulate and certify arc length for ``curve``.

    Parameters
    ----------
    curve : CurveSpec
    grid_size : int
        Number of intervals over one period; at least 64.
    density : int
        Certification samples per interval (at least 10).
    tol : float
        Certification bound on the absolute error, in curve length units.

    Raises
    ------
    CertificationError
        If the dense sweep finds an error above ``tol``, or the tabulated
        values are not strictly increasing.
    """
    grid_size = int(grid_size)
    if grid_size < 64:
        raise ValueError("grid_size must be >= 64")
    if density < 10:
        raise ValueError("certification density must be >= 10 samples per interval")
    a, b = curve.a, curve.b
    h = TWO_PI / grid_size
    grid = np.linspace(0.0, TWO_PI, grid_size + 1)
    period = 4.0 * b * ellint_e_complete(1.0 - (a / b) ** 2)

    sigma = _direct(a, b, grid)
    sigma[0] = 0.0
    sigma[-1] = period
    sn, cs = np.sin(grid), np.cos(grid)
    d = np.hypot(a * sn, b * cs)
    dd = (a * a - b * b) * sn * cs / d
    coeffs = _quintic_coeffs(sigma, d, dd, h)

    if not np.all(np.diff(sigma) > 0.0):
        raise CertificationError("tabulated arc length is not strictly increasing")

    interp = SigmaInterpolant(grid, sigma, coeffs, 5, math.inf, period, a, b)
    # offsets avoid landing only on nodes, where the error is zero by construction
    probe = (np.arange(grid_size * density) + 0.5) / density * h
    err = float(np.max(np.abs(interp.evaluate(probe) - _direct(a, b, probe))))
    if not err <= tol:
        raise CertificationError(
            f"interpolant error {err:.3e} exceeds {tol:.1e} (grid_size={grid_size}); use a finer grid"
        )
    object.__setattr__(interp, "max_abs_error", err)
    return interp
