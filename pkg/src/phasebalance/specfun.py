"""
Elliptic integrals of the second kind via Carlson symmetric forms.

E(u | m) = int_0^u sqrt(1 - m sin^2 t) dt for any real amplitude u and any
parameter m <= 1 (negative m included). The principal branch is evaluated as

    E(u | m) = s R_F(c^2, 1 - m s^2, 1) - (m/3) s^3 R_D(c^2, 1 - m s^2, 1)

with s = sin u, c = cos u, and extended to all u with oddness and
E(u + k pi | m) = E(u | m) + 2k E(pi/2 | m).

Scalars go through a pure-``math`` path (the simulator calls these per agent,
per integrator stage); arrays go through a broadcasting numpy path.

References
----------
B. C. Carlson, "Numerical computation of real or complex elliptic integrals",
Numerical Algorithms 10 (1995) 13-26.
"""

import math

import numpy as np

__all__ = [
    "DomainError",
    "QuadratureError",
    "carlson_rf",
    "carlson_rd",
    "ellint_e_incomplete",
    "ellint_e_complete",
    "oracle_e",
    "oracle_e_cumulative",
]

RTOL = 1e-12
_MAX_ITER = 60


class DomainError(ValueError):
    """Argument outside the domain of an elliptic integral."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


def _is_scalar(*args):
    return all(np.ndim(a) == 0 for a in args)


# ---------------------------------------------------------------------------
# R_F and R_D, scalar path
# ---------------------------------------------------------------------------

def _check_rf_scalar(x, y, z):
    for v in (x, y, z):
        if not math.isfinite(v) or v < 0.0:
            raise DomainError(f"R_F arguments must be finite and >= 0, got {(x, y, z)}")
    if (x == 0.0) + (y == 0.0) + (z == 0.0) > 1:
        raise DomainError(f"R_F allows at most one zero argument, got {(x, y, z)}")


def _check_rd_scalar(x, y, z):
    for v in (x, y, z):
        if not math.isfinite(v) or v < 0.0:
            raise DomainError(f"R_D arguments must be finite and >= 0, got {(x, y, z)}")
    if z == 0.0:
        raise DomainError("R_D requires z > 0")
    if x == 0.0 and y == 0.0:
        raise DomainError("R_D allows at most one of x, y to be zero")


def _rf_scalar(x, y, z, rtol):
    a0 = (x + y + z) / 3.0
    q = (3.0 * rtol) ** (-1.0 / 6.0) * max(abs(a0 - x), abs(a0 - y), abs(a0 - z))
    a = a0
    scale = 1.0
    for _ in range(_MAX_ITER):
        if scale * q <= abs(a):
            break
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        x = 0.25 * (x + lam)
        y = 0.25 * (y + lam)
        z = 0.25 * (z + lam)
        a = 0.25 * (a + lam)
        scale *= 0.25
    xx = 1.0 - x / a
    yy = 1.0 - y / a
    zz = -(xx + yy)
    e2 = xx * yy - zz * zz
    e3 = xx * yy * zz
    return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / math.sqrt(a)


def _rd_series(xx, yy, zz):
    xy = xx * yy
    z2 = zz * zz
    e2 = xy - 6.0 * z2
    e3 = (3.0 * xy - 8.0 * z2) * zz
    e4 = 3.0 * (xy - z2) * z2
    e5 = xy * z2 * zz
    return (1.0 - 3.0 * e2 / 14.0 + e3 / 6.0 + 9.0 * e2 * e2 / 88.0
            - 3.0 * e4 / 22.0 - 9.0 * e2 * e3 / 52.0 + 3.0 * e5 / 26.0)


def _rd_scalar(x, y, z, rtol):
    a0 = (x + y + 3.0 * z) / 5.0
    q = (0.25 * rtol) ** (-1.0 / 6.0) * max(abs(a0 - x), abs(a0 - y), abs(a0 - z))
    a = a0
    scale = 1.0
    acc = 0.0
    for _ in range(_MAX_ITER):
        if scale * q <= abs(a):
            break
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        acc += scale / (sz * (z + lam))
        x = 0.25 * (x + lam)
        y = 0.25 * (y + lam)
        z = 0.25 * (z + lam)
        a = 0.25 * (a + lam)
        scale *= 0.25
    xx = 1.0 - x / a
    yy = 1.0 - y / a
    zz = -(xx + yy) / 3.0
    return scale * a ** -1.5 * _rd_series(xx, yy, zz) + 3.0 * acc


def _rf_rd_scalar(x, y, z, rtol):
    """R_F(x, y, z) and R_D(x, y, z) from one shared duplication sequence."""
    af0 = (x + y + z) / 3.0
    ad0 = (x + y + 3.0 * z) / 5.0
    spread = max(abs(ad0 - x), abs(ad0 - y), abs(ad0 - z), abs(af0 - x), abs(af0 - y), abs(af0 - z))
    qf = (3.0 * rtol) ** (-1.0 / 6.0) * spread
    qd = (0.25 * rtol) ** (-1.0 / 6.0) * spread
    af, ad = af0, ad0
    scale = 1.0
    acc = 0.0
    for _ in range(_MAX_ITER):
        if scale * qf <= abs(af) and scale * qd <= abs(ad):
            break
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        acc += scale / (sz * (z + lam))
        x = 0.25 * (x + lam)
        y = 0.25 * (y + lam)
        z = 0.25 * (z + lam)
        af = 0.25 * (af + lam)
        ad = 0.25 * (ad + lam)
        scale *= 0.25
    xx = 1.0 - x / af
    yy = 1.0 - y / af
    zz = -(xx + yy)
    e2 = xx * yy - zz * zz
    e3 = xx * yy * zz
    rf = (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / math.sqrt(af)
    xx = 1.0 - x / ad
    yy = 1.0 - y / ad
    zz = -(xx + yy) / 3.0
    rd = scale * ad ** -1.5 * _rd_series(xx, yy, zz) + 3.0 * acc
    return rf, rd


# ---------------------------------------------------------------------------
# R_F and R_D, array path
# ---------------------------------------------------------------------------

def _check_nonneg_finite(name, *arrs):
    for v in arrs:
        if not np.all(np.isfinite(v)) or np.any(v < 0.0):
            raise DomainError(f"{name} arguments must be finite and >= 0")


def _rf_array(x, y, z, rtol):
    x, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z)))
    _check_nonneg_finite("R_F", x, y, z)
    if np.any((x == 0) * 1 + (y == 0) + (z == 0) > 1):
        raise DomainError("R_F allows at most one zero argument")
    x, y, z = x.copy(), y.copy(), z.copy()
    a0 = (x + y + z) / 3.0
    q = (3.0 * rtol) ** (-1.0 / 6.0) * np.maximum.reduce([abs(a0 - x), abs(a0 - y), abs(a0 - z)])
    a = a0.copy()
    scale = 1.0
    for _ in range(_MAX_ITER):
        if np.all(scale * q <= np.abs(a)):
            break
        sx, sy, sz = np.sqrt(x), np.sqrt(y), np.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        x = 0.25 * (x + lam)
        y = 0.25 * (y + lam)
        z = 0.25 * (z + lam)
        a = 0.25 * (a + lam)
        scale *= 0.25
    xx = 1.0 - x / a
    yy = 1.0 - y / a
    zz = -(xx + yy)
    e2 = xx * yy - zz * zz
    e3 = xx * yy * zz
    return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / np.sqrt(a)


def _rd_array(x, y, z, rtol):
    x, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z)))
    _check_nonneg_finite("R_D", x, y, z)
    if np.any(z == 0.0):
        raise DomainError("R_D requires z > 0")
    if np.any((x == 0.0) & (y == 0.0)):
        raise DomainError("R_D allows at most one of x, y to be zero")
    x, y, z = x.copy(), y.copy(), z.copy()
    a0 = (x + y + 3.0 * z) / 5.0
    q = (0.25 * rtol) ** (-1.0 / 6.0) * np.maximum.reduce([abs(a0 - x), abs(a0 - y), abs(a0 - z)])
    a = a0.copy()
    scale = 1.0
    acc = np.zeros_like(a)
    for _ in range(_MAX_ITER):
        if np.all(scale * q <= np.abs(a)):
            break
        sx, sy, sz = np.sqrt(x), np.sqrt(y), np.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        acc += scale / (sz * (z + lam))
        x = 0.25 * (x + lam)
        y = 0.25 * (y + lam)
        z = 0.25 * (z + lam)
        a = 0.25 * (a + lam)
        scale *= 0.25
    xx = 1.0 - x / a
    yy = 1.0 - y / a
    zz = -(xx + yy) / 3.0
    return scale * a ** -1.5 * _rd_series(xx, yy, zz) + 3.0 * acc


def carlson_rf(x, y, z, rtol=RTOL):
    """Carlson's symmetric integral of the first kind.

    R_F(x, y, z) = 1/2 int_0^inf [(t + x)(t + y)(t + z)]^(-1/2) dt

    Parameters
    ----------
    x, y, z : float or array_like
        Non-negative, finite; at most one of them zero.
    rtol : float
        Relative truncation error bound of the duplication iteration.

    Raises
    ------
    DomainError
        On negative, non-finite, or more than one zero argument.
    """
    if _is_scalar(x, y, z):
        x, y, z = float(x), float(y), float(z)
        _check_rf_scalar(x, y, z)
        return _rf_scalar(x, y, z, rtol)
    return _rf_array(x, y, z, rtol)


def carlson_rd(x, y, z, rtol=RTOL):
    """Carlson's symmetric integral of the second kind.

    R_D(x, y, z) = 3/2 int_0^inf (t + x)^(-1/2) (t + y)^(-1/2) (t + z)^(-3/2) dt

    Requires x, y >= 0 (not both zero) and z > 0.
    """
    if _is_scalar(x, y, z):
        x, y, z = float(x), float(y), float(z)
        _check_rd_scalar(x, y, z)
        return _rd_scalar(x, y, z, rtol)
    return _rd_array(x, y, z, rtol)


# ---------------------------------------------------------------------------
# Legendre form
# ---------------------------------------------------------------------------

def _check_m_scalar(m):
    if not math.isfinite(m) or m > 1.0:
        raise DomainError(f"parameter m must be finite and <= 1, got {m}")


def _complete_scalar(m):
    if m == 0.0:
        return 0.5 * math.pi
    if m == 1.0:
        return 1.0
    rf, rd = _rf_rd_scalar(0.0, 1.0 - m, 1.0, RTOL)
    return rf - m / 3.0 * rd


def _principal_scalar(r, m):
    # |r| <= pi/2
    if m == 1.0:
        return math.sin(r)
    s = math.sin(r)
    c = math.cos(r)
    if s == 0.0:
        return 0.0
    rf, rd = _rf_rd_scalar(c * c, 1.0 - m * s * s, 1.0, RTOL)
    return s * rf - m / 3.0 * s * s * s * rd


def _incomplete_scalar(u, m, ec=None):
    if m == 0.0:
        return u
    v = abs(u)
    k = math.floor(v / math.pi + 0.5)
    r = v - k * math.pi
    val = _principal_scalar(r, m)
    if k:
        if ec is None:
            ec = _complete_scalar(m)
        val += 2.0 * k * ec
    return -val if u < 0.0 else val


def ellint_e_complete(m):
    """Complete elliptic integral of the second kind, E(pi/2 | m), for m <= 1.

    >>> ellint_e_complete(0.0) == math.pi / 2
    True
    """
    if np.ndim(m) == 0:
        m = float(m)
        _check_m_scalar(m)
        return _complete_scalar(m)
    m = np.asarray(m, dtype=float)
    if not np.all(np.isfinite(m)) or np.any(m > 1.0):
        raise DomainError("parameter m must be finite and <= 1")
    out = np.empty_like(m)
    one = m == 1.0
    out[one] = 1.0
    mm = m[~one]
    out[~one] = _rf_array(0.0, 1.0 - mm, 1.0, RTOL) - mm / 3.0 * _rd_array(0.0, 1.0 - mm, 1.0, RTOL)
    return out


def ellint_e_incomplete(u, m):
    """Incomplete elliptic integral of the second kind E(u | m).

    Parameters
    ----------
    u : float or array_like
        Amplitude in radians; any finite real.
    m : float or array_like
        Parameter (not modulus), m <= 1. Broadcasts against ``u``.

    Returns
    -------
    float or ndarray
        int_0^u sqrt(1 - m sin^2 t) dt. Odd in ``u`` by construction.

    Raises
    ------
    DomainError
        If m > 1 or any argument is non-finite.
    """
    if _is_scalar(u, m):
        u, m = float(u), float(m)
        if not math.isfinite(u):
            raise DomainError(f"amplitude must be finite, got {u}")
        _check_m_scalar(m)
        return _incomplete_scalar(u, m)

    u, m = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(m, dtype=float))
    if not np.all(np.isfinite(u)):
        raise DomainError("amplitude must be finite")
    if not np.all(np.isfinite(m)) or np.any(m > 1.0):
        raise DomainError("parameter m must be finite and <= 1")

    v = np.abs(u)
    k = np.floor(v / np.pi + 0.5)
    r = v - k * np.pi
    s = np.sin(r)
    c = np.cos(r)
    val = np.empty(u.shape)

    one = m == 1.0
    val[one] = s[one]
    rest = ~one
    if np.any(rest):
        sr, cr, mr = s[rest], c[rest], m[rest]
        x = cr * cr
        y = 1.0 - mr * sr * sr
        rf = _rf_array(x, y, 1.0, RTOL)
        rd = _rd_array(x, y, 1.0, RTOL)
        val[rest] = sr * rf - mr / 3.0 * sr ** 3 * rd
    val = np.where(s == 0.0, 0.0, val)

    wrapped = k != 0
    if np.any(wrapped):
        val[wrapped] += 2.0 * k[wrapped] * ellint_e_complete(m[wrapped])
    val = np.where(m == 0.0, v, val)
    return np.copysign(val, u) if val.ndim else float(np.copysign(val, u))


# ---------------------------------------------------------------------------
# Quadrature oracle (independent of the Carlson path)
# ---------------------------------------------------------------------------

def _simpson_adaptive(f, a, b, tol, max_depth=50, max_evals=2_000_000):
    """Adaptive Simpson with Richardson correction, explicit stack."""
    if a == b:
        return 0.0
    fa, fb = f(a), f(b)
    c = 0.5 * (a + b)
    fc = f(c)
    whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb)
    total = 0.0
    evals = 3
    stack = [(a, b, fa, fc, fb, whole, tol, 0)]
    while stack:
        a, b, fa, fc, fb, whole, eps, depth = stack.pop()
        c = 0.5 * (a + b)
        d = 0.5 * (a + c)
        e = 0.5 * (c + b)
        fd, fe = f(d), f(e)
        evals += 2
        left = (c - a) / 6.0 * (fa + 4.0 * fd + fc)
        right = (b - c) / 6.0 * (fc + 4.0 * fe + fb)
        delta = left + right - whole
        if abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
            continue
        if depth >= max_depth or evals > max_evals:
            raise QuadratureError(
                f"adaptive Simpson did not converge on [{a}, {b}] (depth {depth}, {evals} evaluations)"
            )
        stack.append((a, c, fa, fd, fc, left, 0.5 * eps, depth + 1))
        stack.append((c, b, fc, fe, fb, right, 0.5 * eps, depth + 1))
    return total


def _integrand(m):
    return lambda t: math.sqrt(1.0 - m * math.sin(t) ** 2)


def _check_oracle_args(u, m):
    if not math.isfinite(u):
        raise DomainError(f"amplitude must be finite, got {u}")
    _check_m_scalar(m)


def oracle_e(u, m, tol=1e-12):
    """E(u | m) by adaptive Simpson quadrature of the defining integral.

    Integrates directly over [0, u] with no amplitude reduction. Slow; meant
    for tests and benchmarks only.

    Raises
    ------
    QuadratureError
        If the quadrature fails to converge.
    """
    u, m = float(u), float(m)
    _check_oracle_args(u, m)
    return _simpson_adaptive(_integrand(m), 0.0, u, tol)


def oracle_e_cumulative(us, m, tol=1e-12):
    """Quadrature oracle for many amplitudes at one parameter.

    Sorts the amplitudes, integrates each gap between neighbours (and from 0)
    with adaptive Simpson, and accumulates. Much cheaper than calling
    :func:`oracle_e` per point on a dense grid.
    """
    us = np.asarray(us, dtype=float)
    m = float(m)
    flat = us.ravel()
    for u in flat:
        _check_oracle_args(u, m)
    f = _integrand(m)
    out = np.empty_like(flat)
    for sign in (1.0, -1.0):
        idx = np.nonzero(flat * sign >= 0.0)[0] if sign > 0 else np.nonzero(flat < 0.0)[0]
        if idx.size == 0:
            continue
        order = idx[np.argsort(np.abs(flat[idx]))]
        acc = 0.0
        prev = 0.0
        for i in order:
            cur = abs(flat[i])
            acc += _simpson_adaptive(f, prev, cur, tol)
            prev = cur
            out[i] = sign * acc
    return out.reshape(us.shape)
