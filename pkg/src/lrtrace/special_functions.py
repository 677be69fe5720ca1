"""Classical and quantum dilogarithms and the Lobachevsky function.

Conventions
-----------
``dilog`` is the principal branch of li2(z) = -int_0^z log(1-t)/t dt, cut
along [1, inf).  ``small_qdl`` is Faddeev's deformation

    li2^h(z) = 2 pi i h * int_Omega exp((2z - pi) t) / (4 t sinh(pi t) sinh(pi h t)) dt,

defined on the strip -pi h/2 < Re z < pi + pi h/2, where Omega is the real line
with a small upper half-circle around 0.  ``big_qdl`` is exp(li2^h / (2 pi i h))
continued meromorphically by the two shift equations

    Li(z + pi h) = Li(z) / (1 - exp(2iz + i pi h)),
    Li(z + pi)   = Li(z) / (1 + exp(2iz / h)).
"""

from __future__ import annotations

import cmath
import math

import numpy as np
from scipy.special import zeta

from .errors import BranchCutError, MagnitudeOverflowError, PoleError, StripError
from .quadrature import integrate

PI = math.pi
PI2_6 = PI * PI / 6.0

# zeta(2k) / (2 pi)^(2k) for k = 1..40; drives both the Clausen and the
# Bernoulli dilogarithm series.
_K = np.arange(1, 41)
_ZETA_SCALED = zeta(2.0 * _K) / (2.0 * PI) ** (2 * _K)
_CLAUSEN_COEF = _ZETA_SCALED / (_K * (2 * _K + 1))
_BERNOULLI_COEF = 2.0 * (-1.0) ** (_K + 1) * _ZETA_SCALED / (2 * _K + 1)


def _clausen2(x: float) -> float:
    """Cl2(x) = sum sin(kx)/k^2 for x already reduced to [-pi, pi]."""
    if x == 0.0:
        return 0.0
    x2 = x * x
    # Horner on the even powers: sum_k c_k x^(2k)
    s = 0.0
    for c in _CLAUSEN_COEF[::-1]:
        s = s * x2 + c
    s *= x2
    return x - x * math.log(abs(x)) + x * s


def lobachevsky(theta: float) -> float:
    """Lobachevsky function  -int_0^theta log|2 sin t| dt.

    Odd and pi-periodic.  Computed as Cl2(2 theta)/2 after reducing 2 theta
    into [-pi, pi], using the zeta-accelerated Clausen series, which is
    accurate to a few ulps across the whole period.
    """
    theta = float(theta)
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    x = math.remainder(2.0 * theta, 2.0 * PI)
    return 0.5 * _clausen2(x)


def _dilog_bernoulli(z: complex) -> complex:
    # li2(z) = sum_n B_n u^(n+1)/(n+1)!  with u = -log(1-z); needs |u| < 2 pi.
    u = -cmath.log(1.0 - z)
    u2 = u * u
    s = 0j
    for c in _BERNOULLI_COEF[::-1]:
        s = s * u2 + c
    return u - 0.25 * u2 + u * u2 * s


def dilog(z: complex) -> complex:
    """Principal dilogarithm li2(z).

    Raises
    ------
    BranchCutError
        For real z > 1, where the principal branch is discontinuous.
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("z must be finite")
    if z.imag == 0.0:
        if z.real > 1.0:
            raise BranchCutError(f"dilog: z = {z.real!r} lies on the cut [1, inf)")
        if z.real == 1.0:
            return complex(PI2_6)
    if z == 0:
        return 0j
    if abs(z) > 1.0:
        # inversion; -z is off the negative axis because z is off the cut
        lg = cmath.log(-z)
        return -dilog(1.0 / z) - PI2_6 - 0.5 * lg * lg
    if z.real > 0.5:
        # reflection; |1 - z| < 1 and Re(1 - z) < 1/2 here
        return PI2_6 - cmath.log(z) * cmath.log(1.0 - z) - _dilog_bernoulli(1.0 - z)
    return _dilog_bernoulli(z)


def _check_hbar(hbar: float) -> float:
    hbar = float(hbar)
    if not (hbar > 0.0 and math.isfinite(hbar)):
        raise ValueError(f"hbar must be positive and finite, got {hbar!r}")
    return hbar


def _ray_breakpoints(r: float, rate: float, tol: float, hbar: float) -> list[float]:
    # |integrand| <~ exp(-rate t) / (2 pi hbar t^2) on the ray; pick T so the
    # tail beyond it is below tol, then split geometrically.
    slack = math.log(1.0 / tol) + max(0.0, -math.log(2 * PI * hbar)) + max(0.0, -math.log(rate))
    T = max(2.0, r * 4, (slack + 5.0) / rate)
    pts = [r]
    x = 1.0 if r < 1.0 else 2.0 * r
    while x < T:
        pts.append(x)
        x *= 2.0
    pts.append(T)
    return pts


def small_qdl(z: complex, hbar: float, *, tol: float = 1e-12, max_panels: int = 4000) -> complex:
    """Small continuous quantum dilogarithm li2^h(z) by contour quadrature.

    Parameters
    ----------
    z : complex
        Must satisfy -pi h/2 < Re z < pi + pi h/2.
    hbar : float
        Deformation parameter h > 0.
    tol : float
        Absolute tolerance on the returned value.

    Notes
    -----
    The contour is the real line indented by the upper half-circle of radius
    min(1, 1/h)/2, which avoids the imaginary-axis poles of both sinh factors.
    On the rays the integrand is rewritten with ``expm1`` so that it decays
    without overflow; each ray is truncated where the exponential tail bound
    falls below the tolerance.
    """
    z = complex(z)
    hbar = _check_hbar(hbar)
    lo, hi = -PI * hbar / 2, PI + PI * hbar / 2
    if not lo < z.real < hi:
        raise StripError(f"Re z = {z.real!r} outside ({lo!r}, {hi!r})")

    r = 0.5 * min(1.0, 1.0 / hbar)
    w = 2.0 * z - PI

    def ray(t: np.ndarray) -> np.ndarray:
        a = np.abs(t)
        den = t * -np.expm1(-2 * PI * a) * -np.expm1(-2 * PI * hbar * a)
        return np.exp(w * t - PI * (1.0 + hbar) * a) / den

    def arc(phi: np.ndarray) -> np.ndarray:
        t = r * np.exp(1j * phi)
        # dt = i t dphi; the 1/t cancels, leaving i/4
        return 0.25j * np.exp(w * t) / (np.sinh(PI * t) * np.sinh(PI * hbar * t))

    piece_tol = tol / (2 * PI * hbar) / 3.0
    rate_right = 2 * PI + PI * hbar - 2 * z.real
    rate_left = 2 * z.real + PI * hbar
    right = _ray_breakpoints(r, rate_right, piece_tol, hbar)
    left = [-x for x in reversed(_ray_breakpoints(r, rate_left, piece_tol, hbar))]

    i_left, _ = integrate(ray, left, epsabs=piece_tol, max_panels=max_panels)
    i_right, _ = integrate(ray, right, epsabs=piece_tol, max_panels=max_panels)
    i_arc, _ = integrate(arc, [0.0, PI / 2, PI], epsabs=piece_tol, max_panels=max_panels)
    # the half-circle runs from -r to r, i.e. phi from pi down to 0
    return 2j * PI * hbar * (i_left + i_right - i_arc)


def _log1p_exp(w: complex) -> complex:
    """log(1 + e^w) on some branch, without overflow; -inf at an exact zero."""
    if w.real > 30.0:
        return w + cmath.log(1.0 + cmath.exp(-w))
    v = 1.0 + cmath.exp(w)
    if v == 0:
        return complex(-math.inf, 0.0)
    return cmath.log(v)


def _log1m_exp(w: complex) -> complex:
    """log(1 - e^w) with expm1 accuracy near w = 0."""
    if w.real > 30.0:
        return w + cmath.log(cmath.exp(-w) - 1.0)
    v = -_cexpm1(w)
    if v == 0:
        return complex(-math.inf, 0.0)
    return cmath.log(v)


def _cexpm1(w: complex) -> complex:
    # expm1 for complex w: e^x e^{iy} - 1 = expm1(x) cos y + (cos y - 1) + i e^x sin y
    x, y = w.real, w.imag
    em = math.expm1(x)
    cosm1 = -2.0 * math.sin(0.5 * y) ** 2
    return complex(em * math.cos(y) + cosm1, math.exp(x) * math.sin(y))


def nearest_pole_distance(z: complex, hbar: float) -> float:
    """Distance from z to the pole set {pi + pi h/2 + a pi + b pi h : a, b >= 0}."""
    z = complex(z)
    hbar = _check_hbar(hbar)
    base = PI + PI * hbar / 2
    best = abs(z - base)
    top = max(0, int(math.floor((z.real - base) / PI)) + 1)
    for a in range(top + 1):
        b = round((z.real - base - a * PI) / (PI * hbar))
        b = max(0, b)
        best = min(best, abs(z - (base + a * PI + b * PI * hbar)))
    return best


def log_big_qdl(
    z: complex,
    hbar: float,
    *,
    tol: float = 1e-12,
    pole_guard: float = 1e-9,
    margin: float = 0.25,
    max_hbar_steps: int = 256,
) -> complex:
    """A logarithm of the big quantum dilogarithm Li2^h(z).

    The imaginary part is only meaningful modulo 2 pi.  Returns a complex with
    real part ``-inf`` at a zero.  Raises :class:`PoleError` within
    ``pole_guard`` of a pole.
    """
    z = complex(z)
    hbar = _check_hbar(hbar)
    if nearest_pole_distance(z, hbar) < pole_guard:
        raise PoleError(f"z = {z!r} is within {pole_guard:g} of a pole (h = {hbar!r})")

    acc = 0j
    # whole pi-steps into 0 <= Re z <= pi
    while z.real < 0.0:
        acc += _log1p_exp(2j * z / hbar)
        z += PI
    while z.real > PI:
        z -= PI
        acc -= _log1p_exp(2j * z / hbar)

    # h-steps away from the strip edges, where the rays decay slowly
    step = PI * hbar
    if step < margin:
        k = 0
        while z.real < margin and k < max_hbar_steps:
            acc += _log1m_exp(2j * z + 1j * step)
            z += step
            k += 1
        while z.real > PI - margin and k < max_hbar_steps:
            z -= step
            acc -= _log1m_exp(2j * z + 1j * step)
            k += 1

    if acc.real == -math.inf:
        return complex(-math.inf, 0.0)
    return small_qdl(z, hbar, tol=tol) / (2j * PI * hbar) + acc


def big_qdl(z: complex, hbar: float, *, tol: float = 1e-12, pole_guard: float = 1e-9) -> complex:
    """Big quantum dilogarithm Li2^h(z) = exp(li2^h(z) / (2 pi i h)), extended.

    Raises
    ------
    PoleError
        Within ``pole_guard`` of a pole pi + pi h/2 + a pi + b pi h.
    MagnitudeOverflowError
        If the value exceeds double range; use :func:`log_big_qdl`.
    """
    lg = log_big_qdl(z, hbar, tol=tol, pole_guard=pole_guard)
    if lg.real == -math.inf:
        return 0j
    if lg.real > 709.0:
        raise MagnitudeOverflowError("big_qdl exceeds double range; use log_big_qdl")
    return cmath.exp(lg)


__all__ = [
    "lobachevsky",
    "dilog",
    "small_qdl",
    "big_qdl",
    "log_big_qdl",
    "nearest_pole_distance",
]
