"""Closed-form large-n predictions and reference versions of the limit statements.

Leading behaviour, for odd n and e^V = 1 + e^U:

    Sigma_n ~ c_n(U, V, k) sqrt(n) exp(n Lambda(pi/6) / (2 pi))
    |D^q(q e^(-A/n))|^(1/n) -> d_n(A)        (two limits, by n mod 4)
    |Trace| ~ |c_n(U1,V1,l)| |c_n(U2,V2,m)| / (d_n(A1) d_n(A2)) exp(n Lambda(pi/6) / pi)

and (1/n) log|Trace| -> vol / (4 pi) with vol = 6 Lambda(pi/3) the volume of
the figure-eight knot complement.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .edge_weights import LogLift
from .errors import DomainError, MagnitudeOverflowError, SingularityError
from .quadrature import integrate
from .skein_trace import QdlParams, TraceResult, check_level, dq_log_parts, sigma_sum_log
from .special_functions import PI, lobachevsky

LAMBDA_PI_6 = lobachevsky(PI / 6)
LOG2 = math.log(2.0)
# principal log of (1 - i sqrt 3)/2 = exp(-i pi/3)
_LOG_SIXTH_ROOT = -1j * PI / 3


def volume_figure_eight() -> float:
    """Hyperbolic volume 6 Lambda(pi/3) = 4 Lambda(pi/6) = 2.0298832..."""
    return 6.0 * lobachevsky(PI / 3)


def volume_rate() -> float:
    """The limit vol / (4 pi) of (1/n) log|Trace|."""
    return volume_figure_eight() / (4 * PI)


def c_n_constant(U: complex, V: complex, k_hat: int, n_mod_8: int) -> complex:
    """Leading coefficient c_n(U, V, k) of Sigma_n.

    For odd k it does not depend on n; for even k it depends on n mod 8
    and its modulus on n mod 4.
    """
    return c_n_from_branch(U, V, k_hat, n_mod_8, odd=bool(int(k_hat) % 2))


def c_n_from_branch(U: complex, V: complex, k_hat: int, n_mod_8: int, *, odd: bool) -> complex:
    """c_n evaluated with an explicitly chosen parity case."""
    U, V = complex(U), complex(V)
    if n_mod_8 not in (1, 3, 5, 7):
        raise DomainError(f"n_mod_8 must be an odd residue, got {n_mod_8!r}")
    if abs(cmath.exp(V) - (1 + cmath.exp(U))) >= 1e-8 * abs(1 + cmath.exp(U)):
        raise DomainError("exp(V) must equal 1 + exp(U)")
    k = int(k_hat)
    expo = (U - 2j * PI) / (4j * PI)
    base = 3 ** -0.25 * cmath.exp(expo * LOG2) * cmath.exp(-expo * _LOG_SIXTH_ROOT)
    if odd:
        return base * cmath.exp(-k * PI * 1j / 6) * cmath.exp(-V / 6)
    n = n_mod_8
    return (
        base
        * cmath.exp(-n * PI * 1j / 4)
        * cmath.exp(-2 * k * PI * 1j / 3)
        * cmath.exp(-2 * V / 3)
        * (1 - 1j ** n * cmath.exp(U / 2))
    )


def c_n_modulus(U: complex, V: complex, k_hat: int, n_mod_4: int) -> float:
    """|c_n| written directly in real and imaginary parts."""
    U, V = complex(U), complex(V)
    base = 3 ** -0.25 * 2 ** ((U.imag - 2 * PI) / (4 * PI)) * math.exp(U.real / 12)
    if int(k_hat) % 2:
        return base * math.exp(-V.real / 6)
    return base * math.exp(-2 * V.real / 3) * abs(1 - 1j ** n_mod_4 * cmath.exp(U / 2))


def d_n_limit(A: complex, n_mod_4: int) -> float:
    """Limit of |D^q(q e^(-A/n))|^(1/n) along n = n_mod_4 (mod 4)."""
    A = complex(A)
    if n_mod_4 not in (1, 3):
        raise DomainError(f"n_mod_4 must be 1 or 3, got {n_mod_4!r}")
    if abs(cmath.exp(A) + 1) < 1e-12:
        raise SingularityError("exp(A) = -1")
    fn = cmath.cosh if n_mod_4 == 1 else cmath.sinh
    den = fn((A + 1j * PI) / 4)
    if den == 0:
        raise SingularityError("vanishing denominator")
    return 2 ** (-A.imag / (4 * PI)) * abs(fn((A - 1j * PI) / 4) / den) ** 0.25


def sigma_ratio(U: complex, V: complex, k_hat: int, n: int) -> float:
    """|Sigma_n| / (|c_n| sqrt(n) exp(n Lambda(pi/6)/(2 pi))); tends to 1."""
    p = QdlParams(U, V, n)
    lg = sigma_sum_log(p, k_hat, n_max=None).real
    c = abs(c_n_constant(U, V, k_hat, n % 8))
    return math.exp(lg - 0.5 * math.log(n) - n * LAMBDA_PI_6 / (2 * PI)) / c


@dataclass(frozen=True)
class AsymptoticPrediction:
    """Leading-order data for |Trace|, resolved by congruence class.

    ``c1_mod``, ``c2_mod``, ``d1``, ``d2`` map n mod 8 (1, 3, 5, 7) to the
    constants for the two single sums.
    """

    c1_mod: dict
    c2_mod: dict
    d1: dict
    d2: dict
    growth_rate: float = LAMBDA_PI_6 / PI

    def log_prefactor(self, n: int) -> float:
        r = n % 8
        return math.log(self.c1_mod[r] * self.c2_mod[r] / (self.d1[r] * self.d2[r]))

    def log_predicted(self, n: int) -> float:
        n = check_level(n, None)
        return self.log_prefactor(n) + n * self.growth_rate

    def predicted_modulus(self, n: int) -> float:
        lg = self.log_predicted(n)
        if lg > 709.0:
            raise MagnitudeOverflowError(f"prediction exp({lg:.6g}) exceeds double range")
        return math.exp(lg)


def asymptotic_prediction(lift: LogLift) -> AsymptoticPrediction:
    if lift.word != "LR":
        raise DomainError("predictions exist for the word LR only")
    U1, U2 = lift.U(1), lift.U(2)
    V1, V2 = lift.V[1], lift.V[2]
    c1, c2, d1, d2 = {}, {}, {}, {}
    for r in (1, 3, 5, 7):
        c1[r] = abs(c_n_constant(U1, V1, lift.l_hat, r))
        c2[r] = abs(c_n_constant(U2, V2, lift.m_hat, r))
        d1[r] = d_n_limit(lift.A[1], r % 4)
        d2[r] = d_n_limit(lift.A[2], r % 4)
    return AsymptoticPrediction(c1, c2, d1, d2)


def predicted_trace_log(lift: LogLift, n: int) -> float:
    return asymptotic_prediction(lift).log_predicted(n)


def predicted_trace(lift: LogLift, n: int) -> float:
    """Leading-order |Trace| at level n."""
    return asymptotic_prediction(lift).predicted_modulus(n)


def class_constant_log(result: TraceResult) -> float:
    """log(|Trace| exp(-n vol/(4 pi))), whose limit depends on n mod 4."""
    return result.log_modulus - result.n * volume_rate()


@dataclass(frozen=True)
class LaplaceSum:
    """A sum of exponentials and its leading estimate, both scaled by exp(-scale)."""

    total: complex
    estimate: complex
    scale: float
    n: int
    x0: float

    @property
    def ratio(self) -> complex:
        return self.total / self.estimate

    @property
    def suppression(self) -> float:
        """|sum| / (sqrt(n) exp(n f(x0)))."""
        return abs(self.total) / math.sqrt(self.n)


def laplace_sum_reference(
    f: Callable[[np.ndarray], np.ndarray],
    g: Callable[[np.ndarray, int], np.ndarray],
    interval: tuple[float, float],
    n: int,
    *,
    alternating: bool = False,
    x0: float | None = None,
    f2: float | None = None,
    g_limit: Callable[[float], complex] | None = None,
) -> LaplaceSum:
    """Sum g_n(t_j) exp(n f(t_j)) over t_j = 2 pi j/n in [a, b], with its estimate.

    The estimate is g(x0) sqrt(n) exp(n f(x0)) / sqrt(-2 pi f''(x0)) at the
    interior maximum x0 of f (located numerically unless given).  With
    ``alternating`` each term carries (-1)^j; the sum is then of smaller
    order than sqrt(n) exp(n f(x0)).
    """
    a, b = float(interval[0]), float(interval[1])
    if not a < b or n < 1:
        raise DomainError("need a < b and n >= 1")
    width = b - a
    if x0 is None:
        res = minimize_scalar(lambda t: -float(f(np.array([t]))[0]), bounds=(a, b), method="bounded",
                              options={"xatol": 1e-12 * width})
        x0 = float(res.x)
    if min(x0 - a, b - x0) < 1e-6 * width:
        raise DomainError(f"the maximum of f sits on the boundary (x0 = {x0!r})")
    fx0 = float(f(np.array([x0]))[0])
    if f2 is None:
        h = 1e-4 * width
        vals = f(np.array([x0 - h, x0, x0 + h]))
        f2 = float((vals[0] - 2 * vals[1] + vals[2]) / (h * h))
    if not f2 < 0:
        raise DomainError("f must have a nondegenerate maximum (f'' < 0)")

    step = 2 * PI / n
    j = np.arange(math.ceil(a / step - 1e-12), math.floor(b / step + 1e-12) + 1)
    t = j * step
    scale = n * fx0
    terms = np.asarray(g(t, n), dtype=complex) * np.exp(n * (f(t) - fx0))
    if alternating:
        terms = terms * np.where(j % 2 == 0, 1.0, -1.0)
    total = complex(math.fsum(terms.real.tolist()), math.fsum(terms.imag.tolist()))
    g0 = complex(g_limit(x0)) if g_limit is not None else complex(np.asarray(g(np.array([x0]), n))[0])
    estimate = g0 * math.sqrt(n) / math.sqrt(-2 * PI * f2)
    return LaplaceSum(total, estimate, scale, int(n), x0)


PARTIAL_KINDS = ("first_sum_1mod4", "first_sum_3mod4", "second_sum_1mod4", "second_sum_3mod4", "isolated_3mod4")


def dq_partial_limit(A: complex, which: str) -> float:
    """Closed-form limit of one term group of (1/n) log|D^q|."""
    A = complex(A)
    if abs(cmath.exp(A) + 1) < 1e-12:
        raise SingularityError("exp(A) = -1")
    p = 1j * PI
    if which.startswith("first_sum"):
        return -LOG2 / (4 * PI) * A.imag
    if which == "second_sum_1mod4":
        return 0.25 * math.log(abs(cmath.cosh((A - p) / 4) / cmath.cosh((A + p) / 4)))
    if which == "second_sum_3mod4":
        return 0.25 * math.log(abs((A + p) * cmath.sinh((A - p) / 4) / ((A - p) * cmath.sinh((A + p) / 4))))
    if which == "isolated_3mod4":
        return 0.25 * math.log(abs(A - p) / abs(A.conjugate() - p))
    raise DomainError(f"unknown term group {which!r}; expected one of {PARTIAL_KINDS}")


def dq_partial_limits(A: complex, which: str, m: int) -> tuple[float, float]:
    """(value at finite m, limit) for one term group of (1/n) log|D^q|.

    n = 4m + 1 for the ``*_1mod4`` groups and n = 4m + 3 otherwise.
    """
    if which not in PARTIAL_KINDS:
        raise DomainError(f"unknown term group {which!r}; expected one of {PARTIAL_KINDS}")
    if int(m) < 1:
        raise DomainError("m must be >= 1")
    n = 4 * int(m) + (1 if which.endswith("1mod4") else 3)
    parts = dq_log_parts(A, n)
    key = which.split("_")[0]
    return parts[key], dq_partial_limit(A, which)


def _t_cot(t: np.ndarray) -> np.ndarray:
    # t cot(2 pi t), continued by its Taylor series near t = 0
    t = np.asarray(t, dtype=float)
    x = 2 * PI * t
    small = np.abs(x) < 1e-3
    safe = np.where(small, 1.0, x)
    series = (1 - x * x / 3 - x ** 4 / 45) / (2 * PI)
    return np.where(small, series, t * np.cos(safe) / np.sin(safe))


def cot_integral() -> float:
    """int_0^(1/4) t cot(2 pi t) dt, whose exact value is log 2 / (8 pi)."""
    val, _ = integrate(_t_cot, [0.0, 0.125, 0.25], epsabs=1e-15)
    return val.real


def euler_partial_product(A: complex, J: int) -> complex:
    """prod_{j<=J} (1 + (-A + pi i)^2 / (16 pi^2 (j - 1/2)^2)), tending to cosh((A - pi i)/4)."""
    j = np.arange(1, int(J) + 1)
    w = (-complex(A) + 1j * PI) ** 2 / (16 * PI * PI * (j - 0.5) ** 2)
    logs = np.log1p(w)
    return cmath.exp(complex(math.fsum(logs.real.tolist()), math.fsum(logs.imag.tolist())))
