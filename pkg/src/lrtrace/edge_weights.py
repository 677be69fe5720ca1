"""Edge weights of the punctured-torus triangulation under L and R moves.

A weight triple (a, b, c) lives on the three edges of an ideal triangulation
of the once-punctured torus.  The moves act by

    L: (a, b, c) -> (1/b, (1+b)^2 a, b^2 c / (1+b)^2)
    R: (a, b, c) -> (1/c, (1+c)^2 b, c^2 a / (1+c)^2)

A periodic system for the word LR is a triple fixed by R o L.  It can be
written down with the quadratic formula, and a choice of logarithms of the
weights (a log lift) then produces the data the trace formula consumes.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares

from .errors import (
    DegenerateInputError,
    ResidualError,
    ThetaMismatchError,
    WindingError,
)

TWO_PI_I = 2j * math.pi
WINDING_TOL = 1e-6


@dataclass(frozen=True)
class WeightTriple:
    a: complex
    b: complex
    c: complex

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    def as_tuple(self) -> tuple[complex, complex, complex]:
        return (self.a, self.b, self.c)

    def distance(self, other: "WeightTriple") -> float:
        """Largest componentwise relative difference."""
        return max(abs(x - y) / max(abs(y), 1e-300) for x, y in zip(self.as_tuple(), other.as_tuple()))


def _check_move(w: complex, name: str) -> None:
    if w == 0 or w == -1:
        raise DegenerateInputError(f"{name} = {w!r} is a pole of the move (must avoid 0 and -1)")


def evolve_L(t: WeightTriple) -> WeightTriple:
    """Apply the L move: (1/b, (1+b)^2 a, b^2 c / (1+b)^2)."""
    _check_move(t.b, "b")
    s = (1.0 + t.b) ** 2
    return WeightTriple(1.0 / t.b, s * t.a, t.b * t.b * t.c / s)


def evolve_R(t: WeightTriple) -> WeightTriple:
    """Apply the R move: (1/c, (1+c)^2 b, c^2 a / (1+c)^2)."""
    _check_move(t.c, "c")
    s = (1.0 + t.c) ** 2
    return WeightTriple(1.0 / t.c, s * t.b, t.c * t.c * t.a / s)


_MOVES = {"L": evolve_L, "R": evolve_R}


def _check_word(word: str) -> str:
    word = word.upper()
    if not word or set(word) - {"L", "R"}:
        raise ValueError(f"word must be a non-empty string over L and R, got {word!r}")
    return word


def sweep(t: WeightTriple, word: str) -> list[WeightTriple]:
    """Triples visited by applying the letters of ``word`` left to right.

    Returns ``len(word) + 1`` triples, starting with ``t``.
    """
    out = [t]
    for letter in _check_word(word):
        out.append(_MOVES[letter](out[-1]))
    return out


def _parse_sign(sign) -> int:
    if sign in (1, "+", "+1"):
        return 1
    if sign in (-1, "-", "-1"):
        return -1
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


@dataclass(frozen=True)
class PeriodicWeightSystem:
    """Weight triples t0, t1 = L(t0), t2 = R(t1) = t0 for the word LR."""

    triples: tuple[WeightTriple, WeightTriple, WeightTriple]
    sign: int
    b0: complex

    def residual(self) -> float:
        t0, t1, t2 = self.triples
        return max(evolve_L(t0).distance(t1), evolve_R(t1).distance(t2), t2.distance(t0))

    def to_dict(self) -> dict:
        return {
            "b0": _cpair(self.b0),
            "sign": "+" if self.sign > 0 else "-",
            "triples": [[_cpair(w) for w in t.as_tuple()] for t in self.triples],
            "residual": self.residual(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PeriodicWeightSystem":
        triples = tuple(WeightTriple(*(_cparse(w) for w in t)) for t in d["triples"])
        return cls(triples, _parse_sign(d["sign"]), _cparse(d["b0"]))


def solve_periodic(b0: complex, sign="+", *, residual_tol: float = 1e-8) -> PeriodicWeightSystem:
    """Closed-form periodic LR weight system with prescribed b0.

    With D = -b0^3 - (7/4) b0^2 - b0 (principal square root) and
    N = -1 - (3/2) b0 - b0^2,

        a0 = (N + s sqrt D) / (1+b0)^2,   c0 = (N - s sqrt D) / b0^2,
        t1 = (1/b0, N + s sqrt D, (N - s sqrt D) / (1+b0)^2),

    where s = +1 or -1 selects the root.  The result is checked against the
    recursion and :class:`ResidualError` is raised if it fails.
    """
    b0 = complex(b0)
    s = _parse_sign(sign)
    if b0 == 0 or b0 == -1:
        raise DegenerateInputError(f"b0 = {b0!r} is excluded (must avoid 0 and -1)")
    root = cmath.sqrt(-b0 ** 3 - 1.75 * b0 ** 2 - b0)
    N = -1.0 - 1.5 * b0 - b0 * b0
    plus = N + s * root
    minus = N - s * root
    if plus == 0 or minus == 0:
        raise DegenerateInputError(f"b0 = {b0!r} gives a vanishing weight")
    one_b2 = (1.0 + b0) ** 2
    t0 = WeightTriple(plus / one_b2, b0, minus / (b0 * b0))
    t1 = WeightTriple(1.0 / b0, plus, minus / one_b2)
    system = PeriodicWeightSystem((t0, t1, t0), s, b0)
    res = system.residual()
    if not res < residual_tol:
        raise ResidualError(f"closed form misses the LR recursion at b0 = {b0!r}: residual {res:.3g}")
    return system


@dataclass(frozen=True)
class LogLift:
    """Logarithms of the weights along a word, and the winding integers.

    ``A[k], B[k], C[k]`` are logs of the weights of the k-th triple and
    ``V[k]`` a log of ``1 + 1/a_k``; index 0 is the starting triple and index
    ``len(word)`` the triple after the full sweep.
    """

    A: tuple[complex, ...]
    B: tuple[complex, ...]
    C: tuple[complex, ...]
    V: tuple[complex, ...]
    theta_v: complex
    l_hat: int
    m_hat: int
    n_hat: int
    word: str = "LR"
    base_branches: tuple[int, int, int] = (0, 0, 0)
    triples: tuple[WeightTriple, ...] = field(default=(), compare=False)

    @property
    def windings(self) -> tuple[int, int, int]:
        return (self.l_hat, self.m_hat, self.n_hat)

    def U(self, k: int) -> complex:
        """The parameter 2 pi i - A_k entering the trace."""
        return TWO_PI_I - self.A[k]

    def exp_residual(self) -> float:
        """Worst relative mismatch between the logs and the weights."""
        worst = 0.0
        for k, t in enumerate(self.triples):
            for L, w in ((self.A[k], t.a), (self.B[k], t.b), (self.C[k], t.c), (self.V[k], 1 + 1 / t.a)):
                worst = max(worst, abs(cmath.exp(L) - w) / abs(w))
        return worst

    def to_dict(self) -> dict:
        return {
            "word": self.word,
            "A": [_cpair(x) for x in self.A],
            "B": [_cpair(x) for x in self.B],
            "C": [_cpair(x) for x in self.C],
            "V": [_cpair(x) for x in self.V],
            "theta_v": _cpair(self.theta_v),
            "l_hat": self.l_hat,
            "m_hat": self.m_hat,
            "n_hat": self.n_hat,
            "base_branches": list(self.base_branches),
            "triples": [[_cpair(w) for w in t.as_tuple()] for t in self.triples],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LogLift":
        return cls(
            A=tuple(_cparse(x) for x in d["A"]),
            B=tuple(_cparse(x) for x in d["B"]),
            C=tuple(_cparse(x) for x in d["C"]),
            V=tuple(_cparse(x) for x in d["V"]),
            theta_v=_cparse(d["theta_v"]),
            l_hat=int(d["l_hat"]),
            m_hat=int(d["m_hat"]),
            n_hat=int(d["n_hat"]),
            word=d.get("word", "LR"),
            base_branches=tuple(d.get("base_branches", (0, 0, 0))),
            triples=tuple(WeightTriple(*(_cparse(w) for w in t)) for t in d.get("triples", ())),
        )


def _winding(x: complex, name: str) -> int:
    k = x / TWO_PI_I
    r = round(k.real)
    if abs(k - r) >= WINDING_TOL:
        raise WindingError(f"{name} winding {k!r} is not an integer within {WINDING_TOL:g}")
    return int(r)


def lift_word(
    t0: WeightTriple,
    word: str,
    theta_v: complex,
    base_branches: Sequence[int] = (0, 0, 0),
    v_branches: Sequence[int] | None = None,
    *,
    theta_tol: float = 1e-8,
    periodic_tol: float = 1e-8,
) -> LogLift:
    """Log lift along an arbitrary L/R word starting from a periodic triple.

    ``base_branches = (kA, kB, kV)`` shifts A0, B0 and V1 by multiples of
    2 pi i; C0 is fixed by A0 + B0 + C0 = theta_v.  ``v_branches`` (one
    integer per letter) overrides the branch of every V_k, k >= 1.
    """
    word = _check_word(word)
    theta_v = complex(theta_v)
    kA, kB, kV = (int(k) for k in base_branches)
    triples = sweep(t0, word)
    if triples[-1].distance(t0) >= periodic_tol:
        raise ResidualError(f"triple is not periodic under {word}: residual {triples[-1].distance(t0):.3g}")
    prod = t0.a * t0.b * t0.c
    if abs(cmath.exp(theta_v) - prod) >= theta_tol * abs(prod):
        raise ThetaMismatchError(f"exp(theta_v) = {cmath.exp(theta_v)!r} but a0 b0 c0 = {prod!r}")
    if v_branches is None:
        v_branches = [kV] + [0] * (len(word) - 1)
    if len(v_branches) != len(word):
        raise ValueError("v_branches needs one integer per letter")

    A = [cmath.log(t0.a) + TWO_PI_I * kA]
    B = [cmath.log(t0.b) + TWO_PI_I * kB]
    C = [theta_v - A[0] - B[0]]
    V = [cmath.log(1.0 + 1.0 / t0.a)]
    for k, letter in enumerate(word):
        a, b, c = A[-1], B[-1], C[-1]
        nxt = triples[k + 1]
        v = cmath.log(1.0 + 1.0 / nxt.a) + TWO_PI_I * int(v_branches[k])
        if letter == "L":
            A.append(-b)
            B.append(2 * v + a)
            C.append(-2 * v + 2 * b + c)
        else:
            A.append(-c)
            B.append(2 * v + b)
            C.append(-2 * v + 2 * c + a)
        V.append(v)

    l_hat = _winding(A[0] - A[-1], "A")
    m_hat = _winding(B[0] - B[-1], "B")
    n_hat = _winding(C[0] - C[-1], "C")
    if l_hat + m_hat + n_hat != 0:
        raise WindingError(f"winding integers {l_hat}, {m_hat}, {n_hat} do not sum to zero")
    return LogLift(
        A=tuple(A), B=tuple(B), C=tuple(C), V=tuple(V),
        theta_v=theta_v, l_hat=l_hat, m_hat=m_hat, n_hat=n_hat,
        word=word, base_branches=(kA, kB, kV), triples=tuple(triples),
    )


def lift_logarithms(
    system: PeriodicWeightSystem,
    theta_v: complex,
    base_branches: Sequence[int] = (0, 0, 0),
    v_branches: Sequence[int] | None = None,
) -> LogLift:
    """Log lift of a periodic LR system.

    A0 = Log a0 + 2 pi i kA, B0 = Log b0 + 2 pi i kB, C0 = theta_v - A0 - B0,
    V1 = Log(1 + 1/a1) + 2 pi i kV, V2 principal; the remaining logs follow
    the linear recursions and the winding integers are read off from the
    period defects (A0 - A2) / 2 pi i and so on.
    """
    return lift_word(system.triples[0], "LR", theta_v, base_branches, v_branches)


def default_theta(t: WeightTriple) -> complex:
    """Principal log of a0 b0 c0."""
    return cmath.log(t.a * t.b * t.c)


def lift_from_logs(A0: complex, B0: complex, C0: complex, *, match_tol: float = 1e-4) -> tuple[LogLift, float]:
    """Rebuild an exact LR lift from approximate logs A0, B0, C0.

    The periodic system is solved from b0 = exp(B0) with whichever root
    reproduces exp(A0) and exp(C0) best; the logs are then snapped onto that
    system with the same branches.  Returns ``(lift, mismatch)`` where
    ``mismatch`` is the largest distance between the input and snapped logs.
    """
    A0, B0, C0 = complex(A0), complex(B0), complex(C0)
    b0 = cmath.exp(B0)
    best = None
    for s in (1, -1):
        system = solve_periodic(b0, s)
        t0 = system.triples[0]
        kA = round(((A0 - cmath.log(t0.a)) / TWO_PI_I).real)
        kC = round(((C0 - cmath.log(t0.c)) / TWO_PI_I).real)
        logs = (cmath.log(t0.a) + TWO_PI_I * kA, cmath.log(t0.b), cmath.log(t0.c) + TWO_PI_I * kC)
        kB = round(((B0 - logs[1]) / TWO_PI_I).real)
        logs = (logs[0], logs[1] + TWO_PI_I * kB, logs[2])
        mismatch = max(abs(x - y) for x, y in zip(logs, (A0, B0, C0)))
        if best is None or mismatch < best[0]:
            best = (mismatch, system, logs, (kA, kB))
    mismatch, system, logs, (kA, kB) = best
    if mismatch > match_tol:
        raise ResidualError(f"no periodic LR system within {match_tol:g} of the given logs (best {mismatch:.3g})")
    lift = lift_logarithms(system, sum(logs), (kA, kB, 0))
    return lift, mismatch


def refine_periodic(t: WeightTriple, word: str, *, tol: float = 1e-13) -> WeightTriple:
    """Polish an approximately periodic triple for ``word`` by least squares.

    Solves sweep(t, word)[-1] = t for the six real unknowns.
    """
    word = _check_word(word)

    def residual(x: np.ndarray) -> np.ndarray:
        tt = WeightTriple(x[0] + 1j * x[1], x[2] + 1j * x[3], x[4] + 1j * x[5])
        end = sweep(tt, word)[-1]
        d = [e - s for e, s in zip(end.as_tuple(), tt.as_tuple())]
        return np.array([v for z in d for v in (z.real, z.imag)])

    x0 = np.array([v for z in t.as_tuple() for v in (z.real, z.imag)])
    sol = least_squares(residual, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15)
    out = WeightTriple(sol.x[0] + 1j * sol.x[1], sol.x[2] + 1j * sol.x[3], sol.x[4] + 1j * sol.x[5])
    if sweep(out, word)[-1].distance(out) >= tol * 1e3:
        raise ResidualError(f"least squares did not converge to a periodic {word} triple")
    return out


def lift_word_from_logs(A0: complex, B0: complex, C0: complex, word: str) -> LogLift:
    """Lift along ``word`` starting from approximate logs of a periodic triple.

    The triple exp(A0), exp(B0), exp(C0) is refined to an exact periodic
    point, and the logs keep the branches of the input.
    """
    A0, B0, C0 = complex(A0), complex(B0), complex(C0)
    t = refine_periodic(WeightTriple(cmath.exp(A0), cmath.exp(B0), cmath.exp(C0)), word)
    kA = round(((A0 - cmath.log(t.a)) / TWO_PI_I).real)
    kB = round(((B0 - cmath.log(t.b)) / TWO_PI_I).real)
    kC = round(((C0 - cmath.log(t.c)) / TWO_PI_I).real)
    theta = cmath.log(t.a) + cmath.log(t.b) + cmath.log(t.c) + TWO_PI_I * (kA + kB + kC)
    return lift_word(t, word, theta, (kA, kB, 0))


def _cpair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _cparse(x) -> complex:
    if isinstance(x, (list, tuple)):
        return complex(float(x[0]), float(x[1]))
    return complex(x)

