"""Discrete quantum dilogarithm, the sums Sigma_n, D^q and the LR trace.

For an odd level n, q = exp(2 pi i/n), u = exp(U/n), v = exp(V/n) with
exp(V) = 1 + exp(U):

    QDL(j)    = v^-j prod_{k=1}^{j} (1 + u q^-2k)          (n-periodic in j)
    Sigma_n   = sum_{i=1}^{n} QDL(2i) q^(2 i^2 - k i)
    D^q(u)    = prod_{i=1}^{n} QDL(i)
    |Trace|   = |Sigma(U1, V1, l)| |Sigma(U2, V2, m)| / (n |D(u1)|^(1/n) |D(u2)|^(1/n))

with U_k = 2 pi i - A_k taken from a log lift.  Terms of Sigma_n grow like
exp(0.0807 n), so everything here is carried as complex logarithms and only
re-exponentiated relative to the largest term.
"""

from __future__ import annotations

import cmath
import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .edge_weights import LogLift
from .errors import (
    DomainError,
    MagnitudeOverflowError,
    ResidualError,
    ResourceGuardError,
    SingularityError,
)
from .special_functions import PI, lobachevsky, log_big_qdl
from .summation import log_sum_exp, neumaier_cumsum

N_MAX = 8191
TRIPLE_SUM_N_MAX = 301
EXP_LIMIT = 700.0
# per-level log growth of the largest Sigma_n term
SIGMA_GROWTH = lobachevsky(PI / 6) / (2 * PI)


def check_level(n: int, n_max: int | None = N_MAX) -> int:
    """Validate an odd positive level, optionally against a size cap."""
    if isinstance(n, bool) or int(n) != n:
        raise DomainError(f"n must be an integer, got {n!r}")
    n = int(n)
    if n < 1 or n % 2 == 0:
        raise DomainError(f"n must be odd and positive, got {n}")
    if n_max is not None and n > n_max:
        raise ResourceGuardError(f"n = {n} exceeds the cap {n_max}; pass a larger n_max to override")
    return n


@dataclass(frozen=True)
class QdlParams:
    """Parameters (U, V, n) of the discrete quantum dilogarithm."""

    U: complex
    V: complex
    n: int

    def __post_init__(self):
        object.__setattr__(self, "U", complex(self.U))
        object.__setattr__(self, "V", complex(self.V))
        object.__setattr__(self, "n", check_level(self.n, None))
        eu = cmath.exp(self.U)
        if abs(1.0 + eu) < 1e-12:
            raise SingularityError("exp(U) = -1 makes 1 + u^n vanish")
        target = 1.0 + eu
        if abs(cmath.exp(self.V) - target) >= 1e-8 * max(abs(target), 1e-300):
            raise DomainError(f"exp(V) = {cmath.exp(self.V)!r} differs from 1 + exp(U) = {target!r}")

    @classmethod
    def from_U(cls, U: complex, n: int, V: complex | None = None) -> "QdlParams":
        """Parameters with V defaulting to the principal log of 1 + exp(U)."""
        if V is None:
            V = cmath.log(1.0 + cmath.exp(complex(U)))
        return cls(U, V, n)

    @property
    def q(self) -> complex:
        return cmath.exp(2j * PI / self.n)

    @property
    def u(self) -> complex:
        return cmath.exp(self.U / self.n)

    @property
    def v(self) -> complex:
        return cmath.exp(self.V / self.n)


def _log_factors(U: complex, n: int) -> np.ndarray:
    """log(1 + u q^-2k) for k = 1..n, with the phase reduced mod 2 pi first."""
    k = np.arange(1, n + 1)
    w = U / n - 2j * PI * ((2 * k) % n) / n
    return np.log(1.0 + np.exp(w))


def qdl_log_table(p: QdlParams) -> np.ndarray:
    """Logarithms of QDL(j) for j = 0..n-1 (branch arbitrary, modulus exact)."""
    n = p.n
    cum = neumaier_cumsum(_log_factors(p.U, n)[: n - 1])
    table = np.empty(n, dtype=complex)
    table[0] = 0.0
    table[1:] = cum
    return table - np.arange(n) * (p.V / n)


def qdl_discrete(p: QdlParams, j: int) -> complex:
    """QDL(u, v | j) with j reduced mod n."""
    lg = qdl_log_table(p)[int(j) % p.n]
    if lg.real > EXP_LIMIT:
        raise MagnitudeOverflowError("QDL value exceeds double range; use qdl_log_table")
    return cmath.exp(lg)


def qdl_vs_continuous(p: QdlParams, j: int, *, tol: float = 1e-12) -> float:
    """|QDL(j) - exp(-jV/n) Li(z0 - 2 pi j/n) / Li(z0)| with h = 2/n.

    Here z0 = pi/2 - pi/n + U/(2 n i) and Li is the big continuous quantum
    dilogarithm.  Small residuals confirm that the discrete product
    interpolates the continuous function.
    """
    n = p.n
    hbar = 2.0 / n
    z0 = PI / 2 - PI / n + p.U / (2j * n)
    lz0 = log_big_qdl(z0, hbar, tol=tol)
    lzj = log_big_qdl(z0 - 2 * PI * j / n, hbar, tol=tol)
    continuous = cmath.exp(-j * p.V / n + lzj - lz0)
    discrete = cmath.exp(qdl_log_table(p)[int(j) % n])
    return abs(discrete - continuous)


def sigma_log_terms(p: QdlParams, k_hat: int) -> np.ndarray:
    """Logs of the n terms QDL(2i) q^(2i^2 - k i), i = 1..n."""
    n = p.n
    table = qdl_log_table(p)
    i = np.arange(1, n + 1, dtype=np.int64)
    phase = (2 * i * i - int(k_hat) * i) % n
    return table[(2 * i) % n] + 2j * PI * phase / n


def sigma_jform_log_terms(p: QdlParams, k_hat: int) -> np.ndarray:
    """Logs of the terms QDL(j) w^(j^2 - k j), j = 1..n, with w = -exp(i pi/n)."""
    n = p.n
    table = qdl_log_table(p)
    j = np.arange(1, n + 1, dtype=np.int64)
    # w = exp(i pi (n+1)/n); reduce the exponent mod 2n
    expo = ((j * j - int(k_hat) * j) * (n + 1)) % (2 * n)
    return table[j % n] + 1j * PI * expo / n


def sigma_sum_log(p: QdlParams, k_hat: int, *, n_max: int | None = N_MAX) -> complex:
    """Complex log of Sigma_n, safe for any n."""
    check_level(p.n, n_max)
    return log_sum_exp(sigma_log_terms(p, k_hat))


def sigma_sum(p: QdlParams, k_hat: int, *, check_forms: bool = False, n_max: int | None = N_MAX) -> complex:
    """Sigma_n as a complex number.

    Raises :class:`MagnitudeOverflowError` once the largest terms could leave
    double range (n Lambda(pi/6)/(2 pi) > 700); use :func:`sigma_sum_log`.
    With ``check_forms`` the rewritten single-index sum is evaluated too and
    must agree to 1e-10 relative.
    """
    if p.n * SIGMA_GROWTH > EXP_LIMIT:
        raise MagnitudeOverflowError(f"Sigma_n at n = {p.n} leaves double range; use sigma_sum_log")
    lg = sigma_sum_log(p, k_hat, n_max=n_max)
    if check_forms:
        other = log_sum_exp(sigma_jform_log_terms(p, k_hat))
        if abs(cmath.exp(other - lg) - 1.0) > 1e-10:
            raise ResidualError("the two index forms of Sigma_n disagree")
    if lg.real > EXP_LIMIT:
        raise MagnitudeOverflowError("Sigma_n exceeds double range; use sigma_sum_log")
    return cmath.exp(lg) if math.isfinite(lg.real) else 0j


def dq_direct(p: QdlParams) -> float:
    """(1/n) log|D^q(u)| from the closed product form.

    |D| = |1 + u^n|^-(n+1)/2 prod_{j=1}^{n} |1 + u q^-2j|^(n-j+1).
    """
    n = p.n
    one_un = abs(1.0 + cmath.exp(p.U))
    if one_un < 1e-12:
        raise SingularityError(f"|1 + u^n| = {one_un:.3g} is too close to 0")
    logs = np.log(np.abs(1.0 + np.exp(p.U / n - 2j * PI * ((2 * np.arange(1, n + 1)) % n) / n)))
    weights = n - np.arange(1, n + 1) + 1
    terms = (weights * logs).tolist()
    terms.append(-(n + 1) / 2 * math.log(one_un))
    return math.fsum(terms) / n


def _log_abs_expm1(w: np.ndarray) -> np.ndarray:
    """log|exp(w) - 1| for complex w, accurate when w is small."""
    x, y = w.real, w.imag
    re = np.expm1(x) * np.cos(y) - 2.0 * np.sin(0.5 * y) ** 2
    im = np.exp(x) * np.sin(y)
    return np.log(np.hypot(re, im))


def dq_log_parts(A: complex, n: int) -> dict[str, float]:
    """The grouped terms of (1/n) log|D^q(q exp(-A/n))|.

    Pairs QDL(i) with QDL(n-i) and regroups the result into conjugate ratios
    of |exp(w/n) - 1|.  Returns the ``isolated`` term (nonzero only for
    n = 3 mod 4), the ``first`` and the ``second`` sum, and ``m``.
    """
    A = complex(A)
    n = check_level(n, None)
    if abs(cmath.exp(A) + 1.0) < 1e-10:
        raise SingularityError("exp(A) = -1")
    Ab = A.conjugate()
    pi_i = 1j * PI

    def ell(w):
        return _log_abs_expm1(np.asarray(w, dtype=complex) / n)

    if n % 4 == 1:
        m = (n - 1) // 4
        j = np.arange(1, m + 1)
        jj = 4 * pi_i * j
        first_w = (2 * j - 1) / n
        first = first_w * (ell(-A + jj - pi_i) - ell(-Ab + jj - pi_i))
        second = (m - j + 1) / n * (
            ell(-A + jj - pi_i) + ell(-Ab + jj - 3 * pi_i) - ell(-Ab + jj - pi_i) - ell(-A + jj - 3 * pi_i)
        )
        isolated = 0.0
    else:
        m = (n - 3) // 4
        j = np.arange(1, m + 1)
        jj = 4 * pi_i * j
        first = 2 * j / n * (ell(-A + jj + pi_i) - ell(-Ab + jj + pi_i))
        second = (m - j + 1) / n * (
            ell(-A + jj + pi_i) + ell(-Ab + jj - pi_i) - ell(-Ab + jj + pi_i) - ell(-A + jj - pi_i)
        )
        isolated = float((m + 1) / n * (ell(-A + pi_i) - ell(-Ab + pi_i)))
    return {
        "m": m,
        "isolated": isolated,
        "first": math.fsum(np.asarray(first).tolist()),
        "second": math.fsum(np.asarray(second).tolist()),
    }


def dq_rearranged(A: complex, n: int) -> float:
    """(1/n) log|D^q(q exp(-A/n))| from the regrouped conjugate-ratio form."""
    parts = dq_log_parts(A, n)
    return math.fsum([parts["isolated"], parts["first"], parts["second"]])


@dataclass(frozen=True)
class TraceResult:
    """Modulus of the LR trace at one level, with its factors.

    ``components`` holds the complex logs of the two single sums
    (``sigma1_log``, ``sigma2_log``) and the two values (1/n) log|D^q|
    (``dq1``, ``dq2``).  Only the modulus of the trace is meaningful.
    """

    n: int
    log_modulus: float
    components: dict = field(default_factory=dict)

    @property
    def congruence_class(self) -> int:
        return self.n % 4

    @property
    def log_modulus_over_n(self) -> float:
        return self.log_modulus / self.n

    @property
    def modulus(self) -> float:
        if self.log_modulus > 709.0:
            raise MagnitudeOverflowError(f"|Trace| = exp({self.log_modulus:.6g}) exceeds double range")
        return math.exp(self.log_modulus)

    def to_dict(self) -> dict:
        c = self.components
        try:
            modulus = self.modulus
        except MagnitudeOverflowError:
            modulus = None
        return {
            "n": self.n,
            "congruence": self.congruence_class,
            "modulus": modulus,
            "log_modulus": self.log_modulus,
            "log_modulus_over_n": self.log_modulus_over_n,
            "components": {
                "sigma1_log": [c["sigma1_log"].real, c["sigma1_log"].imag],
                "sigma2_log": [c["sigma2_log"].real, c["sigma2_log"].imag],
                "dq1": c["dq1"],
                "dq2": c["dq2"],
                "k_hat": list(c["k_hat"]),
            },
        }


def _lr_params(lift: LogLift, n: int) -> list[tuple[QdlParams, int]]:
    if lift.word != "LR":
        raise DomainError(f"trace formula needs an LR lift, got word {lift.word!r}")
    return [
        (QdlParams(lift.U(1), lift.V[1], n), lift.l_hat),
        (QdlParams(lift.U(2), lift.V[2], n), lift.m_hat),
    ]


def trace_lr(lift: LogLift, n: int, *, n_max: int | None = N_MAX) -> TraceResult:
    """|Trace| for the word LR through the factored single-sum form."""
    n = check_level(n, n_max)
    (p1, k1), (p2, k2) = _lr_params(lift, n)
    s1 = sigma_sum_log(p1, k1, n_max=n_max)
    s2 = sigma_sum_log(p2, k2, n_max=n_max)
    d1 = dq_direct(p1)
    d2 = dq_direct(p2)
    log_mod = math.fsum([s1.real, s2.real, -d1, -d2, -math.log(n)])
    return TraceResult(n, log_mod, {"sigma1_log": s1, "sigma2_log": s2, "dq1": d1, "dq2": d2, "k_hat": (k1, k2)})


def trace_factored(lift: LogLift, n: int) -> complex:
    """The normalized product of the two single sums (phase included)."""
    r = trace_lr(lift, n)
    c = r.components
    return cmath.exp(c["sigma1_log"] + c["sigma2_log"] - c["dq1"] - c["dq2"] - math.log(n))


def trace_double_sum(lift: LogLift, n: int, *, n_max: int = 401) -> complex:
    """The normalized double sum over (i1, i2), phase included.

    The exponent of q is 2 i1^2 + 2 i2^2 - l i1 + ((l - m + n)/2) i2 with the
    winding integers (l, m, n) of the lift.
    """
    n = check_level(n, n_max)
    (p1, _), (p2, _) = _lr_params(lift, n)
    half = lift.l_hat - lift.m_hat + lift.n_hat
    if half % 2:
        raise DomainError("winding integers give a half-integer exponent")
    i = np.arange(1, n + 1, dtype=np.int64)
    t1 = qdl_log_table(p1)[(2 * i) % n]
    t2 = qdl_log_table(p2)[(2 * i) % n]
    i1, i2 = np.meshgrid(i, i, indexing="ij")
    expo = (2 * i1 * i1 + 2 * i2 * i2 - lift.l_hat * i1 + (half // 2) * i2) % n
    logs = t1[:, None] + t2[None, :] + 2j * PI * expo / n
    total = log_sum_exp(logs.ravel())
    return cmath.exp(total - dq_direct(p1) - dq_direct(p2) - math.log(n))


@dataclass
class TermCloud:
    """Indexed terms of a sum, stored as complex logarithms."""

    indices: np.ndarray  # shape (N, d)
    log_terms: np.ndarray  # shape (N,)
    n: int
    metadata: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.log_terms)

    def values(self, *, normalize: bool = False) -> np.ndarray:
        """Complex terms; with ``normalize`` they are divided by the largest modulus."""
        lt = self.log_terms
        if normalize:
            return np.exp(lt - lt.real.max())
        if lt.real.max() > EXP_LIMIT:
            raise MagnitudeOverflowError("terms exceed double range; pass normalize=True")
        return np.exp(lt)

    def log_total(self) -> complex:
        return log_sum_exp(self.log_terms)

    def argmax(self) -> tuple[int, ...]:
        """Index tuple of the term of largest modulus."""
        return tuple(int(x) for x in self.indices[int(np.argmax(self.log_terms.real))])

    def to_csv(self, fh=None, *, normalize: bool = False, comment: bool = False) -> str | None:
        """Write ``index1[,index2[,index3]],re,im`` rows with 17 significant digits."""
        out = fh if fh is not None else io.StringIO()
        d = self.indices.shape[1]
        if comment:
            meta = json.dumps(_jsonable(self.metadata), sort_keys=True)
            out.write(f"# n={self.n} {meta}\n")
        w = csv.writer(out, lineterminator="\n")
        w.writerow([f"index{k + 1}" for k in range(d)] + ["re", "im"])
        vals = self.values(normalize=normalize)
        for idx, z in zip(self.indices.tolist(), vals.tolist()):
            w.writerow([*idx, format(z.real, ".17g"), format(z.imag, ".17g")])
        return out.getvalue() if fh is None else None


def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def term_cloud(
    source: str,
    *,
    n: int,
    params: QdlParams | None = None,
    k_hat: int | None = None,
    lift: LogLift | None = None,
    full: bool = False,
    n_max: int | None = N_MAX,
) -> TermCloud:
    """Terms of Sigma_n (``source="sigma"``) or of the trace sum (``"trace"``).

    For ``"trace"`` with an LR lift the n^2 terms of the double sum are
    returned.  For a longer word the kernel is the product over letters
    s = 1..len(word) of QDL(q exp(-A_s/n), exp(V_s/n) | 2 i_s) q^(2 i_s^2 - k_s i_s)
    with (k_1, k_2, k_3) the winding integers; this is plotting data only.
    Without ``full`` the last index is summed out, leaving n^(len-1) terms.
    """
    n = check_level(n, n_max)
    if source == "sigma":
        if params is None or k_hat is None:
            raise ValueError("sigma cloud needs params and k_hat")
        if params.n != n:
            raise ValueError("params.n disagrees with n")
        logs = sigma_log_terms(params, k_hat)
        idx = np.arange(1, n + 1)[:, None]
        meta = {"source": "sigma", "U": params.U, "V": params.V, "k_hat": int(k_hat)}
        return TermCloud(idx, logs, n, meta)
    if source != "trace":
        raise ValueError(f"unknown source {source!r}")
    if lift is None:
        raise ValueError("trace cloud needs a lift")
    steps = len(lift.word)
    if steps > 3:
        raise ValueError("trace clouds are limited to words of length 2 or 3")
    keep = steps if (full or steps == 2) else steps - 1
    if keep >= 3 and n > TRIPLE_SUM_N_MAX:
        raise ResourceGuardError(f"{n}^3 terms requested; the triple-sum cap is n = {TRIPLE_SUM_N_MAX}")
    kappas = lift.windings
    i = np.arange(1, n + 1, dtype=np.int64)
    factors = []
    for s in range(1, steps + 1):
        p = QdlParams(lift.U(s), lift.V[s], n)
        kap = kappas[s - 1]
        factors.append(qdl_log_table(p)[(2 * i) % n] + 2j * PI * ((2 * i * i - kap * i) % n) / n)
    logs = factors[0]
    for f in factors[1:keep]:
        logs = (logs[:, None] + f[None, :]).reshape(-1)
    for f in factors[keep:]:
        logs = logs + log_sum_exp(f)
    grids = np.meshgrid(*([i] * keep), indexing="ij")
    idx = np.stack([g.reshape(-1) for g in grids], axis=1)
    meta = {"source": "trace", "word": lift.word, "windings": list(kappas), "summed_last_index": keep < steps}
    return TermCloud(idx, logs, n, meta)


def petal_window_sums(cloud: TermCloud, centers: Sequence[float], width: float = 0.5) -> list[float]:
    """log|partial sum| of Sigma_n terms whose angle 2 pi j/n lies near each center.

    The angle of term i is taken at j = 2i mod n, the argument of QDL.
    """
    n = cloud.n
    j = (2 * cloud.indices[:, 0]) % n
    t = 2 * PI * j / n
    out = []
    for c in centers:
        d = np.abs(np.angle(np.exp(1j * (t - c))))
        sel = d < width
        out.append(log_sum_exp(cloud.log_terms[sel]).real if sel.any() else -math.inf)
    return out


__all__ = [
    "QdlParams",
    "TraceResult",
    "TermCloud",
    "check_level",
    "qdl_log_table",
    "qdl_discrete",
    "qdl_vs_continuous",
    "sigma_log_terms",
    "sigma_jform_log_terms",
    "sigma_sum",
    "sigma_sum_log",
    "dq_direct",
    "dq_log_parts",
    "dq_rearranged",
    "trace_lr",
    "trace_factored",
    "trace_double_sum",
    "term_cloud",
    "petal_window_sums",
]
