"""Critical-orbit polynomials of z^d + c and their period/preperiod factors.

The polynomial g_n(c) = f^n_{d,c}(0) (in the parameter c) is built by the
recurrence g_1 = c, g_{k+1} = g_k^d + c; its roots are exactly the parameters
where the critical point 0 is periodic of period dividing n. The exact-period
factor is extracted by recursive exact division following the divisor lattice,
with the Möbius degree formula asserted hard: any (d, n) where the expected
structure fails aborts loudly instead of mislabeling orbits.

Preperiodic (Misiurewicz-type) factors come from the algebraic identity

    g_n - g_m  =  (g_{n-1} - g_{m-1}) * sum_{j<d} g_{n-1}^j g_{m-1}^{d-1-j},

so the level-(m, n) factor is the squarefree part of that cofactor sum; its
purely periodic roots (period dividing n-m) are then split off by one gcd with
g_{n-m}, leaving the strictly preperiodic part.

The module also provides numerically stable (value, derivative) evaluators for
all of these, driven by the orbit recurrence u <- u^d + c instead of the
astronomically large coefficients; the root finder uses them for everything
from float64 sweeps to outward-rounded certification.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import balls as bl
from .cacheio import atomic_write_text
from .errors import DegreeCapExceeded, FactorizationStructureViolated, NotDivisible
from .numtheory import divisors, mobius
from .polynomials import (
    ONE,
    IntPolynomial,
    X,
    divide_exact,
    is_squarefree,
    serialize,
    squarefree_part,
)

DEFAULT_DEGREE_CAP = 4096

# lazily grown per-degree tables of g_1..g_N; single writer, many readers
_tables: dict[int, list[IntPolynomial]] = {}
_factor_cache: dict[tuple[int, int], "FactorDescriptor"] = {}
_lock = threading.Lock()


@dataclass(frozen=True)
class CriticalOrbitPolynomial:
    """g_n for the family z^d + c: monic, degree d^(n-1), in the parameter c."""

    d: int
    n: int
    poly: IntPolynomial

    def __post_init__(self):
        if not self.poly.is_monic or self.poly.degree != self.d ** (self.n - 1):
            raise FactorizationStructureViolated(
                f"g_{self.n} for d={self.d} is not monic of degree {self.d ** (self.n - 1)}"
            )


@dataclass(frozen=True)
class FactorDescriptor:
    """One factor of the PCF parameter locus at level n.

    kind "exact-period": roots have critical period exactly n; expected_degree
    is the Möbius sum over divisors of n and is asserted at construction.

    kind "misiurewicz": roots are parameters where 0 has preperiod <= m and
    period dividing n - m, with one layer of the (m-1, n-1) locus divided out;
    strict_poly is the sub-factor whose roots are strictly preperiodic.
    expected_degree records the observed (asserted) degree of poly.
    """

    kind: str
    d: int
    n: int
    poly: IntPolynomial
    expected_degree: int
    m: Optional[int] = None
    strict_poly: Optional[IntPolynomial] = None

    def __post_init__(self):
        if self.poly.degree != self.expected_degree:
            raise FactorizationStructureViolated(
                f"{self.kind} factor (d={self.d}, m={self.m}, n={self.n}) has degree "
                f"{self.poly.degree}, expected {self.expected_degree}"
            )

    @property
    def label(self) -> str:
        if self.kind == "exact-period":
            return f"period-{self.n}"
        return f"misiurewicz-{self.m}-{self.n}"


def _table(d: int) -> list[IntPolynomial]:
    if d < 2:
        raise ValueError("d must be >= 2")
    with _lock:
        if d not in _tables:
            _tables[d] = [IntPolynomial([]), X]  # g_0 = 0, g_1 = c
        return _tables[d]


def gleason(d: int, n: int, cap: int = DEFAULT_DEGREE_CAP) -> CriticalOrbitPolynomial:
    """g_n(c) = f^n_{d,c}(0) as an exact integer polynomial in c."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if d ** (n - 1) > cap:
        raise DegreeCapExceeded(f"deg g_{n} = {d}^{n - 1} exceeds cap {cap}")
    table = _table(d)
    with _lock:
        while len(table) <= n:
            table.append(table[-1] ** d + X)
        return CriticalOrbitPolynomial(d, n, table[n])


def preperiodic_poly(d: int, m: int, n: int, cap: int = DEFAULT_DEGREE_CAP) -> IntPolynomial:
    """P_{m,n} = g_n - g_m (g_0 taken as the zero polynomial)."""
    if not (n > m >= 0):
        raise ValueError("need n > m >= 0")
    gn = gleason(d, n, cap).poly
    gm = gleason(d, m, cap).poly if m >= 1 else IntPolynomial([])
    return gn - gm


def exact_period_factor(d: int, n: int, cap: int = DEFAULT_DEGREE_CAP) -> FactorDescriptor:
    """Factor of g_n whose roots have critical period exactly n.

    Computed by dividing g_n by the product of all lower exact-period factors
    along divisors of n; both the exactness of the division and the Möbius
    degree are asserted.
    """
    key = (d, n)
    cached = _factor_cache.get(key)
    if cached is not None:
        if d ** (n - 1) > cap:
            raise DegreeCapExceeded(f"deg g_{n} = {d}^{n - 1} exceeds cap {cap}")
        return cached
    gn = gleason(d, n, cap).poly
    quot = gn
    for k in divisors(n):
        if k == n:
            continue
        lower = exact_period_factor(d, k, cap)
        try:
            quot = divide_exact(quot, lower.poly)
        except Exception as exc:
            raise FactorizationStructureViolated(
                f"g_{n} not divisible by the period-{k} factor (d={d})"
            ) from exc
    expected = sum(mobius(n // k) * d ** (k - 1) for k in divisors(n))
    desc = FactorDescriptor(kind="exact-period", d=d, n=n, poly=quot, expected_degree=expected)
    _factor_cache[key] = desc
    return desc


def misiurewicz_factor(d: int, m: int, n: int, cap: int = DEFAULT_DEGREE_CAP) -> FactorDescriptor:
    """Level-(m, n) preperiodic factor, with its strictly-preperiodic part.

    Uses the exact cofactor identity quoted in the module docstring; for m = 1
    the cofactor is g_{n-1}^{d-1}, whose squarefree part is g_{n-1} itself
    (there are no strictly preperiodic parameters with preperiod 1: the only
    preimage of the critical value is the critical point).
    """
    if not (n > m >= 1):
        raise ValueError("need n > m >= 1")
    a = gleason(d, n - 1, cap).poly
    if m == 1:
        poly = a  # squarefree part of a^(d-1); g_{n-1} is squarefree
        strict = ONE
        return FactorDescriptor(
            kind="misiurewicz", d=d, n=n, m=m, poly=poly,
            expected_degree=poly.degree, strict_poly=strict,
        )
    b = gleason(d, m - 1, cap).poly
    raw = _misiurewicz_raw(d, a, b)
    # safety: raw * P_{m-1,n-1} must reassemble P_{m,n}
    if raw * (a - b) != preperiodic_poly(d, m, n, cap):
        raise FactorizationStructureViolated(
            f"misiurewicz cofactor identity failed for (d={d}, m={m}, n={n})"
        )
    poly = _misiurewicz_squarefree(d, m, n, raw, cap)
    strict = _remove_periodic(d, n - m, poly, cap)
    return FactorDescriptor(
        kind="misiurewicz", d=d, n=n, m=m, poly=poly,
        expected_degree=poly.degree, strict_poly=strict,
    )


def _misiurewicz_squarefree(d, m, n, raw: IntPolynomial, cap: int) -> IntPolynomial:
    """squarefree_part(raw) with the structural fast path for d >= 3.

    The repeated roots of the cofactor sit exactly where g_{n-1} and g_{m-1}
    vanish together, i.e. on the roots of g_q with q = gcd(n-1, m-1), each at
    multiplicity d-1 (the local expansion of (a^d - b^d)/(a - b) at a common
    simple zero). Dividing by g_q^(d-2) is verified by exact division and a
    squarefree certificate; anything unexpected falls back to the generic
    exact computation.
    """
    import math

    if d >= 3:
        q = math.gcd(n - 1, m - 1)
        cand = gleason(d, q, cap).poly ** (d - 2)
        try:
            quot = divide_exact(raw, cand)
        except NotDivisible:
            quot = None
        if quot is not None and is_squarefree(quot):
            return quot.primitive_part()
    return squarefree_part(raw)


def _remove_periodic(d: int, k: int, poly: IntPolynomial, cap: int) -> IntPolynomial:
    """poly with every exact-period-j factor (j | k) that divides it removed.

    Equivalent to poly / gcd(poly, g_k) for squarefree poly, but via per-factor
    exact divisions (with a cheap integer-evaluation divisibility pre-test)
    instead of a large-degree gcd.
    """
    out = poly
    probe = 5
    for j in divisors(k):
        fac = exact_period_factor(d, j, cap).poly
        if fac.degree > out.degree:
            continue
        fv = fac(probe)
        if fv != 0 and out(probe) % fv != 0:
            continue
        try:
            out = divide_exact(out, fac).primitive_part()
        except NotDivisible:
            continue
    return out


def _misiurewicz_raw(d: int, a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    """sum_{j=0}^{d-1} a^j b^(d-1-j) — the cofactor of (a - b) in a^d - b^d."""
    total = IntPolynomial([])
    apow = ONE
    bpows = [ONE]
    for _ in range(d - 1):
        bpows.append(bpows[-1] * b)
    for j in range(d):
        total = total + apow * bpows[d - 1 - j]
        if j < d - 1:
            apow = apow * a
    return total


def enumerate_factors(
    d: int, max_n: int, include_misiurewicz: bool = True, cap: int = DEFAULT_DEGREE_CAP
) -> list[FactorDescriptor]:
    """All factors up to level max_n, exact-period first, then (m, n) pairs."""
    out = [exact_period_factor(d, n, cap) for n in range(1, max_n + 1)]
    if include_misiurewicz:
        for n in range(2, max_n + 1):
            for m in range(1, n):
                out.append(misiurewicz_factor(d, m, n, cap))
    return out


# -- cache files --------------------------------------------------------------


def gleason_cache_path(root: Path, d: int, n: int) -> Path:
    return Path(root) / "gleason" / f"d{d}" / f"n{n}.poly"


def write_gleason_cache(root: Path, d: int, n: int, cap: int = DEFAULT_DEGREE_CAP) -> Path:
    path = gleason_cache_path(root, d, n)
    atomic_write_text(path, serialize(gleason(d, n, cap).poly))
    return path


# -- stable evaluators ---------------------------------------------------------
#
# The float64 stage tracks a shared power-of-two scale per point so the orbit
# recurrence never overflows while far-from-set points migrate inward: stored
# values satisfy true = stored * 2^scale, and every Newton ratio used by the
# root finder is scale-free. Near the parameter region that actually contains
# roots the scale stays 0 and the arithmetic is plain float64.

_RESCALE_LIMIT = 2.0**200


def _orbit_f64(d: int, c: np.ndarray, depth: int):
    """Orbit values/derivatives u_k, u'_k for k = 0..depth, jointly rescaled.

    Returns (U, DU, S): lists of arrays; true u_k = U[k] * 2^S[k].
    """
    n_pts = c.shape[0]
    U = [np.zeros(n_pts, dtype=np.complex128)]
    DU = [np.zeros(n_pts, dtype=np.complex128)]
    S = [np.zeros(n_pts)]
    for _ in range(depth):
        uk, duk, sk = U[-1], DU[-1], S[-1]
        scale_new = d * sk
        damp = np.exp2(-scale_new)  # 0 when the scale is huge: relatively negligible
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            if d == 2:
                ukd1 = uk
                uk1 = uk * uk + c * damp
            else:
                ukd1 = uk ** (d - 1)
                uk1 = ukd1 * uk + c * damp
            duk1 = d * ukd1 * duk + damp
            mag = np.maximum(np.abs(uk1), np.abs(duk1))
            need = mag > _RESCALE_LIMIT
            if need.any():
                shift = np.zeros(n_pts)
                shift[need] = np.ceil(np.log2(mag[need])) - 8
                adj = np.exp2(-shift)
                uk1 = uk1 * adj
                duk1 = duk1 * adj
                scale_new = scale_new + shift
        U.append(uk1)
        DU.append(duk1)
        S.append(scale_new)
    return U, DU, S


def _orbit_mp(d: int, z, depth: int):
    """Exact-recurrence orbit at the current mpmath precision (centers only)."""
    u = z * 0
    du = z * 0
    us = [u]
    dus = [du]
    for _ in range(depth):
        if d == 2:
            upow = u
        else:
            upow = u ** (d - 1)
        u, du = upow * u + z, d * upow * du + 1
        us.append(u)
        dus.append(du)
    return us, dus


def _orbit_ball(d: int, zb: bl.ComplexBall, depth: int):
    one = bl.exact_ball(1)
    u = bl.exact_ball(0)
    du = bl.exact_ball(0)
    us = [u]
    dus = [du]
    for _ in range(depth):
        upow = bl.bpow_int(u, d - 1)
        u_next = bl.badd(bl.bmul(upow, u), zb)
        du_next = bl.badd(bl.bscale(bl.bmul(upow, du), d), one)
        u, du = u_next, du_next
        us.append(u)
        dus.append(du)
    return us, dus


class GleasonEvaluator:
    """(value, derivative) of g_n via the orbit recurrence."""

    f64_ok = True

    def __init__(self, d: int, n: int):
        self.d, self.n = d, n
        self.degree = d ** (n - 1)
        self.root_radius = float(2.0 ** (1.0 / (d - 1)))

    def newton_f64(self, z: np.ndarray) -> np.ndarray:
        U, DU, _ = _orbit_f64(self.d, z, self.n)
        with np.errstate(all="ignore"):
            return U[self.n] / DU[self.n]

    def newton_mp(self, z):
        us, dus = _orbit_mp(self.d, z, self.n)
        return us[self.n] / dus[self.n]

    def value_deriv_ball(self, zb: bl.ComplexBall):
        us, dus = _orbit_ball(self.d, zb, self.n)
        return us[self.n], dus[self.n]


class ExactPeriodEvaluator:
    """Evaluates the exact-period factor as the Möbius product of g_k's."""

    f64_ok = True

    def __init__(self, d: int, n: int, degree: int):
        self.d, self.n = d, n
        self.degree = degree
        self.root_radius = float(2.0 ** (1.0 / (d - 1)))
        self.exps = [(k, mobius(n // k)) for k in divisors(n) if mobius(n // k) != 0]

    def newton_f64(self, z: np.ndarray) -> np.ndarray:
        U, DU, _ = _orbit_f64(self.d, z, self.n)
        with np.errstate(all="ignore"):
            inv = np.zeros_like(z)
            for k, e in self.exps:
                inv = inv + e * (DU[k] / U[k])
            return 1.0 / inv

    def newton_mp(self, z):
        # same split as the ball path: the u_n factor vanishes at the roots,
        # so it enters through the product rule rather than a log-derivative
        us, dus = _orbit_mp(self.d, z, self.n)
        rest = z * 0 + 1
        for k, e in self.exps:
            if k == self.n:
                continue
            rest = rest * us[k] if e > 0 else rest / us[k]
        val = rest * us[self.n]
        der = dus[self.n] * rest
        for k, e in self.exps:
            if k != self.n:
                der = der + e * (dus[k] / us[k]) * val
        return val / der

    def value_deriv_ball(self, zb: bl.ComplexBall):
        us, dus = _orbit_ball(self.d, zb, self.n)
        rest = bl.exact_ball(1)
        for k, e in self.exps:
            if k == self.n:
                continue
            rest = bl.bmul(rest, us[k]) if e > 0 else bl.bdiv(rest, us[k])
        val = bl.bmul(rest, us[self.n])
        der = bl.bmul(dus[self.n], rest)
        for k, e in self.exps:
            if k != self.n:
                term = bl.bscale(bl.bmul(bl.bdiv(dus[k], us[k]), val), e)
                der = bl.badd(der, term)
        return val, der


class MisiurewiczEvaluator:
    """Evaluates sum_j g_{n-1}^j g_{m-1}^{d-1-j} (m >= 2) via orbit values.

    The float64 Newton ratio is computed from scale-free quantities
    q = u_{m-1}/u_{n-1}, u'_k/u_k only, so the shared-exponent rescaling of
    far-out points cancels.
    """

    f64_ok = True

    def __init__(self, d: int, m: int, n: int, degree: int):
        if m < 2:
            raise ValueError("use GleasonEvaluator for m = 1 factors")
        self.d, self.m, self.n = d, m, n
        self.degree = degree
        self.root_radius = float(2.0 ** (1.0 / (d - 1)))

    def newton_f64(self, z: np.ndarray) -> np.ndarray:
        d, m, n = self.d, self.m, self.n
        U, DU, S = _orbit_f64(d, z, n - 1)
        ua, dua, sa = U[n - 1], DU[n - 1], S[n - 1]
        ub, dub, sb = U[m - 1], DU[m - 1], S[m - 1]
        with np.errstate(all="ignore"):
            q = (ub / ua) * np.exp2(np.minimum(sb - sa, 8.0))
            ra = dua / ua
            rb = dub / ub
            val = np.zeros_like(z)
            der = np.zeros_like(z)
            qpow = np.ones_like(z)  # q^(d-1-j) accumulated from j = d-1 down
            for j in range(d - 1, -1, -1):
                val = val + qpow
                der = der + (j * ra + (d - 1 - j) * rb) * qpow
                if j > 0:
                    qpow = qpow * q
            return val / der

    def newton_mp(self, z):
        val, der = self._value_deriv_mp(z)
        return val / der

    def _value_deriv_mp(self, z):
        d, m, n = self.d, self.m, self.n
        us, dus = _orbit_mp(d, z, n - 1)
        a, da = us[n - 1], dus[n - 1]
        b, db = us[m - 1], dus[m - 1]
        val = z * 0
        der = z * 0
        for j in range(d):
            apj = a**j
            bpj = b ** (d - 1 - j)
            val = val + apj * bpj
            term = 0
            if j > 0:
                term = term + j * a ** (j - 1) * da * bpj
            if d - 1 - j > 0:
                term = term + (d - 1 - j) * b ** (d - 2 - j) * db * apj
            der = der + term
        return val, der

    def value_deriv_ball(self, zb: bl.ComplexBall):
        d, m, n = self.d, self.m, self.n
        us, dus = _orbit_ball(d, zb, n - 1)
        a, da = us[n - 1], dus[n - 1]
        b, db = us[m - 1], dus[m - 1]
        val = bl.exact_ball(0)
        der = bl.exact_ball(0)
        for j in range(d):
            apj = bl.bpow_int(a, j)
            bpj = bl.bpow_int(b, d - 1 - j)
            val = bl.badd(val, bl.bmul(apj, bpj))
            if j > 0:
                t = bl.bscale(bl.bmul(bl.bmul(bl.bpow_int(a, j - 1), da), bpj), j)
                der = bl.badd(der, t)
            if d - 1 - j > 0:
                t = bl.bscale(bl.bmul(bl.bmul(bl.bpow_int(b, d - 2 - j), db), apj), d - 1 - j)
                der = bl.badd(der, t)
        return val, der


def factor_evaluator(desc: FactorDescriptor):
    """Stable evaluator for a factor's poly, or None when only Horner applies."""
    from .rootfinder import QuotientEvaluator  # local import to avoid a cycle

    if desc.kind == "exact-period":
        if desc.n == 1:
            return GleasonEvaluator(desc.d, 1)
        return ExactPeriodEvaluator(desc.d, desc.n, desc.expected_degree)
    if desc.kind == "misiurewicz":
        if desc.m == 1:
            return GleasonEvaluator(desc.d, desc.n - 1)
        a = gleason(desc.d, desc.n - 1).poly
        b = gleason(desc.d, desc.m - 1).poly
        raw = _misiurewicz_raw(desc.d, a, b)
        base = MisiurewiczEvaluator(desc.d, desc.m, desc.n, raw.degree)
        if raw == desc.poly:
            return base
        cofactor = divide_exact(raw, desc.poly)
        return QuotientEvaluator(base, cofactor, desc.poly, base.root_radius)
    return None


def gleason_evaluator(d: int, n: int) -> GleasonEvaluator:
    return GleasonEvaluator(d, n)
