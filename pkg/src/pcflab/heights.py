"""Escape rates, local heights at all places, Weil and critical heights.

The archimedean escape rate of z^d + c is computed by rigorous ball iteration
z <- z^d + c seeded at the critical value: once |z| certifiably clears the
bail radius B = max(2, (2|c|)^(1/d), 2^(1/(d-1))), the normalized logarithm
d^-k log|z_k| is within log(2)/(d^k (d-1)) of the limit, and the bound
tightens geometrically with every extra step (see _escape_attempt for the
derivation). Non-escape within the iteration budget is reported as a verdict
("bounded after N steps"), never as set membership.

Finite places never need iteration: the escape rate there is log max(1, |c|_p),
so everything reduces to Newton polygons of minimal polynomials, computed
exactly over Fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import mpmath as mp

from . import balls as bl
from .errors import HypothesisUndecided
from .numtheory import factorize, valuation
from .polynomials import IntPolynomial, divmod_exact, is_squarefree
from .rootfinder import all_roots

DEFAULT_BITS = 256
DEFAULT_MAX_ITER = 10_000
_ESCAPE_PREC_CAP = 4096


# -- archimedean escape rate ---------------------------------------------------


@dataclass(frozen=True)
class EscapeRateResult:
    """Escape rate with rigorous error bound.

    escaped=False means the orbit stayed below the bail radius for
    iterations_used certified steps; value is then 0 (a lower bound for the
    true rate, exact whenever the point really has a bounded orbit).
    """

    value: mp.mpf
    error_bound: mp.mpf
    iterations_used: int
    escaped: bool


def _as_ball(x) -> bl.ComplexBall:
    if isinstance(x, bl.ComplexBall):
        return x
    if isinstance(x, (int, Fraction)):
        return bl.exact_ball(x)
    return bl.ball(x)


def _bail_radius(d: int, c_abs_hi: mp.mpf) -> mp.mpf:
    b = mp.mpf(2) ** (mp.mpf(1) / (d - 1))
    b = max(b, (2 * c_abs_hi) ** (mp.mpf(1) / d))
    return max(b, mp.mpf(2)) * (1 + mp.mpf(2) ** (-20))


def _escape_attempt(d, cb, z0b, target_error, max_iter):
    """One fixed-precision pass; returns EscapeRateResult or None to escalate.

    After escape at step k (z_0 counts as step 0), the remaining tail is
      sum_{j>=k} d^-(j+1) log|1 + c z_j^-d|,
    and with eps_j = |c| / |z_j|^d <= 1/2 nonincreasing (beyond B the modulus
    never shrinks), each term is at most d^-(j+1) eps_k log 4, giving
      |G - d^-k log|z_k|| <= eps_k log4 / (d^k (d-1)) <= log2 / (d^k (d-1)).
    """
    log4 = mp.log(4)
    c_lo, c_hi = cb.abs_bounds()
    bail = _bail_radius(d, c_hi)
    z = z0b
    escaped_at: Optional[int] = None
    dk = mp.mpf(1)  # d^k
    for k in range(max_iter + 1):
        lo, hi = z.abs_bounds()
        if escaped_at is None and lo >= bail:
            escaped_at = k
        if escaped_at is not None:
            eps = c_hi / lo**d
            tail = (eps * log4) / (dk * (d - 1))
            llo, lhi = bl.log_abs_interval(z)
            half = (lhi - llo) / 2
            if tail <= target_error / 2:
                if half > target_error / 2:
                    return None  # ball too wide at this precision
                value = (llo + lhi) / 2 / dk
                return EscapeRateResult(
                    value=value,
                    error_bound=tail + half / dk + mp.mpf(2) ** (-mp.mp.prec // 2),
                    iterations_used=k,
                    escaped=True,
                )
        if hi > 0 and z.radius > (1 + hi) * mp.mpf(2) ** (-16):
            return None  # enclosure degenerated before a decision
        if k == max_iter:
            break
        z = bl.badd(bl.bpow_int(z, d), cb)
        dk *= d
    if escaped_at is not None:
        return None
    return EscapeRateResult(
        value=mp.mpf(0), error_bound=mp.mpf(0), iterations_used=max_iter, escaped=False
    )


def _escape_rate_seeded(
    d: int,
    c,
    z0,
    target_error: float = 1e-12,
    max_iter: int = DEFAULT_MAX_ITER,
    precision_bits: int = DEFAULT_BITS,
    seed_map=None,
) -> EscapeRateResult:
    if d < 2:
        raise ValueError("d must be >= 2")
    wp = max(64, precision_bits)
    while wp <= _ESCAPE_PREC_CAP:
        with mp.workprec(wp + 32):
            cb = _as_ball(c)
            zb = _as_ball(z0) if seed_map is None else seed_map(_as_ball(z0), cb)
            res = _escape_attempt(d, cb, zb, mp.mpf(target_error), max_iter)
            if res is not None:
                return res
        wp *= 2
    # never certified escape, never survived max_iter at the precision cap:
    # report the longest certified bounded window at the top precision
    with mp.workprec(_ESCAPE_PREC_CAP + 32):
        cb = _as_ball(c)
        zb = _as_ball(z0) if seed_map is None else seed_map(_as_ball(z0), cb)
        bail = _bail_radius(d, cb.abs_bounds()[1])
        z = zb
        k = 0
        while k < max_iter:
            lo, hi = z.abs_bounds()
            if z.radius > (1 + hi) * mp.mpf(2) ** (-16) or lo >= bail:
                break
            z = bl.badd(bl.bpow_int(z, d), cb)
            k += 1
        return EscapeRateResult(
            value=mp.mpf(0), error_bound=mp.mpf(0), iterations_used=k, escaped=False
        )


def escape_rate_arch(
    d: int,
    c,
    target_error: float = 1e-12,
    max_iter: int = DEFAULT_MAX_ITER,
    precision_bits: int = DEFAULT_BITS,
) -> EscapeRateResult:
    """Escape rate of the critical orbit: iterate z <- z^d + c from z = c."""
    return _escape_rate_seeded(d, c, c, target_error, max_iter, precision_bits)


def local_height_arch(
    d: int,
    c,
    z,
    target_error: float = 1e-12,
    max_iter: int = DEFAULT_MAX_ITER,
    precision_bits: int = DEFAULT_BITS,
) -> EscapeRateResult:
    """Call-Silverman local height of z under z^d + c (seeded escape rate)."""
    return _escape_rate_seeded(d, c, z, target_error, max_iter, precision_bits)


def local_height_functional_check(
    d: int,
    c,
    z,
    target_error: float = 1e-13,
    max_iter: int = DEFAULT_MAX_ITER,
    precision_bits: int = DEFAULT_BITS,
) -> mp.mpf:
    """Upper bound for |lambda(z^d + c) - d lambda(z)| at the given point."""
    lam_z = local_height_arch(d, c, z, target_error, max_iter, precision_bits)
    lam_fz = _escape_rate_seeded(
        d,
        c,
        z,
        target_error,
        max_iter,
        precision_bits,
        seed_map=lambda zb, cb: bl.badd(bl.bpow_int(zb, d), cb),
    )
    with mp.workprec(max(64, precision_bits)):
        return abs(lam_fz.value - d * lam_z.value) + lam_fz.error_bound + d * lam_z.error_bound


# -- non-archimedean places ------------------------------------------------------


def newton_polygon_slopes(p: IntPolynomial, prime: int) -> list[tuple[Fraction, int]]:
    """Slopes (with horizontal lengths) of the lower hull of (i, v_p(a_i)).

    Root valuations are the negated slopes, each counted with the segment
    length; zero coefficients (infinite valuation) never enter the hull.
    """
    if p.is_zero:
        raise ValueError("newton polygon of the zero polynomial is undefined")
    pts = [(i, valuation(c, prime)) for i, c in enumerate(p.coeffs) if c != 0]
    hull: list[tuple[int, int]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # lower hull: drop the middle point unless strictly below the chord
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return [
        (Fraction(y2 - y1, x2 - x1), x2 - x1)
        for (x1, y1), (x2, y2) in zip(hull[:-1], hull[1:])
    ]


def conjugate_valuations(p: IntPolynomial, prime: int) -> list[tuple[Fraction, int]]:
    """p-adic valuations of the roots (value, multiplicity), by Newton polygon."""
    return [(-slope, length) for slope, length in newton_polygon_slopes(p, prime)]


def nonarch_mass(p: IntPolynomial, prime: int) -> Fraction:
    """sum over roots of max(0, -v_p(root)): the denominator mass at prime.

    For a primitive polynomial this equals v_p(leading coefficient) exactly.
    """
    return sum(
        (max(Fraction(0), -v) * length for v, length in conjugate_valuations(p, prime)),
        Fraction(0),
    )


def green_nonarch(alpha, prime: int, precision_bits: int = DEFAULT_BITS) -> mp.mpf:
    """Averaged escape rate at a finite place:
    (log p / deg) * sum_i max(0, -v_p(alpha_i)) over the conjugates alpha_i."""
    poly, deg = _min_poly_of(alpha)
    mass = nonarch_mass(poly, prime)
    if mass == 0:
        return mp.mpf(0)
    with mp.workprec(max(64, precision_bits)):
        return mp.log(prime) * mp.mpf(mass.numerator) / (mass.denominator * deg)


# -- algebraic numbers -------------------------------------------------------------


@dataclass(frozen=True)
class AlgebraicNumber:
    """A number given by its primitive minimal-candidate polynomial plus an
    isolating ball selecting one root.

    The polynomial must be squarefree with positive leading coefficient;
    irreducibility is not required (heights and Newton polygon masses are
    computed from the full root multiset either way, which is what the
    engine needs).
    """

    min_poly: IntPolynomial
    root_selector: bl.ComplexBall
    degree: int

    @classmethod
    def from_rational(cls, value: Union[int, Fraction]) -> "AlgebraicNumber":
        value = Fraction(value)
        poly = IntPolynomial([-value.numerator, value.denominator])
        with mp.workprec(DEFAULT_BITS):
            sel = bl.exact_ball(value)
        return cls(min_poly=poly, root_selector=sel, degree=1)

    @classmethod
    def from_min_poly(
        cls, coeffs, root_index: int, precision_bits: int = DEFAULT_BITS
    ) -> "AlgebraicNumber":
        poly = coeffs if isinstance(coeffs, IntPolynomial) else IntPolynomial(coeffs)
        poly = poly.primitive_part()
        if not is_squarefree(poly):
            raise ValueError("minimal polynomial must be squarefree")
        roots = all_roots(poly, precision_bits)
        if not 0 <= root_index < len(roots.roots):
            raise ValueError(f"root index {root_index} out of range")
        return cls(
            min_poly=poly, root_selector=roots.roots[root_index], degree=poly.degree
        )

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError("not rational")
        a0, a1 = self.min_poly.coeffs
        return Fraction(-a0, a1)

    def conjugates(self, precision_bits: int = DEFAULT_BITS) -> tuple[bl.ComplexBall, ...]:
        if self.is_rational:
            with mp.workprec(max(64, precision_bits)):
                return (bl.exact_ball(self.as_fraction()),)
        return all_roots(self.min_poly, precision_bits).roots

    def selected_conjugate(self, precision_bits: int = DEFAULT_BITS) -> bl.ComplexBall:
        conj = self.conjugates(precision_bits)
        return min(conj, key=lambda b: abs(b.center - self.root_selector.center))


def _min_poly_of(alpha) -> tuple[IntPolynomial, int]:
    if isinstance(alpha, AlgebraicNumber):
        return alpha.min_poly, alpha.degree
    value = Fraction(alpha)
    return IntPolynomial([-value.numerator, value.denominator]), 1


def as_algebraic(alpha) -> AlgebraicNumber:
    if isinstance(alpha, AlgebraicNumber):
        return alpha
    return AlgebraicNumber.from_rational(Fraction(alpha))


# -- global heights ------------------------------------------------------------------


def weil_height(alpha, precision_bits: int = DEFAULT_BITS) -> mp.mpf:
    """Absolute logarithmic Weil height, in Mahler-measure form:
    (log|lead| + sum_i log^+ |root_i|) / deg."""
    alpha = as_algebraic(alpha)
    conj = alpha.conjugates(precision_bits)
    with mp.workprec(max(64, precision_bits) + 16):
        total = mp.log(abs(alpha.min_poly.lead))
        for b in conj:
            lo, hi = bl.log_plus_interval(b)
            total += (lo + hi) / 2
        return total / alpha.degree


@dataclass(frozen=True)
class PlaceContribution:
    """One place's share of a height sum.

    place: "arch:<index>" for an embedding, or the rational prime.
    weight: local degree mass / global degree (sums to 1 over the
    archimedean block; equals the Newton-polygon mass / degree at a prime).
    """

    place: Union[str, int]
    weight: Fraction
    value: mp.mpf


@dataclass(frozen=True)
class CriticalHeightResult:
    value: mp.mpf
    error_bound: mp.mpf
    undetermined: bool
    contributions: tuple[PlaceContribution, ...]

    def __float__(self) -> float:
        return float(self.value)


def critical_canonical_height(
    d: int,
    alpha,
    precision_bits: int = DEFAULT_BITS,
    target_error: float = 1e-12,
    max_iter: int = DEFAULT_MAX_ITER,
) -> CriticalHeightResult:
    """Canonical height of the critical value of z^d + alpha.

    Averaged archimedean escape rates over all conjugates plus finite-place
    masses; the finite places that can contribute are exactly the primes
    dividing the leading coefficient of the minimal polynomial (elsewhere
    every conjugate is a p-adic integer and log max(1, |.|_p) vanishes).
    Zero iff the map is post-critically finite, up to the numeric verdict:
    conjugates that neither escape nor certify boundedness set the
    undetermined flag, and the value is then a lower bound.
    """
    alpha = as_algebraic(alpha)
    conj = alpha.conjugates(precision_bits)
    contributions: list[PlaceContribution] = []
    undetermined = False
    with mp.workprec(max(64, precision_bits) + 16):
        total = mp.mpf(0)
        err = mp.mpf(0)
        w = Fraction(1, alpha.degree)
        for i, b in enumerate(conj):
            res = escape_rate_arch(d, b, target_error, max_iter, precision_bits)
            if not res.escaped:
                undetermined = True
            contributions.append(PlaceContribution(place=f"arch:{i}", weight=w, value=res.value))
            total += res.value / alpha.degree
            err += res.error_bound / alpha.degree
        lead = abs(alpha.min_poly.lead)
        if lead > 1:
            for prime in sorted(factorize(lead)):
                mass = nonarch_mass(alpha.min_poly, prime)
                if mass == 0:
                    continue
                val = mp.log(prime) * mp.mpf(mass.numerator) / (mass.denominator * alpha.degree)
                contributions.append(
                    PlaceContribution(place=prime, weight=mass / alpha.degree, value=val)
                )
                total += val
        err += mp.mpf(2) ** (-(max(64, precision_bits) // 2))
        return CriticalHeightResult(
            value=total,
            error_bound=err,
            undetermined=undetermined,
            contributions=tuple(contributions),
        )


# -- post-critically finite gate ------------------------------------------------------


def is_pcf_parameter(d: int, alpha, orbit_cap: int = 256) -> bool:
    """Exact decision whether z^d + alpha is post-critically finite.

    PCF parameters are algebraic integers, so any non-monic minimal
    polynomial decides immediately. For algebraic integers the critical
    orbit is iterated exactly in Z[t]/(min_poly): a collision proves PCF; a
    conjugate whose ball iteration certifiably escapes proves the opposite.
    Raises HypothesisUndecided when neither happens within the budget (wildly
    outside desk scale).
    """
    alpha = as_algebraic(alpha)
    if abs(alpha.min_poly.lead) != 1:
        return False
    if alpha.is_rational:
        a = int(alpha.as_fraction())
        bail = 2.0 ** (1.0 / (d - 1)) + abs(a) + 2
        seen = set()
        u = 0
        for _ in range(orbit_cap):
            u = u**d + a
            if u in seen:
                return True
            if abs(u) > bail:
                return False
            seen.add(u)
        raise HypothesisUndecided("integer orbit neither repeated nor escaped")
    # orbit in Z[t]/(A), A monic
    A = (
        alpha.min_poly
        if alpha.min_poly.lead > 0
        else IntPolynomial([-c for c in alpha.min_poly.coeffs])
    )
    u = IntPolynomial([])
    t = IntPolynomial([0, 1])
    seen_polys = set()
    for _ in range(orbit_cap):
        u = (u**d) + t
        _, u = divmod_exact(u, A)
        if u.coeffs in seen_polys:
            return True
        seen_polys.add(u.coeffs)
        if u.max_abs_coeff().bit_length() > 1 << 14:
            break
    for b in alpha.conjugates(DEFAULT_BITS):
        res = escape_rate_arch(d, b, target_error=1e-6, max_iter=4096)
        if res.escaped:
            return False
    raise HypothesisUndecided("orbit neither repeated nor certifiably escaped")
