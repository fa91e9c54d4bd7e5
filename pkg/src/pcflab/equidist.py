"""Quantitative equidistribution experiments for PCF parameter sets.

The empirical average of log|x - alpha| over the degree-d^(n-1) parameter set
at level n has an exact algebraic form when alpha is rational: the set is the
root multiset of the monic g_n, so the average is log|g_n(alpha)| / d^(n-1),
evaluated with exact rational arithmetic through the orbit recurrence. The
limit object it converges to is the archimedean escape rate of alpha, which
the heights module computes independently by tail-bounded iteration; the
discrepancy reports compare the two against the (log N / N)^(1/2) rate shape
with the ineffective constant exposed as a knob (default 1, with the fitted
minimal value recorded).

Algebraic alphas take the numeric route: certified root balls plus outward
rounded kernel sums.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import mpmath as mp

from . import balls as bl
from .critical_orbit import gleason, gleason_evaluator
from .errors import HypothesisViolated, KernelSingular
from .heights import (
    as_algebraic,
    critical_canonical_height,
    escape_rate_arch,
    green_nonarch,
    is_pcf_parameter,
)
from .rootfinder import PCFParameterSet, all_roots


@dataclass(frozen=True)
class KernelSpec:
    """Log-distance kernel: plain log|x - alpha|, or the bounded truncation
    log^+|x| + log^+|alpha| - log max(tau, |x - alpha|)."""

    kind: str = "plain-log"
    tau: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("plain-log", "truncated"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "truncated":
            if self.tau is None or not 0 < self.tau < 1:
                raise ValueError("truncated kernel needs 0 < tau < 1")


@dataclass(frozen=True)
class AvgResult:
    value: mp.mpf
    error_bound: mp.mpf


def exact_orbit_value(d: int, n: int, alpha: Fraction) -> Fraction:
    """g_n(alpha) as an exact rational, via u <- u^d + alpha."""
    u = Fraction(0)
    for _ in range(n):
        u = u**d + alpha
    return u


def avg_log_distance_vieta(
    d: int, n: int, alpha: Union[Fraction, int], precision_bits: int = 256
) -> mp.mpf:
    """(1/d^(n-1)) log|g_n(alpha)|, exact rational evaluation then one log."""
    alpha = Fraction(alpha)
    value = exact_orbit_value(d, n, alpha)
    if value == 0:
        raise KernelSingular(f"alpha={alpha} is a level-{n} PCF parameter")
    with mp.workprec(max(64, precision_bits)):
        num = abs(value.numerator)
        den = value.denominator
        return (mp.log(mp.mpf(num)) - mp.log(mp.mpf(den))) / mp.mpf(d) ** (n - 1)


def truncated_kernel(x, alpha, tau: float) -> mp.mpf:
    """log^+|x| + log^+|alpha| - log max(tau, |x - alpha|) at ball centers."""
    if not 0 < tau < 1:
        raise ValueError("need 0 < tau < 1")

    def to_ball(v):
        if isinstance(v, bl.ComplexBall):
            return v
        if isinstance(v, (int, Fraction)):
            return bl.exact_ball(v)
        return bl.ball(v)

    xb = to_ball(x)
    ab = to_ball(alpha)
    ax = abs(xb.center)
    aa = abs(ab.center)
    dist = abs(xb.center - ab.center)
    out = mp.mpf(0)
    if ax > 1:
        out += mp.log(ax)
    if aa > 1:
        out += mp.log(aa)
    out -= mp.log(max(mp.mpf(tau), dist))
    return out


def avg_log_distance_roots(
    roots: Union[PCFParameterSet, Sequence[bl.ComplexBall]],
    alpha: bl.ComplexBall,
    kernel: KernelSpec = KernelSpec(),
) -> AvgResult:
    """Outward-rounded kernel average over certified root balls.

    The plain-log kernel requires alpha's ball to be disjoint from every root
    ball (otherwise the kernel is unbounded on the data: KernelSingular).
    """
    balls = roots.roots if isinstance(roots, PCFParameterSet) else tuple(roots)
    if not balls:
        raise ValueError("empty root set")
    total = mp.mpf(0)
    halfwidth = mp.mpf(0)
    if kernel.kind == "plain-log":
        for b in balls:
            lo, hi = bl.dist_bounds(b, alpha)
            if lo <= 0:
                raise KernelSingular("alpha ball overlaps a root ball")
            llo, lhi = mp.log(lo), mp.log(hi)
            total += (llo + lhi) / 2
            halfwidth += (lhi - llo) / 2
    else:
        tau = mp.mpf(kernel.tau)
        for b in balls:
            xplo, xphi = bl.log_plus_interval(b)
            aplo, aphi = bl.log_plus_interval(alpha)
            dlo, dhi = bl.dist_bounds(b, alpha)
            mlo, mhi = mp.log(max(tau, dlo)), mp.log(max(tau, dhi))
            lo = xplo + aplo - mhi
            hi = xphi + aphi - mlo
            total += (lo + hi) / 2
            halfwidth += (hi - lo) / 2
    n = len(balls)
    return AvgResult(value=total / n, error_bound=halfwidth / n)


@dataclass(frozen=True)
class DiscrepancyReport:
    d: int
    n: int
    N: int
    alpha: object  # AlgebraicNumber (or the Fraction it wraps)
    alpha_label: str
    empirical_avg: mp.mpf
    green_value: mp.mpf
    discrepancy: mp.mpf
    rhs_bound: mp.mpf
    tau: float
    C: float
    passed: bool
    path: str  # "vieta-exact" | "roots-numeric"

    def tsv_row(self) -> str:
        return "\t".join(
            [
                str(self.d),
                str(self.n),
                str(self.N),
                self.alpha_label,
                mp.nstr(self.empirical_avg, 12),
                mp.nstr(self.green_value, 12),
                mp.nstr(self.discrepancy, 6),
                mp.nstr(self.rhs_bound, 6),
                f"{self.tau:g}",
                f"{self.C:g}",
                "pass" if self.passed else "FAIL",
                self.path,
            ]
        )


TSV_HEADER = "d\tn\tN\talpha\tempirical\tgreen\tdiscrepancy\trhs_bound\ttau\tC\tverdict\tpath"


def discrepancy_report(
    d: int,
    n: int,
    alpha,
    tau: float = 0.5,
    C: float = 1.0,
    precision_bits: int = 256,
    roots: Optional[PCFParameterSet] = None,
) -> DiscrepancyReport:
    """Empirical kernel average at level n vs the escape rate of alpha,
    against the rate shape C (log N / N)^(1/2) (log^+|alpha| + 1/tau)."""
    if not 0 < tau < 1:
        raise ValueError("need 0 < tau < 1")
    alg = as_algebraic(alpha)
    if is_pcf_parameter(d, alg):
        raise HypothesisViolated("alpha is a PCF parameter")
    big_n = d ** (n - 1)
    with mp.workprec(max(64, precision_bits) + 16):
        if alg.is_rational:
            a = alg.as_fraction()
            empirical = avg_log_distance_vieta(d, n, a, precision_bits)
            green = escape_rate_arch(d, a, target_error=1e-14, precision_bits=precision_bits)
            alpha_ball = bl.exact_ball(a)
            path = "vieta-exact"
            label = str(a)
        else:
            if roots is None:
                roots = all_roots(
                    gleason(d, n).poly, precision_bits, evaluator=gleason_evaluator(d, n)
                )
            alpha_ball = alg.selected_conjugate(precision_bits)
            empirical = avg_log_distance_roots(roots, alpha_ball).value
            green = escape_rate_arch(
                d, alpha_ball, target_error=1e-14, precision_bits=precision_bits
            )
            path = "roots-numeric"
            label = "deg%d:%s" % (alg.degree, ",".join(str(c) for c in alg.min_poly.coeffs))
        disc = abs(empirical - green.value)
        logplus = max(mp.mpf(0), mp.log(max(abs(alpha_ball.center), mp.mpf(1))))
        rhs = mp.mpf(C) * mp.sqrt(mp.log(big_n) / big_n) * (logplus + 1 / mp.mpf(tau))
        return DiscrepancyReport(
            d=d,
            n=n,
            N=big_n,
            alpha=alg,
            alpha_label=label,
            empirical_avg=empirical,
            green_value=green.value,
            discrepancy=disc,
            rhs_bound=rhs,
            tau=tau,
            C=C,
            passed=bool(disc <= rhs),
            path=path,
        )


def fitted_min_constant(reports: Sequence[DiscrepancyReport]) -> float:
    """Smallest C that would make every report pass (the recorded fit)."""
    worst = mp.mpf(0)
    for r in reports:
        scale = r.rhs_bound / r.C
        worst = max(worst, r.discrepancy / scale)
    return float(worst)


@dataclass(frozen=True)
class PairingResult:
    """Place-by-place pairing sum versus the critical canonical height."""

    value: mp.mpf
    canonical_height: mp.mpf
    difference: mp.mpf
    tolerance: mp.mpf
    agrees: Optional[bool]  # None when S misses contributing finite places

    def __float__(self) -> float:
        return float(self.value)


def pairing_crosscheck(d: int, alpha, S, precision_bits: int = 256) -> PairingResult:
    """Sum over the places in S of the closed-form kernel integrals.

    Archimedean places contribute per-embedding escape rates (the kernel
    integral against the bifurcation measure is the escape rate); finite
    places contribute log max(1, |alpha|_p) masses. When S covers every
    prime dividing lead(min_poly), the total must match the critical
    canonical height within the numeric tolerances.
    """
    from .integrality import PrimeSet

    alg = as_algebraic(alpha)
    if is_pcf_parameter(d, alg):
        raise HypothesisViolated("alpha is a PCF parameter")
    primes = tuple(S.primes) if isinstance(S, PrimeSet) else tuple(sorted(set(S)))
    with mp.workprec(max(64, precision_bits) + 16):
        total = mp.mpf(0)
        err = mp.mpf(0)
        for b in alg.conjugates(precision_bits):
            res = escape_rate_arch(d, b, target_error=1e-14, precision_bits=precision_bits)
            total += res.value / alg.degree
            err += res.error_bound / alg.degree
        for p in primes:
            total += green_nonarch(alg, p, precision_bits)
        ch = critical_canonical_height(d, alg, precision_bits, target_error=1e-14)
        lead = abs(alg.min_poly.lead)
        covered = all(lead % p != 0 or p in primes for p in _prime_support(lead))
        diff = abs(total - ch.value)
        tol = err + ch.error_bound + mp.mpf(2) ** (-(precision_bits // 2))
        return PairingResult(
            value=total,
            canonical_height=ch.value,
            difference=diff,
            tolerance=tol,
            agrees=bool(diff <= tol) if covered else None,
        )


def _prime_support(n: int) -> tuple[int, ...]:
    from .numtheory import factorize

    return tuple(sorted(factorize(n))) if n > 1 else ()
