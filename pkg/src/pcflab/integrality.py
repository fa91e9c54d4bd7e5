"""S-integrality of PCF parameters relative to a base point, via resultants.

Two conjugates meet at a finite place exactly when they fall into the same
residue class there. For a monic factor B (PCF parameters are algebraic
integers) and the primitive minimal polynomial A of the base point, the
candidate primes come from the prime support of Res(B, A); where A is
non-integral (p divides its leading coefficient) the resultant normalization
is ambiguous, and the verdict is settled by the exact residue-field test:
B mod p and A mod p share a root in the algebraic closure of F_p iff their
gcd over F_p is nonconstant (the non-integral conjugates of A drop out of the
reduction, which is exactly what the definition requires).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

from .critical_orbit import FactorDescriptor, enumerate_factors
from .errors import HypothesisViolated
from .heights import AlgebraicNumber, as_algebraic, is_pcf_parameter
from .numtheory import factorize, is_prime, valuation
from .polynomials import IntPolynomial, resultant


@dataclass(frozen=True)
class PrimeSet:
    """Finite set of rational primes; the archimedean place is always implied."""

    primes: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.primes)) != len(self.primes):
            raise ValueError("duplicate primes")
        if list(self.primes) != sorted(self.primes):
            raise ValueError("primes must be sorted")
        for p in self.primes:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")

    @classmethod
    def of(cls, primes: Iterable[int]) -> "PrimeSet":
        return cls(tuple(sorted(set(int(p) for p in primes))))

    def __contains__(self, p: int) -> bool:
        return p in self.primes

    def __len__(self) -> int:
        return len(self.primes)


@dataclass(frozen=True)
class IntegralityVerdict:
    meeting_primes: frozenset[int]
    is_S_integral: bool
    method: str  # "resultant-fast" | "newton-exact"


def _factor_poly(x_factor) -> IntPolynomial:
    if isinstance(x_factor, FactorDescriptor):
        return x_factor.poly
    return x_factor


def meeting_primes_fast(B: IntPolynomial, A: IntPolynomial) -> set[int]:
    """Primes p with v_p(Res(B, A)) > deg(B) * v_p(lead(A)).

    B must be monic. Away from lead(A) this is exactly "p divides the
    resultant"; on primes dividing lead(A) it is a conservative normalization
    that is_S_integral refines with the exact residue test.
    """
    if not B.is_monic:
        raise ValueError("factor polynomial must be monic")
    r = resultant(B, A)
    if r == 0:
        raise ValueError("factor shares a root with the base point")
    out = set()
    lead = abs(A.lead)
    candidates = set(factorize(abs(r))) if abs(r) > 1 else set()
    candidates |= set(factorize(lead)) if lead > 1 else set()
    for p in candidates:
        vr = valuation(r, p) if r % p == 0 else 0
        vl = valuation(lead, p) if lead % p == 0 else 0
        if vr > B.degree * vl:
            out.add(p)
    return out


def _poly_mod(p: IntPolynomial, prime: int) -> list[int]:
    coeffs = [c % prime for c in p.coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def _gcd_mod(a: list[int], b: list[int], prime: int) -> list[int]:
    while b:
        inv = pow(b[-1], prime - 2, prime)
        while len(a) >= len(b):
            f = a[-1] * inv % prime
            if f:
                off = len(a) - len(b)
                for i, c in enumerate(b):
                    a[off + i] = (a[off + i] - f * c) % prime
            a.pop()
            while a and a[-1] == 0:
                a.pop()
        a, b = b, a
    return a


def meeting_test_exact(B: IntPolynomial, A: IntPolynomial, p: int) -> bool:
    """Whether some integral conjugate pair meets at p (residue-field gcd).

    The reduction of A mod p is, up to a unit, the reduction of its integral
    slope factor, so its roots in the residue field are exactly the
    reductions of the p-integral conjugates; pairs where the base conjugate
    is non-integral can never meet a monic B. The decision is complete --
    no lifting cutoff is involved.
    """
    if not B.is_monic:
        raise ValueError("factor polynomial must be monic")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    bbar = _poly_mod(B, p)
    abar = _poly_mod(A, p)
    if len(abar) <= 1:
        # every conjugate of the base is non-integral at p (or A is a unit):
        # a monic factor stays integral, so the residue classes never collide
        return False
    g = _gcd_mod(bbar, abar, p)
    return len(g) > 1


def is_S_integral(
    x_factor: Union[FactorDescriptor, IntPolynomial],
    alpha: Union[AlgebraicNumber, Fraction, int],
    S: Union[PrimeSet, Iterable[int]],
) -> IntegralityVerdict:
    """Verdict for one squarefree monic factor against the base point.

    Fast resultant support everywhere, refined by the exact residue test on
    the primes dividing lead(A), where the fast normalization can misreport.
    """
    if not isinstance(S, PrimeSet):
        S = PrimeSet.of(S)
    B = _factor_poly(x_factor)
    A = as_algebraic(alpha).min_poly
    meeting = meeting_primes_fast(B, A)
    lead = abs(A.lead)
    method = "resultant-fast"
    if lead > 1:
        method = "newton-exact"
        for p in factorize(lead):
            if meeting_test_exact(B, A, p):
                meeting.add(p)
            else:
                meeting.discard(p)
    meeting_frozen = frozenset(meeting)
    return IntegralityVerdict(
        meeting_primes=meeting_frozen,
        is_S_integral=meeting_frozen.issubset(set(S.primes)),
        method=method,
    )


@dataclass(frozen=True)
class CensusRow:
    kind: str
    m: Optional[int]
    n: int
    degree: int
    meeting_primes: tuple[int, ...]
    is_S_integral: bool

    @property
    def label(self) -> str:
        if self.kind == "exact-period":
            return f"period-{self.n}"
        return f"misiurewicz-{self.m}-{self.n}"


@dataclass(frozen=True)
class CensusResult:
    d: int
    max_n: int
    alpha_label: str
    S: PrimeSet
    rows: tuple[CensusRow, ...]
    threshold: float  # orbit-size threshold shape C1 |S|^3 D^8

    @property
    def s_integral_count(self) -> int:
        return sum(1 for r in self.rows if r.is_S_integral)

    def to_tsv(self) -> str:
        lines = ["kind\tm\tn\tdegree\tmeeting_primes\tS_integral"]
        for r in self.rows:
            primes = ",".join(str(p) for p in r.meeting_primes) if r.meeting_primes else "-"
            lines.append(
                f"{r.kind}\t{r.m if r.m is not None else '-'}\t{r.n}\t{r.degree}"
                f"\t{primes}\t{'yes' if r.is_S_integral else 'no'}"
            )
        return "\n".join(lines) + "\n"


def census(
    d: int,
    max_n: int,
    alpha,
    S: Union[PrimeSet, Iterable[int]],
    include_misiurewicz: bool = True,
    threshold_C1: float = 1.0,
    cap: int = 4096,
) -> CensusResult:
    """Integrality verdicts for every factor up to level max_n.

    Strictly enforces the theorem hypothesis: a post-critically finite base
    point is rejected with HypothesisViolated. Misiurewicz rows use the
    strictly-preperiodic part and are skipped when it is trivial.
    """
    if not isinstance(S, PrimeSet):
        S = PrimeSet.of(S)
    alpha = as_algebraic(alpha)
    if is_pcf_parameter(d, alpha):
        raise HypothesisViolated("base point is post-critically finite")
    field_degree = alpha.degree
    from .bounds import thm15_threshold

    rows = []
    for desc in enumerate_factors(d, max_n, include_misiurewicz, cap):
        poly = desc.poly if desc.kind == "exact-period" else desc.strict_poly
        if poly is None or poly.degree < 1:
            continue
        verdict = is_S_integral(poly, alpha, S)
        rows.append(
            CensusRow(
                kind=desc.kind,
                m=desc.m,
                n=desc.n,
                degree=poly.degree,
                meeting_primes=tuple(sorted(verdict.meeting_primes)),
                is_S_integral=verdict.is_S_integral,
            )
        )
    if alpha.is_rational:
        alpha_label = str(alpha.as_fraction())
    else:
        alpha_label = f"deg{alpha.degree}:" + ",".join(str(c) for c in alpha.min_poly.coeffs)
    return CensusResult(
        d=d,
        max_n=max_n,
        alpha_label=alpha_label,
        S=S,
        rows=tuple(rows),
        threshold=thm15_threshold(threshold_C1, max(1, len(S) + 1), field_degree),
    )
