"""Certified simultaneous root finding for integer polynomials.

Pipeline: deterministic starting points on root-modulus annuli (fixed 0.4 rad
offset, pure function of the coefficients, so cache files are
byte-reproducible), a vectorized float64 Aberth-Ehrlich stage, per-root Newton
polishing at escalating mpmath precision, then an outward-rounded
certification pass. The certificate per approximation z is the classical
inclusion disk of radius deg * |p(z)/p'(z)| (at least one root lies inside,
because p'/p is the sum of reciprocal root distances); when all deg disks are
pairwise disjoint, each contains exactly one root and the set is a complete
isolation certificate.

Critical-orbit polynomials get orbit-recurrence evaluators from
pcflab.critical_orbit; everything else goes through plain Horner on the exact
coefficients.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import mpmath as mp
import numpy as np

from . import balls as bl
from .cacheio import atomic_write_text
from .errors import NonSquarefreeInput, PrecisionExhausted
from .polynomials import IntPolynomial, is_squarefree, serialize

DEFAULT_PRECISION_BITS = 256
MAX_PRECISION_BITS = 4096
_START_ANGLE_OFFSET = 0.4  # radians; fixed for reproducibility


class CoefficientEvaluator:
    """Horner evaluation from the exact coefficients.

    The float64 path scales the whole polynomial by a power of two (which
    moves no roots); it is disabled when the coefficients are too wide to
    survive the scaling, in which case the finder runs its slow arbitrary
    precision sweep stage instead.
    """

    def __init__(self, p: IntPolynomial):
        self.poly = p
        self.dpoly = p.derivative()
        self.degree = p.degree
        self.coeff_bits = p.max_abs_coeff().bit_length()
        self.f64_ok = self.coeff_bits <= 900
        self.root_radius = None
        shift = max(0, self.coeff_bits - 500)
        self._c64 = np.array(
            [float(Fraction(c, 1 << shift)) for c in p.coeffs], dtype=np.float64
        )
        self._d64 = np.array(
            [float(Fraction(c, 1 << shift)) for c in self.dpoly.coeffs], dtype=np.float64
        )

    def newton_f64(self, z: np.ndarray) -> np.ndarray:
        with np.errstate(all="ignore"):
            pv = np.zeros_like(z)
            for c in self._c64[::-1]:
                pv = pv * z + c
            dv = np.zeros_like(z)
            for c in self._d64[::-1]:
                dv = dv * z + c
            return pv / dv

    def newton_mp(self, z):
        pv = mp.mpc(0)
        for c in reversed(self.poly.coeffs):
            pv = pv * z + c
        dv = mp.mpc(0)
        for c in reversed(self.dpoly.coeffs):
            dv = dv * z + c
        return pv / dv

    def value_deriv_ball(self, zb: bl.ComplexBall):
        return _ball_horner(self.poly.coeffs, zb), _ball_horner(self.dpoly.coeffs, zb)


def _ball_horner(coeffs: Sequence[int], zb: bl.ComplexBall) -> bl.ComplexBall:
    acc = bl.exact_ball(0)
    for c in reversed(coeffs):
        acc = bl.badd(bl.bmul(acc, zb), bl.exact_ball(c))
    return acc


class QuotientEvaluator:
    """Evaluator for target = base/cofactor with a small exact cofactor.

    The cofactor can share roots with the target (one multiplicity layer of a
    repeated root stays in each), so near cofactor roots the quotient form is
    0/0; those few points fall back to plain Horner on the target's exact
    coefficients.
    """

    def __init__(self, base, cofactor: IntPolynomial, poly: IntPolynomial, root_radius):
        self.base = base
        self.cofactor = cofactor
        self.dcofactor = cofactor.derivative()
        self.poly = poly
        self.dpoly = poly.derivative()
        self.degree = poly.degree
        self.root_radius = root_radius
        shift = max(0, cofactor.max_abs_coeff().bit_length() - 500)
        self.f64_ok = base.f64_ok and cofactor.max_abs_coeff().bit_length() <= 900
        self._s64 = np.array(
            [float(Fraction(c, 1 << shift)) for c in cofactor.coeffs], dtype=np.float64
        )
        self._ds64 = np.array(
            [float(Fraction(c, 1 << shift)) for c in self.dcofactor.coeffs], dtype=np.float64
        )

    def newton_f64(self, z: np.ndarray) -> np.ndarray:
        with np.errstate(all="ignore"):
            nb = self.base.newton_f64(z)
            sv = np.zeros_like(z)
            for c in self._s64[::-1]:
                sv = sv * z + c
            dsv = np.zeros_like(z)
            for c in self._ds64[::-1]:
                dsv = dsv * z + c
            return 1.0 / (1.0 / nb - dsv / sv)

    def _direct_newton_mp(self, z):
        pv = mp.mpc(0)
        for c in reversed(self.poly.coeffs):
            pv = pv * z + c
        dv = mp.mpc(0)
        for c in reversed(self.dpoly.coeffs):
            dv = dv * z + c
        return pv / dv

    def newton_mp(self, z):
        sv = mp.mpc(0)
        for c in reversed(self.cofactor.coeffs):
            sv = sv * z + c
        if abs(sv) < mp.mpf(2) ** (-(mp.mp.prec // 2)):
            return self._direct_newton_mp(z)
        dsv = mp.mpc(0)
        for c in reversed(self.dcofactor.coeffs):
            dsv = dsv * z + c
        nb = self.base.newton_mp(z)
        return 1 / (1 / nb - dsv / sv)

    def value_deriv_ball(self, zb: bl.ComplexBall):
        sval = _ball_horner(self.cofactor.coeffs, zb)
        if sval.contains_zero():
            return (
                _ball_horner(self.poly.coeffs, zb),
                _ball_horner(self.dpoly.coeffs, zb),
            )
        bval, bder = self.base.value_deriv_ball(zb)
        sder = _ball_horner(self.dcofactor.coeffs, zb)
        val = bl.bdiv(bval, sval)
        der = bl.bdiv(bl.bsub(bder, bl.bmul(val, sder)), sval)
        return val, der


@dataclass(frozen=True)
class PCFParameterSet:
    """Certified, isolated roots of one factor polynomial, sorted by center."""

    source: object  # FactorDescriptor or IntPolynomial
    precision_bits: int
    roots: tuple[bl.ComplexBall, ...]

    def __len__(self) -> int:
        return len(self.roots)


# -- starting points ----------------------------------------------------------


def _log2_abs(c: int) -> float:
    bits = abs(c).bit_length()
    return float(np.log2(abs(c) >> max(0, bits - 64)) + max(0, bits - 64))


def _start_radius_log2(p: IntPolynomial, evaluator) -> float:
    """log2 of the outer start-circle radius (Fujiwara bound, capped by any
    a-priori root bound the evaluator knows)."""
    coeffs = p.coeffs
    n = p.degree
    log2_lead = _log2_abs(coeffs[-1])
    fujiwara = -np.inf
    for i, c in enumerate(coeffs[:-1]):
        if c == 0:
            continue
        fujiwara = max(fujiwara, (_log2_abs(c) - log2_lead) / (n - i))
    radius_log2 = 1.0 + (0.0 if fujiwara == -np.inf else fujiwara) + 0.0625
    if evaluator is not None and getattr(evaluator, "root_radius", None):
        radius_log2 = min(radius_log2, np.log2(evaluator.root_radius * 1.0625 + 0.0625))
    return float(radius_log2)


def _start_points(p: IntPolynomial, evaluator) -> list[tuple[float, float]]:
    """Deterministic initial points as (log2 radius, angle) pairs.

    Root-modulus estimates come from the upper convex hull of (i, log|a_i|)
    (Bini's initialization): each hull edge from index i0 to i1 contributes
    i1 - i0 points on a circle of radius (|a_i0| / |a_i1|)^(1/(i1-i0)). This
    places starts in the right annuli, so sweep counts stay roughly
    degree-free. Angles carry the fixed 0.4 rad offset plus a per-edge
    stagger; everything is a pure function of the coefficients, so cache
    files reproduce exactly.
    """
    n = p.degree
    cap = _start_radius_log2(p, evaluator)
    pts = [(i, _log2_abs(c)) for i, c in enumerate(p.coeffs) if c != 0]
    hull: list[tuple[int, float]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # pop the middle point unless it lies strictly above the chord
            if (y2 - y1) * (pt[0] - x1) <= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    out: list[tuple[float, float]] = []
    for (i0, y0), (i1, y1) in zip(hull[:-1], hull[1:]):
        k = i1 - i0
        rlog = min((y0 - y1) / k, cap)
        for j in range(k):
            ang = 2.0 * np.pi * (j + 0.5 * (i0 % 3)) / k + _START_ANGLE_OFFSET + 0.13 * i0
            out.append((rlog, ang))
    if len(out) != n:  # degenerate hull (shouldn't happen); one circle fallback
        out = [
            (cap, 2.0 * np.pi * j / n + _START_ANGLE_OFFSET) for j in range(n)
        ]
    return out


def _starts_f64(p: IntPolynomial, evaluator) -> np.ndarray:
    pts = _start_points(p, evaluator)
    rl = np.clip(np.array([r for r, _ in pts]), -1000.0, 1000.0)
    ang = np.array([a for _, a in pts])
    return np.exp2(rl) * np.exp(1j * ang)


def _starts_mp(p: IntPolynomial, evaluator) -> list:
    pts = _start_points(p, evaluator)
    out = []
    for rl, ang in pts:
        r = mp.mpf(2) ** mp.mpf(rl)
        out.append(r * mp.mpc(mp.cos(ang), mp.sin(ang)))
    return out


# -- float64 Aberth stage -------------------------------------------------------


def _pairwise_inv_sum(z: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """sum_k 1/(z_i - z_k) for the selected rows i (k runs over everything)."""
    out = np.empty(idx.size, dtype=np.complex128)
    block = 512
    with np.errstate(all="ignore"):
        for b0 in range(0, idx.size, block):
            sel = idx[b0 : b0 + block]
            diff = z[sel, None] - z[None, :]
            diff[np.arange(sel.size), sel] = np.inf
            out[b0 : b0 + sel.size] = (1.0 / diff).sum(axis=1)
    return out


def _aberth_f64(evaluator, z0: np.ndarray, max_sweeps: int = 800, tol: float = 5e-14):
    """Jacobi-style Aberth sweeps; converged points freeze (but keep repelling)."""
    z = z0.copy()
    n = z.size
    nudge = 0.01 + 0.017j
    active = np.arange(n)
    settle = np.zeros(n, dtype=np.int64)  # consecutive small-step sweeps per point
    for _ in range(max_sweeps):
        with np.errstate(all="ignore"):
            za = z[active]
            nray = evaluator.newton_f64(za)
            bad = ~np.isfinite(nray)
            if bad.any():
                za[bad] = za[bad] * (1 + 1e-9) + nudge * 1e-9 * (1 + np.abs(za[bad]))
                z[active] = za
                nray[bad] = 0.0
            s = _pairwise_inv_sum(z, active)
            denom = 1.0 - nray * s
            w = nray / denom
            nf = ~np.isfinite(w)
            w[nf] = nray[nf]
            mag = np.abs(w)
            lim = 0.35 * (1.0 + np.abs(za))
            over = mag > lim
            if over.any():
                w[over] *= lim[over] / mag[over]
            za = za - w
            z[active] = za
            rel = np.abs(w) / (1.0 + np.abs(za))
            ok = np.isfinite(rel) & (rel < tol) & ~bad
            settle[active] = np.where(ok, settle[active] + 1, 0)
            active = np.nonzero(settle < 2)[0]
            if active.size == 0:
                break
    return z


def _aberth_mp(evaluator, zs: list, sweeps: int) -> list:
    n = len(zs)
    for _ in range(sweeps):
        moved = mp.mpf(0)
        for j in range(n):
            try:
                nray = evaluator.newton_mp(zs[j])
            except ZeroDivisionError:
                continue
            s = mp.mpc(0)
            for k in range(n):
                if k != j:
                    diff = zs[j] - zs[k]
                    if diff != 0:
                        s += 1 / diff
            denom = 1 - nray * s
            w = nray / denom if denom != 0 else nray
            zs[j] = zs[j] - w
            moved = max(moved, abs(w) / (1 + abs(zs[j])))
        if moved < mp.mpf(2) ** (-mp.mp.prec + 8):
            break
    return zs


# -- certification --------------------------------------------------------------


def _certify(evaluator, zs: list, degree: int, precision_bits: int):
    """Inclusion disks deg*|p/p'| per point, or None when any test fails."""
    target_rel = mp.mpf(2) ** (-(precision_bits // 2))
    out = []
    for z in zs:
        zb = bl.ComplexBall(mp.mpc(z), mp.mpf(0))
        try:
            val, der = evaluator.value_deriv_ball(zb)
        except ZeroDivisionError:
            return None
        der_lo = der.abs_bounds()[0]
        if der_lo <= 0:
            return None
        rad = (degree * val.abs_bounds()[1] / der_lo) * mp.mpf("1.0000001")
        if not mp.isfinite(rad) or rad > target_rel * (1 + abs(zb.center)):
            return None
        out.append(bl.ComplexBall(zb.center, rad))
    # pairwise disjointness: float64 prefilter with a margin that dominates
    # the center-rounding error, exact ball recheck for anything close
    cf = np.array([complex(b.center) for b in out], dtype=np.complex128)
    rf = np.array([float(b.radius) for b in out], dtype=np.float64)
    n = len(out)
    block = n if n <= 1024 else 512
    suspects = []
    for i0 in range(0, n, block):
        i1 = min(i0 + block, n)
        dist = np.abs(cf[i0:i1, None] - cf[None, :])
        rsum = rf[i0:i1, None] + rf[None, :]
        idx = np.arange(i0, i1)
        dist[idx - i0, idx] = np.inf
        close = (dist * (1 - 1e-7) <= rsum + 1e-290) | (dist < 1e-6)
        ii, jj = np.nonzero(close)
        suspects.extend(zip((ii + i0).tolist(), jj.tolist()))
    for i, j in suspects:
        if i >= j:
            continue
        if not bl.disjoint(out[i], out[j]):
            return None
    return out


def _sort_key(b: bl.ComplexBall):
    return (b.center.real, b.center.imag, b.radius)


def all_roots(
    p: IntPolynomial,
    precision_bits: int = DEFAULT_PRECISION_BITS,
    evaluator=None,
    max_precision: int = MAX_PRECISION_BITS,
    source=None,
) -> PCFParameterSet:
    """All complex roots of a squarefree p with disjoint certified disks.

    Raises NonSquarefreeInput when gcd(p, p') is nonconstant, and
    PrecisionExhausted when certification still fails at max_precision.
    """
    if p.degree < 1:
        raise ValueError("need degree >= 1")
    if not is_squarefree(p):
        raise NonSquarefreeInput("apply squarefree_part before root finding")
    degree = p.degree
    if evaluator is None:
        evaluator = CoefficientEvaluator(p)

    if degree == 1:
        a0, a1 = p.coeffs
        with mp.workprec(precision_bits + 16):
            root = bl.exact_ball(Fraction(-a0, a1))
        return PCFParameterSet(source if source is not None else p, precision_bits, (root,))

    if evaluator.f64_ok:
        approx = _aberth_f64(evaluator, _starts_f64(p, evaluator))
        zs0 = [mp.mpc(z) for z in approx]
        stage_a_prec = 53
    else:
        stage_a_prec = max(128, getattr(evaluator, "coeff_bits", 0) + 64)
        with mp.workprec(stage_a_prec):
            zs0 = _aberth_mp(evaluator, _starts_mp(p, evaluator), sweeps=200)

    wp = max(precision_bits + 64, stage_a_prec + 16)
    wp_limit = max(max_precision + 64, wp)  # always at least one pass
    zs = zs0
    extra_sweeps = 0
    while wp <= wp_limit:
        with mp.workprec(wp):
            zs = [mp.mpc(z) for z in zs]
            if extra_sweeps:
                zs = _aberth_mp(evaluator, zs, sweeps=extra_sweeps)
            step_tol = mp.mpf(2) ** (-(precision_bits + 24))
            for j in range(degree):
                z = zs[j]
                for _ in range(10):
                    try:
                        w = evaluator.newton_mp(z)
                    except ZeroDivisionError:
                        break
                    if not mp.isfinite(w.real) or not mp.isfinite(w.imag):
                        break
                    z = z - w
                    if abs(w) <= step_tol * (1 + abs(z)):
                        break
                zs[j] = z
            certified = _certify(evaluator, zs, degree, precision_bits)
            if certified is not None:
                certified.sort(key=_sort_key)
                return PCFParameterSet(
                    source if source is not None else p, precision_bits, tuple(certified)
                )
        wp *= 2
        extra_sweeps = 4
    raise PrecisionExhausted(
        f"could not certify {degree} disjoint root disks at {max_precision} bits"
    )


# -- derived queries -------------------------------------------------------------


def min_pairwise_distance(roots: PCFParameterSet | Sequence[bl.ComplexBall]) -> mp.mpf:
    """Rigorous lower bound on the minimum pairwise root distance."""
    balls = roots.roots if isinstance(roots, PCFParameterSet) else tuple(roots)
    if len(balls) < 2:
        raise ValueError("need at least two roots")
    cf = np.array([complex(b.center) for b in balls])
    n = len(balls)
    dist = np.abs(cf[:, None] - cf[None, :])
    np.fill_diagonal(dist, np.inf)
    # exact outward-rounded recheck of every pair whose float64 distance is
    # within a relative margin of the float64 minimum (the margin dwarfs the
    # center-rounding error, so the true minimizing pair is always included)
    cutoff = dist.min() * (1 + 1e-6) + 1e-300
    best = None
    for i, j in zip(*np.nonzero(dist <= cutoff)):
        if i >= j:
            continue
        lo = bl.dist_bounds(balls[i], balls[j])[0]
        best = lo if best is None else min(best, lo)
    return best


def closest_root_to(
    roots: PCFParameterSet | Sequence[bl.ComplexBall], alpha: bl.ComplexBall
) -> tuple[int, tuple[mp.mpf, mp.mpf]]:
    """Index of the root nearest alpha plus rigorous (lower, upper) distance bounds.

    Ties on overlapping bounds resolve by center distance, then index.
    """
    balls = roots.roots if isinstance(roots, PCFParameterSet) else tuple(roots)
    if not balls:
        raise ValueError("empty root set")
    best_idx = 0
    best_center = None
    for i, b in enumerate(balls):
        dc = abs(b.center - alpha.center)
        if best_center is None or dc < best_center:
            best_center = dc
            best_idx = i
    return best_idx, bl.dist_bounds(balls[best_idx], alpha)


# -- cache files ------------------------------------------------------------------


def poly_hash(p: IntPolynomial) -> str:
    return hashlib.sha256(serialize(p).encode()).hexdigest()


def _mpf_token(x: mp.mpf) -> str:
    # exact (sign, mantissa, exponent) triple; stable across runs by construction
    sign, man, exp, _bc = x._mpf_
    return f"{sign}:{man:x}:{exp}"


def _mpf_from_token(tok: str) -> mp.mpf:
    sign, man_hex, exp = tok.split(":")
    man = int(man_hex, 16)
    val = mp.mpf(man) * mp.mpf(2) ** int(exp)
    return -val if sign == "1" else val


def roots_cache_path(root: Path, d: int, n: int, bits: int) -> Path:
    return Path(root) / "roots" / f"d{d}" / f"n{n}.p{bits}.roots"


def write_roots_cache(path: Path, poly: IntPolynomial, pset: PCFParameterSet) -> Path:
    lines = [
        "# pcf-lab roots v1",
        f"# poly-sha256={poly_hash(poly)}",
        f"# precision-bits={pset.precision_bits}",
        f"# count={len(pset.roots)}",
    ]
    with mp.workprec(max(pset.precision_bits + 64, 128)):
        for b in pset.roots:
            lines.append(
                " ".join(
                    (_mpf_token(b.center.real), _mpf_token(b.center.imag), _mpf_token(b.radius))
                )
            )
    atomic_write_text(path, "\n".join(lines) + "\n")
    return path


def read_roots_cache(path: Path, poly: IntPolynomial, bits: int, source=None):
    path = Path(path)
    if not path.exists():
        return None
    lines = path.read_text().splitlines()
    if len(lines) < 4 or lines[0] != "# pcf-lab roots v1":
        return None
    if lines[1] != f"# poly-sha256={poly_hash(poly)}":
        return None
    if lines[2] != f"# precision-bits={bits}":
        return None
    count = int(lines[3].split("=")[1])
    balls = []
    with mp.workprec(max(bits + 64, 128)):
        for ln in lines[4 : 4 + count]:
            re_t, im_t, r_t = ln.split()
            balls.append(
                bl.ComplexBall(
                    mp.mpc(_mpf_from_token(re_t), _mpf_from_token(im_t)), _mpf_from_token(r_t)
                )
            )
    return PCFParameterSet(source if source is not None else poly, bits, tuple(balls))
