"""Power sums of inverse roots and the truncated Taylor series of log p(z).

For p(z) = c_0 prod_j (1 - z / zeta_j) the inverse-root power sums
r_k = sum_j zeta_j^{-k} determine log p completely:

    log p(z) = log c_0 - sum_{k >= 1} (r_k / k) z^k.

The constant is carried as c_0 itself, never as a float logarithm, so ratios
of exp(T_m) values stay exact until a number is asked for.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import mpmath

from .errors import VanishingConstantTerm
from .poly import RationalPolynomial

ZERO = Fraction(0)


@dataclass(frozen=True)
class PowerSumTable:
    """r_1..r_m with r_k = Roots(p, k); ``values[k - 1]`` is r_k."""

    m: int
    values: tuple[Fraction, ...]

    def __getitem__(self, k: int) -> Fraction:
        if not 1 <= k <= self.m:
            raise IndexError(k)
        return self.values[k - 1]

    def __add__(self, other: "PowerSumTable") -> "PowerSumTable":
        m = min(self.m, other.m)
        return PowerSumTable(m, tuple(a + b for a, b in zip(self.values[:m], other.values[:m])))


def _normalized(p: RationalPolynomial, m: int) -> list[Fraction]:
    c0 = p[0]
    if c0 == 0:
        raise VanishingConstantTerm("constant term vanishes; Roots undefined")
    return [p[i] / c0 for i in range(m + 1)]


def power_sums_newton(p: RationalPolynomial, m: int) -> PowerSumTable:
    """k c_k = -sum_{i<k} c_i r_{k-i} solved for r_k (coefficients scaled so c_0 = 1)."""
    c = _normalized(p, m)
    r = [ZERO] * (m + 1)
    for k in range(1, m + 1):
        acc = k * c[k]
        for i in range(1, k):
            acc += c[i] * r[k - i]
        r[k] = -acc
    return PowerSumTable(m, tuple(r[1:]))


def compositions(k: int) -> Iterator[tuple[int, ...]]:
    """All (m_1..m_k) >= 0 with sum_i i * m_i = k (partitions of k by multiplicity)."""

    def rec(part: int, remaining: int) -> Iterator[tuple[int, ...]]:
        # part runs k, k-1, ..., 1; multiplicities are emitted for i = part..k
        if part == 0:
            if remaining == 0:
                yield ()
            return
        for mult in range(remaining // part + 1):
            for rest in rec(part - 1, remaining - mult * part):
                yield rest + (mult,)

    return rec(k, k)


def girard_coefficient(ms: Sequence[int]) -> Fraction:
    """Weight of prod_i c_i^{m_i} in r_k for a polynomial with c_0 = 1.

    Equals k (-1)^{|m|} (|m| - 1)! / prod m_i!, where k = sum i m_i.
    """
    k = sum((i + 1) * mi for i, mi in enumerate(ms))
    total = sum(ms)
    denom = math.prod(math.factorial(mi) for mi in ms)
    return Fraction((-1) ** total * k * math.factorial(total - 1), denom)


def power_sums_girard(p: RationalPolynomial, m: int) -> PowerSumTable:
    """r_k from the closed multinomial sum over compositions of k."""
    c = _normalized(p, m)
    out = []
    for k in range(1, m + 1):
        acc = ZERO
        for ms in compositions(k):
            term = girard_coefficient(ms)
            for i, mi in enumerate(ms, start=1):
                if mi:
                    term *= c[i] ** mi
            acc += term
        out.append(acc)
    return PowerSumTable(m, tuple(out))


def power_sums_from_roots(roots: Sequence, m: int) -> PowerSumTable:
    """sum_j zeta_j^{-k} straight from the (exact or numeric) roots."""
    return PowerSumTable(m, tuple(sum((1 / z) ** k for z in roots) for k in range(1, m + 1)))


@dataclass(frozen=True)
class TaylorApprox:
    """exp(T_m(z)) = constant * z^shift * exp(sum_k coeffs[k-1] z^k).

    ``shift`` is the order of vanishing of p at 0 (always 0 for
    ``taylor_truncation``); it lets pinned hard-core polynomials, which carry
    an exact factor (lambda z)^{#occupied pins}, share the representation.
    """

    m: int
    constant: Fraction
    coeffs: tuple[Fraction, ...]
    shift: int = 0

    def exponent(self, z) -> Fraction:
        z = Fraction(z)
        acc = ZERO
        for t in reversed(self.coeffs):
            acc = (acc + t) * z
        return acc

    def value(self, z=1, precision_bits: int = 53) -> mpmath.mpf:
        """c_0 z^shift exp(T_m(z) - log c_0), rounded only here."""
        with mpmath.workprec(precision_bits):
            zq = Fraction(z)
            e = self.exponent(zq)
            zf = mpmath.mpf(zq.numerator) / zq.denominator
            out = (
                mpmath.mpf(self.constant.numerator) / self.constant.denominator
                * zf ** self.shift
                * mpmath.exp(mpmath.mpf(e.numerator) / e.denominator)
            )
            return +out


def taylor_truncation(p: RationalPolynomial, m: int) -> TaylorApprox:
    """Order-m Taylor data of log p(z) at 0: t_k = -r_k / k for k = 1..m."""
    r = power_sums_newton(p, m)
    return TaylorApprox(m, p[0], tuple(-r[k] / k for k in range(1, m + 1)))


def taylor_truncation_shifted(p: RationalPolynomial, m: int) -> TaylorApprox:
    """Like ``taylor_truncation`` after dividing out the lowest power of z."""
    if p.is_zero():
        raise VanishingConstantTerm("polynomial vanishes identically")
    v = p.valuation()
    t = taylor_truncation(p.shift_down(v), m)
    return TaylorApprox(t.m, t.constant, t.coeffs, v)


def power_sums_additive_check(g1, g2, kind, m: int, *, budget: int | None = None) -> bool:
    """Roots of the union's polynomial are the roots of the parts, so the
    power-sum tables add up exactly."""
    from .graph_core import disjoint_union
    from .poly import interpolation_polynomial

    r1 = power_sums_newton(interpolation_polynomial(g1, kind, budget=budget), m)
    r2 = power_sums_newton(interpolation_polynomial(g2, kind, budget=budget), m)
    ru = power_sums_newton(interpolation_polynomial(disjoint_union(g1, g2), kind, budget=budget), m)
    return ru == r1 + r2
