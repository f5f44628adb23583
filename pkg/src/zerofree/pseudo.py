"""Pseudo-marginals built from truncated log-series, and locality checks.

A pseudo-marginal replaces each partition function in a Gibbs ratio by the
exponential of its order-m Taylor truncation.  Everything is kept as exact
data (constant ratio, power of z, coefficient differences); floats appear
only in ``value``.

The locality check compares, for every boundary condition tau at distance R,
the coefficient differences of the conditional pseudo-marginal with those of
the unconditional one.  Termwise equality for k <= m is stronger than
equality at any single z.
"""
from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

from .errors import ConfigError, GibbsUndefined, InfeasibleCondition, VanishingConstantTerm
from .exact import (
    DEFAULT_TAU_BUDGET,
    DEFAULT_TAU_SAMPLES,
    boundary_conditions,
    partition_exact,
    rho_R,
)
from .graph_core import ColorAssignment, DecoratedGraph, boundary, fraction_str, node_set, reduce
from .poly import InterpolationKind, interpolation_polynomial
from .taylor import TaylorApprox, taylor_truncation, taylor_truncation_shifted


def min_radius(kind, m: int) -> int:
    """Smallest R for which the boundary cannot reach the order-m coefficients.

    Type II: 2m.  Type I: m + 2, since an occupied pin removes its neighbours
    and so moves the effective boundary one step closer; R = m is refuted on
    hard-core paths (see ``TYPE1_RADIUS_WITNESS``).
    """
    kind = InterpolationKind.parse(kind)
    if m < 0:
        raise ConfigError("m must be >= 0")
    return m + 2 if kind is InterpolationKind.TYPE_I else 2 * m


def stated_radius(kind, m: int) -> int:
    """The commonly quoted radius rule: R >= m (Type I), R >= 2m (Type II)."""
    kind = InterpolationKind.parse(kind)
    return m if kind is InterpolationKind.TYPE_I else 2 * m


# hard-core path(7), lambda = 1, S = {0}: the R = m rule fails at m = 3
TYPE1_RADIUS_WITNESS = {"graph": "path(7)", "lambda": "1/1", "S": [0], "R": 3, "m": 3}


def truncation(g: DecoratedGraph, kind, m: int, *, budget: int | None = None) -> TaylorApprox:
    """exp(T_m) data for one decorated graph.

    Type I polynomials of pinned graphs may vanish at z = 0 (occupied pins);
    the lowest power of z is then split off exactly.  Type II needs a
    nonzero constant term L(G).
    """
    kind = InterpolationKind.parse(kind)
    p = interpolation_polynomial(g, kind, budget=budget)
    if kind is InterpolationKind.TYPE_I:
        if p.is_zero():
            raise InfeasibleCondition("pinning has weight zero for every z")
        return taylor_truncation_shifted(p, m)
    if p[0] == 0:
        raise VanishingConstantTerm("L(G) = 0: some node has an all-zero weight vector")
    return taylor_truncation(p, m)


@dataclass(frozen=True)
class PseudoMarginal:
    """ratio * z^z_power * exp(sum_k coeffs[k-1] z^k), all parts exact."""

    ratio: Fraction
    z_power: int
    coeffs: tuple[Fraction, ...]
    z: Fraction
    m: int

    @classmethod
    def quotient(cls, num: TaylorApprox, den: TaylorApprox, z) -> "PseudoMarginal":
        return cls(
            num.constant / den.constant,
            num.shift - den.shift,
            tuple(a - b for a, b in zip(num.coeffs, den.coeffs)),
            Fraction(z),
            num.m,
        )

    @property
    def exponent(self) -> Fraction:
        acc = Fraction(0)
        for t in reversed(self.coeffs):
            acc = (acc + t) * self.z
        return acc

    def value(self, precision_bits: int = 53) -> mpmath.mpf:
        with mpmath.workprec(precision_bits):
            zf = mpmath.mpf(self.z.numerator) / self.z.denominator
            e = self.exponent
            out = (
                mpmath.mpf(self.ratio.numerator) / self.ratio.denominator
                * zf ** self.z_power
                * mpmath.exp(mpmath.mpf(e.numerator) / e.denominator)
            )
            return +out

    def same_data(self, other: "PseudoMarginal") -> bool:
        """Identical exact data, hence equal at every z."""
        return (self.ratio, self.z_power, self.coeffs) == (other.ratio, other.z_power, other.coeffs)

    def is_exactly_one(self) -> bool:
        return self.ratio == 1 and self.z_power == 0 and all(c == 0 for c in self.coeffs)

    def to_json(self, precision_bits: int = 53) -> dict:
        return {
            "ratio": fraction_str(self.ratio),
            "z_power": self.z_power,
            "coeffs": [fraction_str(c) for c in self.coeffs],
            "z": fraction_str(self.z),
            "m": self.m,
            "exponent": fraction_str(self.exponent),
            "value": mpmath.nstr(self.value(precision_bits), max(1, int(precision_bits * 0.30103))),
            "precision_bits": precision_bits,
        }


def _assign(S, sigma) -> ColorAssignment:
    S = list(S)
    if sigma is None:
        if S:
            raise ConfigError("sigma is required when S is nonempty")
        return ColorAssignment()
    return ColorAssignment.from_lists(S, sigma)


def pseudo_marginal(g: DecoratedGraph, S, sigma, kind, z=1, m: int = 1, *,
                    budget: int | None = None) -> PseudoMarginal:
    """exp(T_m(G_{S,sigma}, z)) / exp(T_m(G, z))."""
    a = _assign(S, sigma)
    a.validate(g)
    den = truncation(g, kind, m, budget=budget)
    num = den if not a else truncation(reduce(g, a), kind, m, budget=budget)
    return PseudoMarginal.quotient(num, den, z)


def conditional_pseudo_marginal(g: DecoratedGraph, S, sigma, T, tau, kind, z=1, m: int = 1, *,
                                budget: int | None = None) -> PseudoMarginal:
    """exp(T_m(G_{S u T, sigma u tau}, z)) / exp(T_m(G_{T,tau}, z)).

    sigma and tau must agree on S n T (``ConflictingAssignment`` otherwise).
    """
    s, t = _assign(S, sigma), _assign(T, tau)
    s.validate(g)
    t.validate(g)
    both = s.union(t)
    den = truncation(reduce(g, t), kind, m, budget=budget)
    num = truncation(reduce(g, both), kind, m, budget=budget)
    return PseudoMarginal.quotient(num, den, z)


# -- locality check ----------------------------------------------------------

def _threads() -> int:
    env = os.environ.get("ZF_THREADS")
    return max(1, int(env)) if env else 1


def _pmap(fn, items: list) -> list:
    n = _threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * n))))


def _diff_or_none(args):
    """Coefficient data of the conditional pseudo-marginal for one tau, or a
    skip reason when the conditional object is undefined."""
    g, s_assign, tau, kind, m, budget = args
    try:
        den = truncation(reduce(g, tau), kind, m, budget=budget)
    except (InfeasibleCondition, VanishingConstantTerm):
        return "denominator"
    try:
        num = truncation(reduce(g, s_assign.union(tau)), kind, m, budget=budget)
    except (InfeasibleCondition, VanishingConstantTerm):
        return "numerator"
    return PseudoMarginal.quotient(num, den, 1)


def _tau_json(tau: ColorAssignment) -> list[list[int]]:
    return [[u, c] for u, c in tau.items]


@dataclass
class Theorem1Report:
    holds: bool
    kind: str
    m: int
    R: int
    S: tuple[int, ...]
    sigma: tuple[int, ...]
    boundary: tuple[int, ...]
    tau_count: int
    tau_checked: int
    tau_feasible: int
    tau_skipped: int
    sampled: bool
    radius_condition_met: bool
    stated_condition_met: bool
    witness: dict | None = None
    note: str = field(default="")

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "kind": self.kind,
            "m": self.m,
            "R": self.R,
            "S": list(self.S),
            "sigma": list(self.sigma),
            "boundary": list(self.boundary),
            "tau_count": self.tau_count,
            "tau_checked": self.tau_checked,
            "tau_feasible": self.tau_feasible,
            "tau_skipped": self.tau_skipped,
            "sampled": self.sampled,
            "radius_condition_met": self.radius_condition_met,
            "stated_condition_met": self.stated_condition_met,
            "witness": self.witness,
            "note": self.note,
        }


RADIUS_NOTE = (
    "radius rule used: type1 R >= m + 2, type2 R >= 2m; the rule R >= m for type1 "
    "is refuted by hard-core path(7), S={0}, R=3, m=3"
)


def _compare(ref: PseudoMarginal, got: PseudoMarginal) -> dict | None:
    if got.z_power != ref.z_power:
        return {"component": "z_power", "lhs": got.z_power, "rhs": ref.z_power}
    if got.ratio != ref.ratio:
        return {"component": "constant", "lhs": fraction_str(got.ratio), "rhs": fraction_str(ref.ratio)}
    for k, (a, b) in enumerate(zip(got.coeffs, ref.coeffs), start=1):
        if a != b:
            return {"component": "t_k", "k": k, "lhs": fraction_str(a), "rhs": fraction_str(b)}
    return None


def theorem1_check(
    g: DecoratedGraph,
    S,
    sigma,
    R: int,
    kind,
    m: int,
    *,
    budget: int | None = None,
    tau_budget: int = DEFAULT_TAU_BUDGET,
    samples: int = DEFAULT_TAU_SAMPLES,
    seed: int | None = None,
    stop_at_first: bool = True,
) -> Theorem1Report:
    """Termwise check that pinning the sphere at distance R leaves the
    order-m pseudo-marginal of (S, sigma) unchanged.

    For each tau on the boundary (all of them, or a seeded sample when
    there are more than ``tau_budget``) the differences
    t_k(G_{S u T}) - t_k(G_T) are compared with t_k(G_S) - t_k(G) for
    k <= m, together with the constant ratio and the power of z.  Boundary
    conditions whose conditional object is undefined (Type I pinnings with
    weight zero) are skipped and counted.  Any R is accepted; the report
    records whether the radius rule holds.
    """
    kind = InterpolationKind.parse(kind)
    S = node_set(S, g.n)
    s_assign = _assign(S, sigma)
    s_assign.validate(g)
    if R < 1:
        raise ConfigError("R must be >= 1")
    T = boundary(g, S, R)
    base = dict(
        kind=kind.value, m=m, R=R, S=S, sigma=tuple(c for _, c in s_assign.items), boundary=T,
        radius_condition_met=R >= min_radius(kind, m),
        stated_condition_met=R >= stated_radius(kind, m), note=RADIUS_NOTE,
    )
    if not T:
        return Theorem1Report(True, tau_count=0, tau_checked=0, tau_feasible=0, tau_skipped=0,
                              sampled=False, **base)
    ref = pseudo_marginal(g, S, base["sigma"], kind, 1, m, budget=budget)
    taus, exhaustive = boundary_conditions(g.K, T, tau_budget=tau_budget, samples=samples, seed=seed)
    results = _pmap(_diff_or_none, [(g, s_assign, tau, kind, m, budget) for tau in taus])
    checked = skipped = feasible = 0
    witness = None
    for tau, res in zip(taus, results):
        if isinstance(res, str):
            skipped += 1
            continue
        checked += 1
        if partition_exact(reduce(g, tau), budget) > 0:
            feasible += 1
        bad = _compare(ref, res)
        if bad is not None and witness is None:
            witness = {"tau": _tau_json(tau), **bad}
            if stop_at_first:
                break
    return Theorem1Report(witness is None, tau_count=len(taus), tau_checked=checked,
                          tau_feasible=feasible, tau_skipped=skipped, sampled=not exhaustive,
                          witness=witness, **base)


# -- accuracy of exp(T_m(1)) ---------------------------------------------------

@dataclass(frozen=True)
class AccuracyRow:
    m: int
    approx: mpmath.mpf
    Z: Fraction
    rel_error: mpmath.mpf
    precision_bits: int

    def to_json(self) -> dict:
        digits = max(1, int(self.precision_bits * 0.30103))
        return {
            "m": self.m,
            "approx": mpmath.nstr(self.approx, digits),
            "Z": fraction_str(self.Z),
            "rel_error": mpmath.nstr(self.rel_error, digits),
            "precision_bits": self.precision_bits,
        }


def interpolation_accuracy(g: DecoratedGraph, kind, m_max: int, *, m_min: int = 0,
                           precision_bits: int = 64, budget: int | None = None) -> list[AccuracyRow]:
    """Relative error of exp(T_m(1)) against the exact Z(G) for m_min..m_max."""
    Z = partition_exact(g, budget)
    if Z == 0:
        raise GibbsUndefined("Z(G) = 0")
    kind = InterpolationKind.parse(kind)
    p = interpolation_polynomial(g, kind, budget=budget)
    rows = []
    for m in range(m_min, m_max + 1):
        t = taylor_truncation_shifted(p, m) if kind is InterpolationKind.TYPE_I else taylor_truncation(p, m)
        with mpmath.workprec(precision_bits):
            approx = t.value(1, precision_bits)
            zf = mpmath.mpf(Z.numerator) / Z.denominator
            err = abs(approx - zf) / zf
        rows.append(AccuracyRow(m, approx, Z, err, precision_bits))
    return rows


# -- decay scans ---------------------------------------------------------------

@dataclass(frozen=True)
class SsmRow:
    param: str
    value: Fraction | None
    R: int
    rho: Fraction
    rho_label: str
    tau_total: int
    tau_feasible: int
    m: int | None = None
    pseudo_gap: mpmath.mpf | None = None
    pseudo_gap_exact_zero: bool | None = None
    radius_condition_met: bool | None = None

    CSV_HEADER = ("param", "value", "R", "rho", "rho_label", "tau_total", "tau_feasible",
                  "m", "pseudo_gap", "pseudo_gap_exact_zero", "radius_condition_met")

    def csv_fields(self, precision_bits: int = 53) -> list[str]:
        gap = "" if self.pseudo_gap is None else mpmath.nstr(self.pseudo_gap, max(1, int(precision_bits * 0.30103)))
        opt = lambda x: "" if x is None else str(x).lower()  # noqa: E731
        value = "" if self.value is None else fraction_str(self.value)
        return [self.param, value, str(self.R), fraction_str(self.rho),
                self.rho_label, str(self.tau_total), str(self.tau_feasible), opt(self.m), gap,
                opt(self.pseudo_gap_exact_zero), opt(self.radius_condition_met)]


def pseudo_gap(g: DecoratedGraph, S, R: int, kind, m: int, *, budget: int | None = None,
               tau_budget: int = DEFAULT_TAU_BUDGET, samples: int = DEFAULT_TAU_SAMPLES,
               seed: int | None = None, precision_bits: int = 53) -> tuple[mpmath.mpf, bool]:
    """max over sigma on S and tau on the R-sphere of |nu(.|tau) - nu(.)| at z = 1.

    Returns ``(gap, exact_zero)``; ``exact_zero`` means every feasible pair
    had identical exact data.  Pairs with an undefined side are skipped.
    """
    kind = InterpolationKind.parse(kind)
    S = node_set(S, g.n)
    T = boundary(g, S, R)
    if not T:
        return mpmath.mpf(0), True
    taus, _ = boundary_conditions(g.K, T, tau_budget=tau_budget, samples=samples, seed=seed)
    gap, exact_zero = mpmath.mpf(0), True
    for sigma in itertools.product(range(1, g.K + 1), repeat=len(S)):
        try:
            ref = pseudo_marginal(g, S, sigma, kind, 1, m, budget=budget)
        except (InfeasibleCondition, VanishingConstantTerm):
            continue
        s_assign = ColorAssignment.from_lists(S, sigma)
        for res in _pmap(_diff_or_none, [(g, s_assign, tau, kind, m, budget) for tau in taus]):
            if isinstance(res, str) or res.same_data(ref):
                continue
            exact_zero = False
            with mpmath.workprec(precision_bits):
                gap = max(gap, abs(res.value(precision_bits) - ref.value(precision_bits)))
    return gap, exact_zero


def ssm_scan(
    graph,
    model,
    S,
    R_list: Sequence[int],
    *,
    param: str | None = None,
    values: Iterable | None = None,
    kind=None,
    m: int | None = None,
    budget: int | None = None,
    tau_budget: int = DEFAULT_TAU_BUDGET,
    samples: int = DEFAULT_TAU_SAMPLES,
    seed: int | None = None,
) -> list[SsmRow]:
    """rho_R for every swept parameter value and radius.

    ``model`` is a ``ModelSpec``; ``param``/``values`` override one of its
    parameters per row.  With ``kind`` and ``m`` the pseudo-gap column is
    filled in as well.
    """
    from .models import ModelSpec

    if not isinstance(model, ModelSpec):
        raise ConfigError("model must be a ModelSpec")
    if param is None:
        param, values = "", [None]
    rows = []
    for val in values:
        params = dict(model.params)
        if val is not None:
            params[param] = Fraction(val)
        g = ModelSpec(model.kind, tuple(sorted(params.items()))).build(graph)
        for R in R_list:
            rho = rho_R(g, S, R, budget=budget, tau_budget=tau_budget, samples=samples, seed=seed)
            extra = {}
            if kind is not None and m is not None:
                gap, zero = pseudo_gap(g, S, R, kind, m, budget=budget, tau_budget=tau_budget,
                                       samples=samples, seed=seed)
                extra = dict(m=m, pseudo_gap=gap, pseudo_gap_exact_zero=zero,
                             radius_condition_met=R >= min_radius(kind, m))
            rows.append(SsmRow(param, None if val is None else Fraction(val), R, rho.value,
                               rho.label, rho.tau_total, rho.tau_feasible, **extra))
    return rows
