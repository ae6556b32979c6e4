"""Translation-invariant and 2-periodic boundary fields, their existence and
boundedness, and the square-root-of-discriminant table.

Fields are built from the closed-form roots of the fixed-point and 2-cycle
equations of f(u) = (theta^2 u^2 + 2u + 1) / (u^2 + 2u + theta^2), using the
canonical square-root branch of ``padic_core``. Every emitted field is
re-verified against the recurrence, and every count is cross-checked against
the congruence predicates of ``residue_classifier``; a disagreement raises
``InternalInconsistency`` instead of being reconciled.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import (
    DegenerateDiscriminant,
    InconsistentField,
    InternalInconsistency,
    ZeroCoupling,
)
from .gibbs_model import (
    BoundaryField,
    FieldValue,
    ModelParams,
    SpinConfig,
    field_compatible,
    hamiltonian_extremes,
    level_factor,
    measure_log_norms,
    partition,
    recurrence,
)
from .padic_core import PadicNumber, sqrt, sqrt_exists, vanishes_to
from .residue_classifier import (
    ExistenceVerdict,
    minus_three_is_square,
    periodic_condition,
    ti_condition,
)

# published square-root-of-discriminant table for J < 0
PUBLISHED_TABLE = {2: False, 3: False, 5: False, 7: True, 11: False, 13: True,
                   17: False, 19: False}


def _log_norm(x: FieldValue, p: int) -> int:
    """log_p |x|_p of a nonzero value."""
    if isinstance(x, PadicNumber):
        return -x.valuation
    x = Fraction(x)
    v = 0
    for n, sign in ((x.numerator, -1), (x.denominator, 1)):
        while n % p == 0:
            n //= p
            v += sign
    return v


def _residual(u: FieldValue, target: FieldValue, params: ModelParams) -> int:
    diff = params.padic(target) - params.padic(u)
    return diff.abs_precision if diff.is_zero else diff.valuation


def _certify(x: PadicNumber, params: ModelParams, what: str) -> None:
    if not vanishes_to(x, params.guard):
        raise InternalInconsistency(f"{what} fails at valuation {x.valuation}")


# -- translation-invariant fields ---------------------------------------------

@dataclass(frozen=True)
class TISolution:
    index: int
    u: FieldValue
    h: FieldValue
    residual: int  # valuation of f(u) - u (the precision itself when it vanishes)

    @property
    def label(self) -> str:
        return f"h{self.index}"

    @property
    def field(self) -> BoundaryField:
        return BoundaryField.translation_invariant(self.h, label=self.label)

    def to_dict(self, p: int) -> dict:
        return {
            "index": self.index,
            "u": _serialize(self.u, p),
            "h": _serialize(self.h, p),
            "h_log_norm": _log_norm(self.h, p),
            "residual_valuation": self.residual,
        }


def _serialize(x: FieldValue, p: int) -> dict:
    if isinstance(x, PadicNumber):
        return x.to_dict()
    x = Fraction(x)
    return {"prime": p, "rational": str(x)}


def ti_discriminant(params: ModelParams) -> Fraction:
    t2 = params.theta_sq
    return (1 - t2) * (5 - t2)


def ti_solutions(params: ModelParams) -> list[TISolution]:
    """u0 = 1 plus the square-root-admitting roots of u^2 + (3 - theta^2) u + 1."""
    t2 = params.theta_sq  # rejects unequal or zero couplings
    out = [TISolution(0, Fraction(1), Fraction(1), _residual(1, recurrence(1, 1, params), params))]
    delta = params.padic(ti_discriminant(params))
    if not sqrt_exists(delta):
        return out
    s = sqrt(delta)
    roots = [(t2 - 3 + s) / 2, (t2 - 3 - s) / 2]
    _certify(roots[0] * roots[1] - 1, params, "u1 * u2 = 1")
    for index, u in enumerate(roots, start=1):
        if not sqrt_exists(u):
            continue
        fu = recurrence(u, u, params)
        _certify(fu - u, params, f"fixed point u{index}")
        h = sqrt(u)
        _certify(h * h - u, params, f"h{index}^2 = u{index}")
        out.append(TISolution(index, u, h, _residual(u, fu, params)))
    return out


# -- 2-periodic fields -------------------------------------------------------------

@dataclass(frozen=True)
class PeriodicSolution:
    u3: PadicNumber
    u4: PadicNumber
    h3: PadicNumber
    h4: PadicNumber
    discriminant: PadicNumber

    @property
    def fields(self) -> tuple[BoundaryField, BoundaryField]:
        """(h3, h4) and (h4, h3) assigned to (even, odd) tree levels."""
        return (BoundaryField.two_periodic(self.h3, self.h4, label="per1"),
                BoundaryField.two_periodic(self.h4, self.h3, label="per2"))

    def to_dict(self) -> dict:
        return {
            "u3": self.u3.to_dict(),
            "u4": self.u4.to_dict(),
            "h3": self.h3.to_dict(),
            "h4": self.h4.to_dict(),
            "discriminant": self.discriminant.to_dict(),
        }


def periodic_discriminant(params: ModelParams) -> Fraction:
    t2 = params.theta_sq
    return 1 + 2 * t2 - 3 * t2 * t2


def periodic_analysis(params: ModelParams) -> tuple[PeriodicSolution | None, str | None]:
    """The 2-cycle fields, or None together with the name of the failed step."""
    t2 = params.theta_sq
    D = params.padic(periodic_discriminant(params))
    if D.is_zero:
        raise DegenerateDiscriminant("1 + 2 theta^2 - 3 theta^4 vanishes to precision")
    if not sqrt_exists(D):
        return None, "NoSquareRootOfDiscriminant"
    s = sqrt(D)
    u3 = (-1 - t2 + s) / (2 * t2)
    u4 = (-1 - t2 - s) / (2 * t2)
    if not sqrt_exists(u3):
        if sqrt_exists(u4):
            raise InternalInconsistency("exactly one of u3, u4 is a square")
        return None, "NoSquareRootOfU3"
    _certify(u3 * u4 - 1, params, "u3 * u4 = 1")
    _certify(recurrence(u3, u3, params) - u4, params, "f(u3) = u4")
    _certify(recurrence(u4, u4, params) - u3, params, "f(u4) = u3")
    if vanishes_to(u3 - u4, params.guard):
        raise InternalInconsistency("2-cycle collapsed to a fixed point")
    h3, h4 = sqrt(u3), sqrt(u4)
    sol = PeriodicSolution(u3, u4, h3, h4, D)
    for f in sol.fields:
        if not field_compatible(f, 3, params):
            raise InternalInconsistency(f"{f.label} is not compatible at depth 3")
    return sol, None


def periodic_solutions(params: ModelParams) -> PeriodicSolution | None:
    return periodic_analysis(params)[0]


# -- growth of measure norms ----------------------------------------------------

def trend_verdict(log_norms: Sequence[int]) -> str:
    """UnboundedTrend iff strictly increasing with at least doubling increments."""
    steps = [b - a for a, b in zip(log_norms, log_norms[1:])]
    if len(steps) >= 2 and all(d > 0 for d in steps) and all(
            b >= 2 * a for a, b in zip(steps, steps[1:])):
        return "UnboundedTrend"
    return "Bounded"


@dataclass(frozen=True)
class GrowthProfile:
    label: str
    depths: list[int]
    sigma_star_log_norms: list[int]
    max_log_norms: list[int]
    partition_log_norms: list[int]
    level_factor_log_norms: list[int] | None
    verdict: str

    def to_dict(self) -> dict:
        return {
            "field": self.label,
            "depths": self.depths,
            "sigma_star_log_norms": self.sigma_star_log_norms,
            "max_log_norms": self.max_log_norms,
            "partition_log_norms": self.partition_log_norms,
            "level_factor_log_norms": self.level_factor_log_norms,
            "verdict": self.verdict,
        }

    def rows(self) -> list[dict]:
        return [
            {
                "depth": n,
                "sigma_star_log_norm": s,
                "max_log_norm": m,
                "partition_log_norm": z,
                "level_factor_log_norm": (None if self.level_factor_log_norms is None
                                          else self.level_factor_log_norms[i]),
            }
            for i, (n, s, m, z) in enumerate(zip(self.depths, self.sigma_star_log_norms,
                                                  self.max_log_norms,
                                                  self.partition_log_norms))
        ]


def growth_profile(params: ModelParams, bfield: BoundaryField, n_max: int = 3) -> GrowthProfile:
    """log_p-norms of mu^(n)(sigma*) and of max_sigma |mu^(n)(sigma)| for n = 1..n_max."""
    mode = "exact_rational" if bfield.is_rational else "padic"
    depths = list(range(1, n_max + 1))
    star, peak, zs = [], [], []
    for n in depths:
        logs = measure_log_norms(n, bfield, params, mode)
        star.append(int(logs[SpinConfig.sigma_star(n).mask]))
        peak.append(int(logs.max()))
        zs.append(_log_norm(partition(n, bfield, params, mode), params.p))
    try:
        factors = [_log_norm(level_factor(n, bfield, params), params.p) for n in depths]
    except InconsistentField:
        factors = None
    return GrowthProfile(bfield.label, depths, star, peak, zs, factors, trend_verdict(peak))


# -- published closed forms, kept for side-by-side reporting ---------------------

def published_a_log_norm(p: int, J: int, index: int) -> int:
    """log_p |a_h| per vertex as stated for h0, h1, h2."""
    if J > 0:
        return J - 1 if (index == 0 and p == 3) else J
    return -3 * J if index == 0 else -5 * J


def published_partition_log_norm(p: int, J: int, index: int, n: int) -> int:
    if J > 0:
        if index == 0 and p == 3:
            return (J - 1) * (2**n - 2)
        return J * (2**n - 2)
    if index == 0:
        return -J * (3 * 2**n - 6)
    return -J * (5 * 2**n - 10)


def published_energy_bound(J: int, n: int) -> int:
    """Stated bound on log_p |p^H_n(sigma)|_p."""
    return J * (2**n - 1) if J > 0 else -J * (3 * 2**n - 5)


# -- table of sqrt(D(theta)) for J < 0 -----------------------------------------

@dataclass(frozen=True)
class TableRow:
    prime: int
    published: bool | None
    padic: bool
    residue: bool

    @property
    def computed(self) -> bool:
        return self.padic

    @property
    def agrees(self) -> bool | None:
        return None if self.published is None else self.published == self.computed

    def to_dict(self) -> dict:
        mark = {True: "+", False: "-", None: None}
        return {
            "prime": self.prime,
            "published_value": mark[self.published],
            "computed_value": mark[self.computed],
            "padic_path": mark[self.padic],
            "residue_path": mark[self.residue],
            "agree": self.agrees,
        }


def table1(primes: Sequence[int], J: int, precision: int = 48) -> list[TableRow]:
    """Existence of sqrt(1 + 2 theta^2 - 3 theta^4) per prime, by two routes."""
    if J == 0:
        raise ZeroCoupling("J must be nonzero")
    if J > 0:
        raise ValueError("the table is defined for J < 0")
    rows = []
    for p in primes:
        params = ModelParams(p, J, precision=precision)
        padic = sqrt_exists(params.padic(periodic_discriminant(params)))
        residue = minus_three_is_square(p)
        if padic != residue:
            raise InternalInconsistency(f"p = {p}: p-adic and residue routes disagree")
        rows.append(TableRow(p, PUBLISHED_TABLE.get(p), padic, residue))
    return rows


# -- classification --------------------------------------------------------------

@dataclass(frozen=True)
class BoundednessEntry:
    label: str
    theorem: str
    empirical: str
    profile: GrowthProfile

    def to_dict(self) -> dict:
        return {"field": self.label, "theorem": self.theorem, "empirical": self.empirical,
                "profile": self.profile.to_dict()}


@dataclass(frozen=True)
class ClassificationReport:
    p: int
    J: int
    precision: int
    ti: list[TISolution]
    ti_verdict: ExistenceVerdict
    periodic: PeriodicSolution | None
    periodic_failure: str | None
    periodic_verdict: ExistenceVerdict
    boundedness: list[BoundednessEntry]
    discrepancies: list[dict] = field(default_factory=list)

    @property
    def ti_count(self) -> int:
        return len(self.ti)

    @property
    def periodic_count(self) -> int:
        return 0 if self.periodic is None else 2

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "J": self.J,
            "precision": self.precision,
            "translation_invariant": {
                "count": self.ti_count,
                "residue_verdict": self.ti_verdict.to_dict(),
                "solutions": [s.to_dict(self.p) for s in self.ti],
            },
            "periodic": {
                "count": self.periodic_count,
                "residue_verdict": self.periodic_verdict.to_dict(),
                "failure": self.periodic_failure,
                "solution": None if self.periodic is None else self.periodic.to_dict(),
            },
            "boundedness": [b.to_dict() for b in self.boundedness],
            "cross_checks": {
                "ti_count_matches_residues": self.ti_count == self.ti_verdict.count,
                "periodic_count_matches_residues":
                    self.periodic_count == self.periodic_verdict.count,
                "boundedness_matches_growth": all(
                    b.theorem == b.empirical for b in self.boundedness),
            },
        }


def theorem_boundedness(p: int, J: int, index: int) -> str:
    return "unbounded" if (J > 0 and p == 3 and index == 0) else "bounded"


def _discrepancies(params: ModelParams, sol: TISolution, profile: GrowthProfile) -> list[dict]:
    p, J = params.p, params.J
    notes = []
    a = level_factor(1, sol.field, params)
    per_vertex = _log_norm(a, p) // 2
    expected = published_a_log_norm(p, J, sol.index)
    notes.append({"quantity": f"log_p |a_{sol.label}| per vertex",
                  "published": expected, "computed": per_vertex,
                  "agree": expected == per_vertex})
    pub = [published_partition_log_norm(p, J, sol.index, n) for n in profile.depths]
    notes.append({"quantity": f"log_p |Z_n| for {sol.label}, n = {profile.depths}",
                  "published": pub, "computed": profile.partition_log_norms,
                  "agree": pub == profile.partition_log_norms,
                  "note": "computed values include the root boundary factor Z_1"})
    if J > 0 and p == 3 and sol.index == 0:
        pub = [2**n - 2 for n in profile.depths]
        notes.append({"quantity": "log_p |mu^(n)(sigma*)| for h0",
                      "published": pub, "computed": profile.sigma_star_log_norms,
                      "agree": pub == profile.sigma_star_log_norms})
    return notes


def classify(p: int, J: int, precision: int = 48, n_max: int = 3) -> ClassificationReport:
    params = ModelParams(p, J, precision=precision)
    ti = ti_solutions(params)
    ti_verdict = ti_condition(p, J)
    if len(ti) != ti_verdict.count:
        raise InternalInconsistency(
            f"constructed {len(ti)} translation-invariant fields, congruences give "
            f"{ti_verdict.count}")
    periodic, failure = periodic_analysis(params)
    per_verdict = periodic_condition(p, J)
    if (0 if periodic is None else 2) != per_verdict.count:
        raise InternalInconsistency(
            f"periodic construction and congruences disagree for p = {p}, J = {J}")

    entries, notes = [], []
    for sol in ti:
        profile = growth_profile(params, sol.field, n_max)
        theorem = theorem_boundedness(p, J, sol.index)
        empirical = "unbounded" if profile.verdict == "UnboundedTrend" else "bounded"
        if theorem != empirical:
            raise InternalInconsistency(
                f"{sol.label}: theorem says {theorem}, growth profile says {empirical}")
        entries.append(BoundednessEntry(sol.label, theorem, empirical, profile))
        notes.extend(_discrepancies(params, sol, profile))
    for n in range(1, n_max + 1):
        lo, hi = hamiltonian_extremes(n, params)
        computed = -lo
        pub = published_energy_bound(J, n)
        notes.append({"quantity": f"max_sigma log_p |p^H_{n}(sigma)|",
                      "published": pub, "computed": computed, "agree": pub == computed})
    return ClassificationReport(p, J, precision, ti, ti_verdict, periodic, failure,
                                per_verdict, entries, notes)
