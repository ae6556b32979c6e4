"""Finite-volume quasi Gibbs measures on the rooted binary tree.

Vertices are heap indices: the root is 1 and the successors of x are 2x and
2x + 1, so level m holds the 2**m vertices 2**m .. 2**(m+1) - 1. Nearest
neighbours are parent-child edges, next-nearest neighbours are sibling
pairs. Only leaf spins carry a boundary factor h_x**sigma(x).

Partition functions are exhaustive sums over every configuration. They are
evaluated either in truncated p-adic arithmetic or, for rational boundary
fields, exactly with ``fractions.Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import (
    DegeneratePartition,
    DenominatorZeroToPrecision,
    DepthLimit,
    InconsistentField,
    ModeUnavailable,
    UnequalCouplings,
    ZeroCoupling,
)
from .padic_core import (
    DEFAULT_PRECISION,
    GUARD_DIGITS,
    PadicNumber,
    as_padic,
    from_rational,
    rational_valuation,
    vanishes_to,
)
from .residue_classifier import is_probable_prime

MAX_TREE_DEPTH = 12
MAX_PARTITION_DEPTH = 3

FieldValue = Union[int, Fraction, PadicNumber]


# -- tree -------------------------------------------------------------------

def level_of(x: int) -> int:
    return x.bit_length() - 1


@dataclass(frozen=True)
class TreeLevels:
    depth: int

    @property
    def size(self) -> int:
        return 2 ** (self.depth + 1) - 1

    @property
    def vertices(self) -> range:
        return range(1, self.size + 1)

    def level(self, m: int) -> range:
        if not 0 <= m <= self.depth:
            raise ValueError(f"level {m} outside 0..{self.depth}")
        return range(2**m, 2 ** (m + 1))

    @staticmethod
    def successors(x: int) -> tuple[int, int]:
        return 2 * x, 2 * x + 1

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(x // 2, x) for x in range(2, self.size + 1)]

    @property
    def sibling_pairs(self) -> list[tuple[int, int]]:
        return [(2 * x, 2 * x + 1) for x in range(1, 2**self.depth)]


def build_levels(n: int) -> TreeLevels:
    if not 0 <= n <= MAX_TREE_DEPTH:
        raise DepthLimit(f"tree depth must lie in 0..{MAX_TREE_DEPTH}, got {n}")
    return TreeLevels(n)


@dataclass(frozen=True)
class SpinConfig:
    """A +-1 assignment on V_n. Bit x - 1 of ``mask`` set means sigma(x) = -1."""

    depth: int
    mask: int = 0

    def __post_init__(self):
        if not 0 <= self.mask < 2 ** (2 ** (self.depth + 1) - 1):
            raise ValueError("mask does not fit the tree")

    def spin(self, x: int) -> int:
        return -1 if (self.mask >> (x - 1)) & 1 else 1

    def __str__(self) -> str:
        return "".join("-" if (self.mask >> i) & 1 else "+"
                       for i in range(2 ** (self.depth + 1) - 1))

    @classmethod
    def from_string(cls, text: str) -> "SpinConfig":
        text = text.replace("−", "-")
        size = len(text) + 1
        if size & (size - 1) or any(c not in "+-" for c in text):
            raise ValueError(f"not a configuration on a full binary tree: {text!r}")
        mask = sum(1 << i for i, c in enumerate(text) if c == "-")
        return cls(size.bit_length() - 2, mask)

    @classmethod
    def sigma_star(cls, n: int) -> "SpinConfig":
        """Root +1, every left child +1, every right child -1."""
        mask = sum(1 << (x - 1) for x in range(3, 2 ** (n + 1), 2))
        return cls(n, mask)

    def restrict(self, n: int) -> "SpinConfig":
        return SpinConfig(n, self.mask & ((1 << (2 ** (n + 1) - 1)) - 1))

    @staticmethod
    def all_configs(n: int) -> Iterable["SpinConfig"]:
        return (SpinConfig(n, m) for m in range(2 ** (2 ** (n + 1) - 1)))


# -- parameters and fields --------------------------------------------------

@dataclass(frozen=True)
class ModelParams:
    """Prime, couplings and working precision.

    ``precision`` is the target K; zero tests use the guard K - 4. Internal
    values carry ``work_precision`` digits so that products with large-norm
    powers of theta do not eat into the guard.
    """

    p: int
    J1: int
    J2: int | None = None
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        if self.J2 is None:
            object.__setattr__(self, "J2", self.J1)
        if not is_probable_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.precision < GUARD_DIGITS + 4:
            raise ValueError("precision too small")

    @property
    def J(self) -> int:
        if self.J1 != self.J2:
            raise UnequalCouplings(f"J1 = {self.J1} differs from J2 = {self.J2}")
        if self.J1 == 0:
            raise ZeroCoupling("J must be nonzero")
        return self.J1

    @property
    def guard(self) -> int:
        return self.precision - GUARD_DIGITS

    @property
    def work_precision(self) -> int:
        return self.precision + 16 * max(abs(self.J1), abs(self.J2)) + 16

    @property
    def theta_exact(self) -> Fraction:
        return Fraction(self.p) ** (2 * self.J)

    @property
    def theta_sq(self) -> Fraction:
        return self.theta_exact**2

    @property
    def theta(self) -> PadicNumber:
        return as_padic(self.theta_exact, self.p, self.work_precision)

    def padic(self, x: FieldValue) -> PadicNumber:
        return as_padic(x, self.p, self.work_precision)


def _is_rational(x: FieldValue) -> bool:
    return isinstance(x, (int, Fraction))


def _check_invertible(x: FieldValue) -> FieldValue:
    if isinstance(x, PadicNumber):
        if x.is_zero:
            raise ValueError("boundary values must be invertible")
        return x
    x = Fraction(x)
    if x == 0:
        raise ValueError("boundary values must be invertible")
    return x


@dataclass(frozen=True)
class BoundaryField:
    """x -> h_x, translation-invariant, level-periodic or explicit.

    ``values`` is (h,) or (h_even_level, h_odd_level); explicit fields keep
    per-vertex ``overrides`` on top of a default value.
    """

    kind: str
    values: tuple
    overrides: tuple = ()
    label: str = field(default="", compare=False)

    @classmethod
    def translation_invariant(cls, h: FieldValue, label: str = "") -> "BoundaryField":
        return cls("translation_invariant", (_check_invertible(h),), label=label)

    @classmethod
    def two_periodic(cls, h_even: FieldValue, h_odd: FieldValue, label: str = "") -> "BoundaryField":
        return cls("two_periodic", (_check_invertible(h_even), _check_invertible(h_odd)),
                   label=label)

    @classmethod
    def explicit(cls, values: Mapping[int, FieldValue], default: FieldValue,
                 label: str = "") -> "BoundaryField":
        items = tuple(sorted((int(x), _check_invertible(h)) for x, h in values.items()))
        return cls("explicit", (_check_invertible(default),), items, label=label)

    def h(self, x: int) -> FieldValue:
        if self.kind == "two_periodic":
            return self.values[level_of(x) % 2]
        if self.kind == "explicit":
            for vertex, value in self.overrides:
                if vertex == x:
                    return value
        return self.values[0]

    @property
    def is_rational(self) -> bool:
        return all(_is_rational(v) for v in self.values) and all(
            _is_rational(v) for _, v in self.overrides)

    def negated(self) -> "BoundaryField":
        return BoundaryField(self.kind, tuple(-v for v in self.values),
                             tuple((x, -v) for x, v in self.overrides),
                             label=f"-{self.label}" if self.label else "")


# -- energies ---------------------------------------------------------------

def hamiltonian(sigma: SpinConfig, params: ModelParams) -> int:
    tree = TreeLevels(sigma.depth)
    s = sigma.spin
    nearest = sum(s(x) * s(y) for x, y in tree.edges)
    siblings = sum(s(y) * s(z) for y, z in tree.sibling_pairs)
    return params.J1 * nearest + params.J2 * siblings


@lru_cache(maxsize=64)
def _energy_table(n: int, J1: int, J2: int) -> np.ndarray:
    """H for every mask on V_n, shaped (leaf pattern, interior mask)."""
    size = 2 ** (n + 1) - 1
    masks = np.arange(2**size, dtype=np.int64)
    spins = 1 - 2 * ((masks[:, None] >> np.arange(size, dtype=np.int64)) & 1)
    H = np.zeros(2**size, dtype=np.int64)
    for x in range(2, size + 1):
        H += J1 * spins[:, x // 2 - 1] * spins[:, x - 1]
    for x in range(1, 2**n):
        H += J2 * spins[:, 2 * x - 1] * spins[:, 2 * x]
    H = H.reshape(2 ** (2**n), 2 ** (2**n - 1))
    H.setflags(write=False)
    return H


def energy_table(n: int, params: ModelParams) -> np.ndarray:
    """Vectorized Hamiltonian, indexed [mask >> (2**n - 1), mask & (2**n - 2)]."""
    _check_partition_depth(n)
    return _energy_table(n, params.J1, params.J2)


def hamiltonian_extremes(n: int, params: ModelParams) -> tuple[int, int]:
    H = energy_table(n, params)
    return int(H.min()), int(H.max())


# -- weights and partition functions ----------------------------------------

def _check_partition_depth(n: int) -> None:
    if not 0 <= n <= MAX_PARTITION_DEPTH:
        raise DepthLimit(f"exhaustive sums need depth 0..{MAX_PARTITION_DEPTH}, got {n}")


def _check_mode(mode: str, bfield: BoundaryField) -> None:
    if mode not in ("padic", "exact_rational"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "exact_rational" and not bfield.is_rational:
        raise ModeUnavailable("exact_rational mode needs a rational boundary field")


def _padic_sum(p: int, terms: Iterable[tuple[int, int, PadicNumber]]) -> PadicNumber:
    """sum of count * p**shift * b, as repeated p-adic addition would give it.

    Each summand keeps its own absolute precision, so the result is the exact
    integer sum of representatives reduced modulo the smallest one.
    """
    terms = [t for t in terms if t[0]]
    K = min(b.abs_precision + s for _, s, b in terms)
    e = min(b.valuation + s for _, s, b in terms)
    total = sum(c * b.unit * p ** (b.valuation + s - e) for c, s, b in terms)
    return PadicNumber._from_scaled(p, e, total, K)


class _Level:
    """Cached enumeration data for one (depth, field, params, mode)."""

    def __init__(self, n: int, bfield: BoundaryField, params: ModelParams, mode: str):
        self.n, self.field, self.params, self.mode = n, bfield, params, mode
        self.H = energy_table(n, params)
        leaves = range(2**n, 2 ** (n + 1))
        if mode == "padic":
            hs = [params.padic(bfield.h(x)) for x in leaves]
            one = from_rational(1, 1, params.p, params.work_precision)
        else:
            hs = [Fraction(bfield.h(x)) for x in leaves]
            one = Fraction(1)
        pairs = [(h, 1 / h) for h in hs]
        products = []
        for pattern in range(2 ** len(hs)):
            b = one
            for i, (h, h_inv) in enumerate(pairs):
                b = b * (h_inv if (pattern >> i) & 1 else h)
            products.append(b)
        self.leaf_products = products
        vals = [_valuation(bfield.h(x), params.p) for x in leaves]
        self.leaf_valuations = np.array(
            [sum(-v if (pattern >> i) & 1 else v for i, v in enumerate(vals))
             for pattern in range(2 ** len(hs))], dtype=np.int64)
        self._Z = None

    def weight_of_mask(self, mask: int):
        shift = 2**self.n - 1
        pattern, interior = mask >> shift, mask & ((1 << shift) - 1)
        H = int(self.H[pattern, interior])
        b = self.leaf_products[pattern]
        if self.mode == "padic":
            return b.shift(H)
        return Fraction(self.params.p) ** H * b

    def _grouped(self, rows: Iterable[tuple[int, np.ndarray]]):
        p = self.params.p
        if self.mode == "padic":
            terms = []
            for pattern, energies in rows:
                values, counts = np.unique(energies, return_counts=True)
                b = self.leaf_products[pattern]
                terms.extend((int(c), int(H), b) for H, c in zip(values, counts))
            return _padic_sum(p, terms)
        total = Fraction(0)
        for pattern, energies in rows:
            values, counts = np.unique(energies, return_counts=True)
            inner = sum(int(c) * Fraction(p) ** int(H) for H, c in zip(values, counts))
            total += inner * self.leaf_products[pattern]
        return total

    @property
    def Z(self):
        if self._Z is None:
            self._Z = self._grouped((L, self.H[L]) for L in range(self.H.shape[0]))
        return self._Z

    def marginal(self, interior: int):
        """sum over leaf spins of the weight of (interior config v leaves)."""
        return self._grouped((L, self.H[L, interior:interior + 1])
                             for L in range(self.H.shape[0]))


@lru_cache(maxsize=512)
def _level(n: int, bfield: BoundaryField, params: ModelParams, mode: str) -> _Level:
    _check_partition_depth(n)
    _check_mode(mode, bfield)
    return _Level(n, bfield, params, mode)


def _valuation(x: FieldValue, p: int) -> int:
    if isinstance(x, PadicNumber):
        return x.valuation
    return rational_valuation(x, p)


def _is_zero(x) -> bool:
    return x.is_zero if isinstance(x, PadicNumber) else x == 0


def weight(sigma: SpinConfig, bfield: BoundaryField, params: ModelParams,
           mode: str = "padic"):
    """p**H(sigma) times the product of h_x**sigma(x) over the leaves."""
    return _level(sigma.depth, bfield, params, mode).weight_of_mask(sigma.mask)


def partition(n: int, bfield: BoundaryField, params: ModelParams,
              mode: str = "padic", order: Sequence[int] | None = None):
    """Z_{n,h}: the sum of ``weight`` over every configuration on V_n.

    With ``order`` (a permutation of all masks) the weights are added one at a
    time in that order; otherwise equal energies are grouped before summing.
    Both give bit-identical results.
    """
    lvl = _level(n, bfield, params, mode)
    if order is None:
        return lvl.Z
    if sorted(order) != list(range(lvl.H.size)):
        raise ValueError("order must be a permutation of all configurations")
    total = None
    for mask in order:
        w = lvl.weight_of_mask(mask)
        total = w if total is None else total + w
    return total


def measure(sigma: SpinConfig, bfield: BoundaryField, params: ModelParams,
            mode: str = "padic"):
    lvl = _level(sigma.depth, bfield, params, mode)
    if _is_zero(lvl.Z):
        raise DegeneratePartition(f"Z_{sigma.depth} vanishes to precision")
    return lvl.weight_of_mask(sigma.mask) / lvl.Z


def measure_log_norms(n: int, bfield: BoundaryField, params: ModelParams,
                      mode: str = "padic") -> np.ndarray:
    """log_p |mu^(n)(sigma)|_p for every mask, from exact valuations.

    The norm is multiplicative, so this needs only H, the leaf valuations and
    v(Z); no per-configuration division is performed.
    """
    lvl = _level(n, bfield, params, mode)
    if _is_zero(lvl.Z):
        raise DegeneratePartition(f"Z_{n} vanishes to precision")
    vz = _valuation(lvl.Z, params.p)
    vals = lvl.H + lvl.leaf_valuations[:, None] - vz
    return -vals.reshape(-1)


# -- consistency ------------------------------------------------------------

@dataclass(frozen=True)
class ConsistencyReport:
    depth: int
    mismatch_valuation: int
    guard: int
    passed: bool
    worst: str

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "mismatch_valuation": self.mismatch_valuation,
            "guard": self.guard,
            "passed": self.passed,
            "worst_configuration": self.worst,
        }


def check_consistency(n: int, bfield: BoundaryField, params: ModelParams) -> ConsistencyReport:
    """Compare the level-n marginal on V_{n-1} with mu^(n-1), for every sigma."""
    if not 1 <= n <= MAX_PARTITION_DEPTH:
        raise DepthLimit(f"consistency is checked at depth 1..{MAX_PARTITION_DEPTH}")
    upper = _level(n, bfield, params, "padic")
    lower = _level(n - 1, bfield, params, "padic")
    for lvl in (upper, lower):
        if lvl.Z.is_zero:
            raise DegeneratePartition(f"Z_{lvl.n} vanishes to precision")
    worst_v, worst_mask = None, 0
    for interior in range(2 ** (2**n - 1)):
        lhs = upper.marginal(interior) / upper.Z
        rhs = lower.weight_of_mask(interior) / lower.Z
        diff = lhs - rhs
        if diff.is_zero:
            vanishes_to(diff, params.guard)
        v = diff.abs_precision if diff.is_zero else diff.valuation
        if worst_v is None or v < worst_v:
            worst_v, worst_mask = v, interior
    return ConsistencyReport(n, worst_v, params.guard, worst_v >= params.guard,
                             str(SpinConfig(n - 1, worst_mask)))


def recurrence(u_y: FieldValue, u_z: FieldValue, params: ModelParams) -> FieldValue:
    """u_x from the successor values u_y, u_z."""
    t2 = params.theta_sq
    if _is_rational(u_y) and _is_rational(u_z):
        u_y, u_z = Fraction(u_y), Fraction(u_z)
        den = u_y * u_z + u_y + u_z + t2
        if den == 0:
            raise DenominatorZeroToPrecision("recurrence denominator is 0")
        return (t2 * u_y * u_z + u_y + u_z + 1) / den
    u_y, u_z = params.padic(u_y), params.padic(u_z)
    prod = u_y * u_z
    den = prod + u_y + u_z + t2
    if den.is_zero:
        raise DenominatorZeroToPrecision(
            f"recurrence denominator is 0 modulo {params.p}^{den.abs_precision}")
    return (t2 * prod + u_y + u_z + 1) / den


def _agree(a: FieldValue, b: FieldValue, params: ModelParams) -> bool:
    """Equality to guard precision, measured relative to the size of a and b.

    Values such as Z_n can have norms far above 1, so a fixed absolute
    threshold would ask for digits the representation never carried.
    """
    if _is_rational(a) and _is_rational(b):
        return Fraction(a) == Fraction(b)
    a, b = params.padic(a), params.padic(b)
    scale = min(x.valuation for x in (a, b) if not x.is_zero) if not (
        a.is_zero and b.is_zero) else 0
    return vanishes_to(a - b, params.guard + scale)


def field_compatible(bfield: BoundaryField, n: int, params: ModelParams) -> bool:
    """Whether h_x**2 = recurrence(h_y**2, h_z**2) at every x in V_{n-1}."""
    build_levels(n)
    seen: dict[tuple, bool] = {}
    for x in range(1, 2**n):
        hx, hy, hz = bfield.h(x), bfield.h(2 * x), bfield.h(2 * x + 1)
        key = (hx, hy, hz)
        if key not in seen:
            seen[key] = _agree(hx * hx, recurrence(hy * hy, hz * hz, params), params)
        if not seen[key]:
            return False
    return True


def a_coeff(h_x: FieldValue, h_y: FieldValue, h_z: FieldValue,
            params: ModelParams) -> FieldValue:
    """The constant a_h(x) with sum_phi p^{J(...)} h_y^phi h_z^phi = a h_x^sigma.

    Computed from the sigma(x) = +1 identity; the sigma(x) = -1 identity and
    the closed-form square must agree or the field is rejected.
    """
    J, p = params.J, Fraction(params.p)
    if not all(_is_rational(h) for h in (h_x, h_y, h_z)):
        h_x, h_y, h_z = (params.padic(h) for h in (h_x, h_y, h_z))
    else:
        h_x, h_y, h_z = (Fraction(h) for h in (h_x, h_y, h_z))
    iy, iz = 1 / h_y, 1 / h_z
    plus = (p ** (3 * J) * (h_y * h_z)
            + p ** (-J) * (iy * h_z + h_y * iz + iy * iz)) / h_x
    minus = (p ** (-J) * (h_y * h_z + iy * h_z + h_y * iz)
             + p ** (3 * J) * (iy * iz)) * h_x
    if not _agree(plus, minus, params):
        raise InconsistentField("the two defining identities for a_h(x) disagree")
    y2, z2 = h_y * h_y, h_z * h_z
    q4 = p ** (4 * J)
    radicand = ((q4 * (y2 * z2) + y2 + z2 + 1) * (y2 * z2 + y2 + z2 + q4)
                / (p ** (2 * J) * (y2 * z2)))
    if not _agree(plus * plus, radicand, params):
        raise InconsistentField("a_h(x)^2 does not match the closed-form radicand")
    return plus


def level_factor(n: int, bfield: BoundaryField, params: ModelParams) -> FieldValue:
    """A_{n,h}: the product of a_h(x) over x in W_n."""
    build_levels(n + 1)
    cache: dict[tuple, FieldValue] = {}
    total = None
    for x in range(2**n, 2 ** (n + 1)):
        key = (bfield.h(x), bfield.h(2 * x), bfield.h(2 * x + 1))
        if key not in cache:
            cache[key] = a_coeff(*key, params)
        total = cache[key] if total is None else total * cache[key]
    return total


def verify_z_recursion(n: int, bfield: BoundaryField, params: ModelParams) -> bool:
    """Brute-force check of Z_{n+1} = A_n * Z_n."""
    if not 0 <= n <= MAX_PARTITION_DEPTH - 1:
        raise DepthLimit(f"Z recursion is checked for n in 0..{MAX_PARTITION_DEPTH - 1}")
    mode = "exact_rational" if bfield.is_rational else "padic"
    A = level_factor(n, bfield, params)
    return _agree(partition(n + 1, bfield, params, mode),
                  A * partition(n, bfield, params, mode), params)
