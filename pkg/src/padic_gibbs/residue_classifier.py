"""Congruence-level existence tests for translation-invariant and
2-periodic boundary fields.

Nothing here builds a p-adic number. The predicates decide existence from
residues mod p alone, so they serve as an independent check on the
constructive solvers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import NonResidue, ZeroCoupling, ZeroResidue

# deterministic Miller-Rabin: correct for every n < 3.3 * 10**24
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_WITNESSES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class Residue(int):
    """An integer in [0, p-1] that remembers its modulus."""

    modulus: int

    def __new__(cls, value: int, modulus: int):
        obj = super().__new__(cls, value % modulus)
        obj.modulus = modulus
        return obj

    def __repr__(self) -> str:
        return f"Residue({int(self)}, {self.modulus})"


def _check_odd_prime(p: int) -> None:
    if p < 3 or p % 2 == 0:
        raise ValueError(f"expected an odd prime, got {p}")


def euler_is_qr(a: int, p: int) -> bool:
    """Euler's criterion: a is a square mod the odd prime p."""
    _check_odd_prime(p)
    a %= p
    if a == 0:
        raise ZeroResidue(f"{p} divides the argument")
    return pow(a, (p - 1) // 2, p) == 1


def tonelli_shanks(a: int, p: int) -> int:
    """Some square root of the quadratic residue a modulo the odd prime p."""
    a %= p
    if a == 0:
        return 0
    if not euler_is_qr(a, p):
        raise NonResidue(f"{a} is not a square mod {p}")
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def sqrt_mod(a: int, p: int) -> Residue:
    """The smaller of the two square roots of a modulo p."""
    r = tonelli_shanks(a, p)
    return Residue(min(r, p - r), p)


def is_square_mod(c: int, p: int) -> bool:
    """Solvability of x^2 = c (mod p); c = 0 counts as solvable (x = 0)."""
    if c % p == 0:
        return True
    return euler_is_qr(c, p)


def minus_three_is_square(p: int) -> bool:
    """Whether -3 is a square in Q_p.

    For p = 3 the valuation is odd; for p = 2 the unit -3 is 5 mod 8.
    """
    if p == 2:
        return (-3) % 8 == 1
    if p == 3:
        return False
    return euler_is_qr(-3, p)


class Reason(str, Enum):
    SMALL_PRIME = "SmallPrime"
    NEGATIVE_COUPLING = "NegativeCoupling"
    ODD_VALUATION = "OddValuation"
    NON_RESIDUE_DISCRIMINANT = "NonResidueDiscriminant"
    NON_RESIDUE_ROOT = "NonResidueRoot"
    CONGRUENCE_SOLVABLE = "CongruenceSolvable"


@dataclass(frozen=True)
class ExistenceVerdict:
    count: int
    reason: Reason
    witnesses: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "reason": self.reason.value,
            "witnesses": {k: int(v) for k, v in sorted(self.witnesses.items())},
        }


def ti_condition(p: int, J: int, root: int | None = None) -> ExistenceVerdict:
    """Number of translation-invariant quasi Gibbs measures for (p, J).

    ``root`` overrides the choice of x0 with x0^2 = 5 (mod p); by default the
    smaller root is used. The verdict does not depend on the choice because
    (x0 - 3)/2 and (-x0 - 3)/2 multiply to 1 mod p.
    """
    if J == 0:
        raise ZeroCoupling("J must be nonzero")
    if J < 0:
        return ExistenceVerdict(3, Reason.NEGATIVE_COUPLING)
    if p in (2, 3, 5):
        return ExistenceVerdict(1, Reason.SMALL_PRIME)
    if not euler_is_qr(5, p):
        return ExistenceVerdict(1, Reason.NON_RESIDUE_DISCRIMINANT)
    x0 = sqrt_mod(5, p) if root is None else root % p
    if x0 * x0 % p != 5 % p:
        raise ValueError(f"{root} is not a square root of 5 mod {p}")
    c = (2 * x0 - 6) % p
    if not is_square_mod(c, p):
        return ExistenceVerdict(1, Reason.NON_RESIDUE_ROOT, {"x0": x0})
    return ExistenceVerdict(
        3, Reason.CONGRUENCE_SOLVABLE, {"x0": x0, "x": sqrt_mod(c, p)}
    )


def periodic_condition(p: int, J: int, root: int | None = None) -> ExistenceVerdict:
    """Number (0 or 2) of 2-periodic quasi Gibbs measures for (p, J).

    For J > 0 this reduces to the solvability of x^2 = -1 (mod p), with p = 2
    excluded. For J < 0 it needs x0^2 = -3 and then x^2 = 2 x0 - 2 (mod p).
    """
    if J == 0:
        raise ZeroCoupling("J must be nonzero")
    if J > 0:
        if p == 2:
            return ExistenceVerdict(0, Reason.SMALL_PRIME)
        if p % 4 == 1:
            return ExistenceVerdict(
                2, Reason.CONGRUENCE_SOLVABLE, {"x": sqrt_mod(-1, p)}
            )
        return ExistenceVerdict(0, Reason.NON_RESIDUE_ROOT)
    if p in (2, 3):
        return ExistenceVerdict(0, Reason.SMALL_PRIME)
    if not euler_is_qr(-3, p):
        return ExistenceVerdict(0, Reason.NON_RESIDUE_DISCRIMINANT)
    x0 = sqrt_mod(-3, p) if root is None else root % p
    if (x0 * x0 + 3) % p:
        raise ValueError(f"{root} is not a square root of -3 mod {p}")
    c = (2 * x0 - 2) % p
    if not is_square_mod(c, p):
        return ExistenceVerdict(0, Reason.NON_RESIDUE_ROOT, {"x0": x0})
    return ExistenceVerdict(
        2, Reason.CONGRUENCE_SOLVABLE, {"x0": x0, "x": sqrt_mod(c, p)}
    )
