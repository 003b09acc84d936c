"""Subsets of the cyclic group Z_v and the multiplicative action of its units.

All residues are kept canonically in ``[0, v)``; reduction happens once, when a
set is built from arbitrary integers, and never inside the set operations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Iterator


class EvenModulus(ValueError):
    """Raised when a modulus is even or smaller than 3."""


def check_modulus(v: int) -> int:
    if not isinstance(v, int) or isinstance(v, bool):
        raise TypeError(f"modulus must be an int, got {type(v).__name__}")
    if v < 3 or v % 2 == 0:
        raise EvenModulus(f"modulus must be odd and >= 3, got {v}")
    return v


@dataclass(frozen=True)
class ResidueSet:
    """A subset of Z_v, stored as a strictly increasing tuple."""

    modulus: int
    members: tuple[int, ...]
    _lookup: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        check_modulus(self.modulus)
        members = tuple(self.members)
        for a, b in zip(members, members[1:]):
            if a >= b:
                raise ValueError("members must be strictly increasing")
        if members and (members[0] < 0 or members[-1] >= self.modulus):
            raise ValueError(f"members must lie in [0, {self.modulus})")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "_lookup", frozenset(members))

    @classmethod
    def of(cls, v: int, values: Iterable[int] = ()) -> "ResidueSet":
        """Build a set from arbitrary integers, reducing them mod ``v``."""
        check_modulus(v)
        return cls(v, tuple(sorted({int(x) % v for x in values})))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, x: object) -> bool:
        return x in self._lookup

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.members)) + "}"


@dataclass(frozen=True)
class UnitSubgroup:
    modulus: int
    elements: tuple[int, ...]

    def __post_init__(self):
        v = check_modulus(self.modulus)
        elems = tuple(sorted(set(self.elements)))
        if 1 not in elems:
            raise ValueError("a unit subgroup must contain 1")
        for h in elems:
            if not 0 < h < v or gcd(h, v) != 1:
                raise ValueError(f"{h} is not a unit mod {v}")
        closed = {h * g % v for h in elems for g in elems}
        if not closed <= set(elems):
            raise ValueError(f"{elems} is not closed under multiplication mod {v}")
        object.__setattr__(self, "elements", elems)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)


def units(v: int) -> list[int]:
    """The unit group Z_v^* in increasing order."""
    check_modulus(v)
    return [m for m in range(1, v) if gcd(m, v) == 1]


def negate(X: ResidueSet) -> ResidueSet:
    v = X.modulus
    return ResidueSet.of(v, (-x for x in X))


def translate(X: ResidueSet, t: int) -> ResidueSet:
    v = X.modulus
    return ResidueSet.of(v, (x + t for x in X))


def multiply(X: ResidueSet, m: int) -> ResidueSet:
    v = X.modulus
    return ResidueSet.of(v, (m * x for x in X))


def is_symmetric_set(X: ResidueSet) -> bool:
    v = X.modulus
    return all((v - x) % v in X for x in X)


def is_skew_set(X: ResidueSet) -> bool:
    v = X.modulus
    if len(X) != (v - 1) // 2 or 0 in X:
        return False
    return all((v - x) not in X for x in X)


def half_set(X: ResidueSet) -> ResidueSet:
    """Return ``X ∩ {1, ..., (v-1)/2}``."""
    half = (X.modulus - 1) // 2
    return ResidueSet(X.modulus, tuple(x for x in X if 1 <= x <= half))


def _check_half(Xp: ResidueSet) -> None:
    half = (Xp.modulus - 1) // 2
    if any(not 1 <= x <= half for x in Xp):
        raise ValueError(f"half-set members must lie in 1..{half}")


def decode_symmetric(Xp: ResidueSet, k: int) -> ResidueSet:
    """Recover a symmetric set of size ``k`` from its lower half.

    The parity of ``k`` decides whether 0 belongs to the set, so ``k`` has to
    be supplied; it must equal ``2*|Xp|`` or ``2*|Xp| + 1``.
    """
    _check_half(Xp)
    if k not in (2 * len(Xp), 2 * len(Xp) + 1):
        raise ValueError(
            f"size {k} is inconsistent with a half-set of {len(Xp)} elements"
        )
    v = Xp.modulus
    members = set(Xp) | {v - x for x in Xp}
    if k % 2:
        members.add(0)
    return ResidueSet(v, tuple(sorted(members)))


def decode_skew(Xp: ResidueSet) -> ResidueSet:
    _check_half(Xp)
    v = Xp.modulus
    half = (v - 1) // 2
    upper = {v - x for x in range(1, half + 1) if x not in Xp}
    return ResidueSet(v, tuple(sorted(set(Xp) | upper)))


def complement(X: ResidueSet) -> ResidueSet:
    v = X.modulus
    return ResidueSet(v, tuple(x for x in range(v) if x not in X))


def unit_subgroup(v: int, generators: Iterable[int]) -> UnitSubgroup:
    """Multiplicative closure of ``{1} ∪ generators`` in Z_v^*."""
    check_modulus(v)
    gens = [g % v for g in generators]
    for g in gens:
        if gcd(g, v) != 1:
            raise ValueError(f"generator {g} is not a unit mod {v}")
    elements = {1}
    frontier = [1]
    while frontier:
        h = frontier.pop()
        for g in gens:
            hg = h * g % v
            if hg not in elements:
                elements.add(hg)
                frontier.append(hg)
    return UnitSubgroup(v, tuple(sorted(elements)))


def expand_orbits(H: UnitSubgroup, Y: ResidueSet) -> ResidueSet:
    """Union of the H-orbits of the representatives in ``Y``."""
    if H.modulus != Y.modulus:
        raise ValueError("subgroup and set have different moduli")
    v = Y.modulus
    return ResidueSet.of(v, (h * y for h in H for y in Y))


def is_h_invariant(X: ResidueSet, H: UnitSubgroup) -> bool:
    if H.modulus != X.modulus:
        raise ValueError("subgroup and set have different moduli")
    v = X.modulus
    return all(h * x % v in X for h in H for x in X)


def orbit_representatives(H: UnitSubgroup, X: ResidueSet) -> ResidueSet:
    """Smallest element of every H-orbit contained in ``X``."""
    v = X.modulus
    reps = set()
    for x in X:
        reps.add(min(h * x % v for h in H))
    return ResidueSet(v, tuple(sorted(reps)))
