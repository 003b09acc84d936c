"""Parameter sets and difference-family verification.

A family of four blocks in Z_v is checked by two independent routes: by
counting differences directly, and by summing periodic autocorrelations of
the associated +/-1 sequences. Both routes always run and must agree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from propus.residues import (
    EvenModulus,
    ResidueSet,
    UnitSubgroup,
    check_modulus,
    complement,
    is_h_invariant,
    is_skew_set,
    is_symmetric_set,
)

SYMBOL_LETTERS = frozenset("sk*")


class FamilyError(ValueError):
    """Base class for parameter-set and family verification failures."""


class ArithmeticMismatch(FamilyError):
    pass


class OutOfRange(FamilyError):
    pass


class NegativeLambda(FamilyError):
    pass


class NotADF(FamilyError):
    """The blocks are not a difference family.

    ``deviations`` maps every offending nonzero difference ``d`` to
    ``count(d) - lambda``.
    """

    def __init__(self, lam: int, deviations: dict[int, int], report=None):
        self.lam = lam
        self.deviations = dict(deviations)
        self.report = report
        shown = ", ".join(f"d={d}: {dev:+d}" for d, dev in sorted(self.deviations.items()))
        super().__init__(f"not a difference family with lambda={lam} ({shown})")


class RouteDisagreement(FamilyError):
    """The counting and autocorrelation routes disagree. Indicates a bug."""


class LambdaMismatch(FamilyError):
    pass


class BlocksNotEqual(FamilyError):
    pass


class NoSymmetricBlock(FamilyError):
    pass


class SymbolMismatch(FamilyError):
    pass


class SizeMismatch(FamilyError):
    pass


class NotInvariant(FamilyError):
    pass


@dataclass(frozen=True)
class PropusParamSet:
    """``(v; k1, k2, k3, k4; lambda)`` with derived classification flags.

    The flags are computed from the numbers; ``lam`` is stored as given so
    that a declared value can be compared with the one derived from blocks.
    """

    v: int
    k: tuple[int, int, int, int]
    lam: int

    def __post_init__(self):
        check_modulus(self.v)
        k = tuple(int(x) for x in self.k)
        if len(k) != 4:
            raise ValueError("a parameter set has exactly four block sizes")
        if any(x < 0 for x in k):
            raise OutOfRange("block sizes must be non-negative")
        object.__setattr__(self, "k", k)

    @property
    def is_gsps(self) -> bool:
        k, v, lam = self.k, self.v, self.lam
        return (
            lam >= 0
            and sum(x * (x - 1) for x in k) == lam * (v - 1)
            and sum(k) == lam + v
        )

    @property
    def is_propus(self) -> bool:
        return self.is_gsps and len(set(self.k)) < 4

    @property
    def is_normalized(self) -> bool:
        k1, k2, k3, k4 = self.k
        return k2 == k3 and k1 >= k4

    @property
    def is_exceptional(self) -> bool:
        return len(set(self.k)) == 1

    def __str__(self) -> str:
        return f"({self.v};{','.join(map(str, self.k))};{self.lam})"


def validate_pps(v: int, k1: int, k2: int, k3: int, k4: int) -> PropusParamSet:
    """Check the Goethals-Seidel parameter equations and return the set.

    Lambda is derived as ``sum(k) - v``; the second equation
    ``sum k(k-1) = lambda (v-1)`` must then hold.
    """
    check_modulus(v)
    ks = (k1, k2, k3, k4)
    half = (v - 1) // 2
    for i, k in enumerate(ks, 1):
        if not 0 <= k <= half:
            raise OutOfRange(f"k{i}={k} outside [0, {half}]")
    lam = sum(ks) - v
    if lam < 0:
        raise NegativeLambda(f"sum of block sizes {sum(ks)} is below v={v}")
    lhs = sum(k * (k - 1) for k in ks)
    if lhs != lam * (v - 1):
        raise ArithmeticMismatch(
            f"sum k(k-1) = {lhs} but lambda*(v-1) = {lam * (v - 1)} (lambda={lam})"
        )
    return PropusParamSet(v, ks, lam)


def enumerate_pps(v: int, dedupe_multisets: bool = False) -> list[PropusParamSet]:
    """All normalized propus parameter sets for ``v`` in lexicographic order.

    With ``dedupe_multisets`` only the first set of each size multiset is
    kept, so ``(5;1,2,2,1;1)`` and ``(5;2,1,1,2;1)`` collapse into one.
    """
    check_modulus(v)
    half = (v - 1) // 2
    found = []
    seen = set()
    for k1 in range(half + 1):
        for k2 in range(half + 1):
            for k4 in range(k1 + 1):
                try:
                    pps = validate_pps(v, k1, k2, k2, k4)
                except FamilyError:
                    continue
                key = tuple(sorted(pps.k))
                if dedupe_multisets and key in seen:
                    continue
                seen.add(key)
                found.append(pps)
    return found


def difference_counts(X: ResidueSet) -> np.ndarray:
    """``counts[d]`` = number of ordered pairs ``x != y`` in X with ``x - y = d``."""
    v = X.modulus
    counts = [0] * v
    for x, y in itertools.permutations(X.members, 2):
        counts[(x - y) % v] += 1
    return np.array(counts, dtype=np.int64)


def to_sign_sequence(X: ResidueSet) -> np.ndarray:
    """+/-1 vector of length v with -1 marking members of X."""
    a = np.ones(X.modulus, dtype=np.int64)
    a[list(X.members)] = -1
    return a


def paf_vector(a: np.ndarray) -> np.ndarray:
    """Periodic autocorrelation ``PAF(s) = sum_j a_j a_{j+s}``, s = 0..v-1."""
    a = np.asarray(a, dtype=np.int64)
    return np.array([int(a @ np.roll(a, -s)) for s in range(len(a))], dtype=np.int64)


@dataclass(frozen=True)
class GsdfReport:
    v: int
    lam: int
    diff_total: tuple[int, ...]
    paf_total: tuple[int, ...]
    counts_ok: bool
    paf_ok: bool

    @property
    def ok(self) -> bool:
        return self.counts_ok and self.paf_ok


def gsdf_report(blocks: Sequence[ResidueSet]) -> GsdfReport:
    """Run both verification routes without raising."""
    if len(blocks) != 4:
        raise ValueError("expected four blocks")
    v = blocks[0].modulus
    if any(B.modulus != v for B in blocks):
        raise ValueError("blocks have different moduli")
    lam = sum(len(B) for B in blocks) - v
    diff = sum(difference_counts(B) for B in blocks)
    paf = sum(paf_vector(to_sign_sequence(B)) for B in blocks)
    counts_ok = lam >= 0 and bool(np.all(diff[1:] == lam))
    paf_ok = bool(np.all(paf[1:] == 0))
    return GsdfReport(
        v=v,
        lam=lam,
        diff_total=tuple(int(x) for x in diff),
        paf_total=tuple(int(x) for x in paf),
        counts_ok=counts_ok,
        paf_ok=paf_ok,
    )


def verify_gsdf(blocks: Sequence[ResidueSet]) -> GsdfReport:
    """Verify a Goethals-Seidel difference family; raise on failure."""
    report = gsdf_report(blocks)
    if report.lam < 0:
        raise NegativeLambda(f"lambda = {report.lam} < 0")
    if report.counts_ok != report.paf_ok:
        raise RouteDisagreement(
            f"difference counts say {report.counts_ok}, PAF says {report.paf_ok}"
        )
    if not report.ok:
        deviations = {
            d: c - report.lam
            for d, c in enumerate(report.diff_total)
            if d and c != report.lam
        }
        raise NotADF(report.lam, deviations, report)
    return report


def is_gsdf(blocks: Sequence[ResidueSet]) -> bool:
    try:
        verify_gsdf(blocks)
    except (NotADF, NegativeLambda):
        return False
    return True


def _check_symbol(symbol: str) -> str:
    symbol = symbol.strip().strip("()").replace("{", "").replace("}", "")
    if len(symbol) != 3 or not set(symbol) <= SYMBOL_LETTERS:
        raise ValueError(f"invalid symmetry symbol {symbol!r}")
    return symbol


@dataclass(frozen=True)
class BlockEncoding:
    """How a block was (or should be) written: kind plus the listed values."""

    kind: str
    values: tuple[int, ...] = ()


@dataclass(frozen=True)
class DiffFamily:
    """Four blocks in Z_v with a declared parameter set and symmetry symbol.

    ``encodings`` only records how the blocks were written down and takes no
    part in equality.
    """

    params: PropusParamSet
    blocks: tuple[ResidueSet, ResidueSet, ResidueSet, ResidueSet]
    symbol: str = "***"
    orbit_group: Optional[UnitSubgroup] = None
    encodings: Optional[tuple] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(self.blocks) != 4:
            raise ValueError("a family has four blocks")
        object.__setattr__(self, "blocks", tuple(self.blocks))
        object.__setattr__(self, "symbol", _check_symbol(self.symbol))
        v = self.params.v
        if any(B.modulus != v for B in self.blocks):
            raise ValueError("block moduli differ from the parameter set")
        if self.orbit_group is not None and self.orbit_group.modulus != v:
            raise ValueError("orbit group modulus differs from the parameter set")

    @classmethod
    def from_blocks(cls, X1, X2, X4, X3=None, symbol="***", lam=None, **kw):
        """Build a family whose parameter set is read off the block sizes.

        ``X3`` defaults to ``X2``. ``lam`` overrides the derived lambda, which
        is useful only for exercising the declared-versus-derived check.
        """
        X3 = X2 if X3 is None else X3
        blocks = (X1, X2, X3, X4)
        v = X1.modulus
        ks = tuple(len(B) for B in blocks)
        if lam is None:
            lam = sum(ks) - v
        return cls(PropusParamSet(v, ks, lam), blocks, symbol, **kw)

    @property
    def v(self) -> int:
        return self.params.v

    @property
    def lam(self) -> int:
        return self.params.lam


def block_letter(X: ResidueSet) -> str:
    if is_symmetric_set(X):
        return "s"
    if is_skew_set(X):
        return "k"
    return "*"


def compute_symbol(family: DiffFamily) -> str:
    """Symmetry letters of X1, X2 and X4."""
    X1, X2, _, X4 = family.blocks
    return block_letter(X1) + block_letter(X2) + block_letter(X4)


def symbol_matches(declared: str, computed: str) -> bool:
    """A declared '*' matches anything; 's' and 'k' must match exactly."""
    declared = _check_symbol(declared)
    return all(d == "*" or d == c for d, c in zip(declared, computed))


@dataclass(frozen=True)
class PdfReport:
    params: PropusParamSet
    gsdf: GsdfReport
    symbol: str
    computed_symbol: str

    @property
    def lam(self) -> int:
        return self.gsdf.lam


def verify_pdf(family: DiffFamily) -> PdfReport:
    """Verify a propus difference family; raise the first failure found."""
    ks = tuple(len(B) for B in family.blocks)
    if ks != family.params.k:
        raise SizeMismatch(f"block sizes {ks} differ from declared {family.params.k}")
    X1, X2, X3, X4 = family.blocks
    if X2 != X3:
        raise BlocksNotEqual("X2 and X3 differ")
    gsdf = verify_gsdf(family.blocks)
    if gsdf.lam != family.params.lam:
        raise LambdaMismatch(
            f"declared lambda {family.params.lam}, derived {gsdf.lam}"
        )
    if not (is_symmetric_set(X1) or is_symmetric_set(X4)):
        raise NoSymmetricBlock("neither X1 nor X4 is symmetric")
    computed = compute_symbol(family)
    if not symbol_matches(family.symbol, computed):
        raise SymbolMismatch(f"declared ({family.symbol}), computed ({computed})")
    H = family.orbit_group
    if H is not None:
        for i, B in enumerate(family.blocks, 1):
            if not is_h_invariant(B, H):
                raise NotInvariant(f"X{i} is not invariant under {H.elements}")
    return PdfReport(family.params, gsdf, family.symbol, computed)


def complement_block(family: DiffFamily, i: int) -> DiffFamily:
    """Replace block ``i`` (1-based) by its complement in Z_v.

    The result is again a GSDF with lambda increased by ``v - 2 k_i``. A
    skew block stops being skew, so its symbol letter becomes '*'.
    """
    if not 1 <= i <= 4:
        raise ValueError("block index must be 1..4")
    blocks = list(family.blocks)
    blocks[i - 1] = complement(blocks[i - 1])
    ks = tuple(len(B) for B in blocks)
    lam = family.params.lam + family.v - 2 * len(family.blocks[i - 1])
    symbol = list(family.symbol)
    pos = {1: 0, 2: 1, 4: 2}.get(i)
    if pos is not None and symbol[pos] == "k":
        symbol[pos] = "*"
    return replace(
        family,
        params=PropusParamSet(family.v, ks, lam),
        blocks=tuple(blocks),
        symbol="".join(symbol),
        encodings=None,
    )


__all__ = [
    "ArithmeticMismatch",
    "BlockEncoding",
    "BlocksNotEqual",
    "DiffFamily",
    "EvenModulus",
    "FamilyError",
    "GsdfReport",
    "LambdaMismatch",
    "NegativeLambda",
    "NoSymmetricBlock",
    "NotADF",
    "NotInvariant",
    "OutOfRange",
    "PdfReport",
    "PropusParamSet",
    "RouteDisagreement",
    "SizeMismatch",
    "SymbolMismatch",
    "block_letter",
    "complement_block",
    "compute_symbol",
    "difference_counts",
    "enumerate_pps",
    "gsdf_report",
    "is_gsdf",
    "paf_vector",
    "symbol_matches",
    "to_sign_sequence",
    "validate_pps",
    "verify_gsdf",
    "verify_pdf",
]
