"""Search for propus difference families with a prescribed symmetry symbol.

The search is staged. The outer blocks X1 and X4 carry the symmetry
constraints, so they are enumerated. Each pair is run through a spectral
filter and a parity filter. With X2 = X3 the middle block contributes its
autocorrelation twice:

    2 * PAF_2(s) = -PAF_1(s) - PAF_4(s)    for s != 0,

so the target for X2 is fixed by the pair. X2 is then completed by
depth-first search with difference-count bounds. Every emitted family is
re-verified with the difference-count oracle before it leaves this module.
"""

from __future__ import annotations

import itertools
import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache, partial
from typing import Iterator, Optional, Sequence

import numpy as np

from propus.families import (
    DiffFamily,
    FamilyError,
    PropusParamSet,
    _check_symbol,
    paf_vector,
    to_sign_sequence,
    verify_pdf,
)
from propus.residues import (
    ResidueSet,
    check_modulus,
    decode_skew,
    decode_symmetric,
    is_skew_set,
    is_symmetric_set,
    units,
)

log = logging.getLogger(__name__)

PSD_EPS = 1e-6


class ExceptionalRefused(FamilyError):
    pass


class InvalidSearchSpec(FamilyError):
    pass


@dataclass(frozen=True)
class SearchSpec:
    """What to search for.

    ``effort`` caps the number of candidates taken from each enumeration
    stage and ``node_budget`` caps backtracking nodes per completion; both
    are counts, so truncated runs are reproducible. ``seed`` shuffles the
    order in which X1 candidates are tried; ``None`` keeps natural order.
    """

    pps: PropusParamSet
    symbol: str = "s**"
    limit: Optional[int] = 1
    seed: Optional[int] = None
    effort: Optional[int] = None
    reduce: bool = True
    allow_exceptional: bool = False
    node_budget: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "symbol", _check_symbol(self.symbol))
        if not self.pps.is_propus:
            raise InvalidSearchSpec(f"{self.pps} is not a propus parameter set")
        if not self.pps.is_normalized:
            raise InvalidSearchSpec(f"{self.pps} is not normalized (need k2=k3, k1>=k4)")
        if self.pps.is_exceptional and not self.allow_exceptional:
            raise ExceptionalRefused(
                f"{self.pps} is exceptional; pass allow_exceptional=True to search anyway"
            )
        if self.limit is not None and self.limit < 0:
            raise InvalidSearchSpec("limit must be non-negative")


@dataclass
class SearchStats:
    first_candidates: int = 0
    fourth_candidates: int = 0
    pairs: int = 0
    psd_pass: int = 0
    parity_pass: int = 0
    completions: int = 0
    nodes: int = 0
    truncated: bool = False
    emitted: int = 0

    def merge(self, other: "SearchStats") -> None:
        for name in ("pairs", "psd_pass", "parity_pass", "completions", "nodes"):
            setattr(self, name, getattr(self, name) + getattr(other, name))
        self.truncated = self.truncated or other.truncated


# -- candidate generators ----------------------------------------------------


def _multiplier_minimal(X: ResidueSet, mults: Sequence[int]) -> bool:
    v = X.modulus
    return all(tuple(sorted(m * x % v for x in X)) >= X.members for m in mults)


def enumerate_symmetric_blocks(v: int, k: int, reduce: bool = False) -> Iterator[ResidueSet]:
    """Symmetric k-subsets of Z_v, generated from their lower halves.

    With ``reduce`` only the lexicographically smallest set of each orbit
    under multiplication by units is produced.
    """
    check_modulus(v)
    half = (v - 1) // 2
    h = k // 2
    if h > half or k < 0:
        return
    mults = units(v) if reduce else ()
    for combo in itertools.combinations(range(1, half + 1), h):
        X = decode_symmetric(ResidueSet(v, combo), k)
        if reduce and not _multiplier_minimal(X, mults):
            continue
        yield X


def enumerate_skew_blocks(v: int, reduce: bool = False) -> Iterator[ResidueSet]:
    check_modulus(v)
    half = (v - 1) // 2
    mults = units(v) if reduce else ()
    for r in range(half + 1):
        for combo in itertools.combinations(range(1, half + 1), r):
            X = decode_skew(ResidueSet(v, combo))
            if reduce and not _multiplier_minimal(X, mults):
                continue
            yield X


def _min_translate(members: Sequence[int], v: int) -> tuple[int, ...]:
    if not members:
        return ()
    return min(tuple(sorted((x - y) % v for x in members)) for y in members)


def enumerate_unconstrained_blocks(v: int, k: int, reduce: bool = False) -> Iterator[ResidueSet]:
    """k-subsets containing 0, i.e. one or more representatives per translation class.

    With ``reduce`` exactly one representative per class of the affine
    group ``x -> m x + t`` is produced.
    """
    check_modulus(v)
    if k == 0:
        yield ResidueSet(v, ())
        return
    if k > v:
        return
    mults = units(v) if reduce else ()
    for rest in itertools.combinations(range(1, v), k - 1):
        members = (0,) + rest
        if reduce:
            best = min(_min_translate([m * x % v for x in members], v) for m in mults)
            if best != members:
                continue
        yield ResidueSet(v, members)


def _candidates(v: int, k: int, letter: str, reduce: bool) -> list[ResidueSet]:
    return list(_cached_candidates(v, k, letter, reduce))


@lru_cache(maxsize=64)
def _cached_candidates(v, k, letter, reduce):
    if letter == "s":
        return tuple(enumerate_symmetric_blocks(v, k, reduce))
    if letter == "k":
        if k != (v - 1) // 2:
            return ()
        return tuple(enumerate_skew_blocks(v, reduce))
    return tuple(enumerate_unconstrained_blocks(v, k, reduce))


# -- filters -----------------------------------------------------------------


def psd_vector(a) -> np.ndarray:
    """Squared DFT magnitudes of a +/-1 sequence."""
    a = np.asarray(a, dtype=np.float64)
    return np.abs(np.fft.fft(a)) ** 2


def _pair_target(paf1, paf4, psd1, psd4, v) -> Optional[np.ndarray]:
    if np.any(psd1[1:] + psd4[1:] > 4 * v + PSD_EPS):
        return None
    total = -(paf1 + paf4)
    if np.any(total[1:] % 2):
        return None
    T = total // 2
    if np.any((T[1:] - v) % 4):
        return None
    return T


def feasible_pair(X1: ResidueSet, X4: ResidueSet) -> bool:
    """Necessary conditions for (X1, X2, X2, X4) to be a GSDF for some X2.

    Spectral bound: ``psd1[s] + psd4[s] <= 4v`` for s != 0. Parity: the
    middle target ``T(s) = -(PAF1(s) + PAF4(s)) / 2`` must be an integer
    congruent to v mod 4, because every odd-length +/-1 sequence has
    ``PAF(s) = v (mod 4)``.
    """
    v = X1.modulus
    if X4.modulus != v:
        raise ValueError("blocks have different moduli")
    a1, a4 = to_sign_sequence(X1), to_sign_sequence(X4)
    return _pair_target(paf_vector(a1), paf_vector(a4), psd_vector(a1), psd_vector(a4), v) is not None


def pair_target(X1: ResidueSet, X4: ResidueSet) -> Optional[np.ndarray]:
    """The middle-block PAF target for a feasible pair, else ``None``."""
    a1, a4 = to_sign_sequence(X1), to_sign_sequence(X4)
    return _pair_target(paf_vector(a1), paf_vector(a4), psd_vector(a1), psd_vector(a4), X1.modulus)


# -- middle-block completion -------------------------------------------------


class _Budget:
    def __init__(self, limit):
        self.limit = limit
        self.used = 0
        self.exhausted = False

    def spend(self) -> bool:
        self.used += 1
        if self.limit is not None and self.used > self.limit:
            self.exhausted = True
        return not self.exhausted


def complete_middle_block(
    T,
    k2: int,
    v: int,
    limit: Optional[int] = None,
    fix_zero: bool = False,
    node_budget: Optional[int] = None,
    _budget: Optional[_Budget] = None,
) -> Iterator[ResidueSet]:
    """Yield every k2-subset whose PAF equals ``T`` at all nonzero shifts.

    ``T`` is indexed by shift and may have length v (entry 0 ignored) or
    v - 1 (shifts 1..v-1). A target PAF translates to exact difference
    counts ``r(s) = (T(s) - v + 4 k2) / 4``; the search adds elements in
    increasing order and cuts any branch where a count overshoots. With
    ``fix_zero`` only sets containing 0 are produced (one per translation
    class is enough when X2 is unconstrained).
    """
    check_modulus(v)
    T = [int(t) for t in T]
    if len(T) == v - 1:
        T = [v] + T
    if len(T) != v:
        raise ValueError(f"target must have length {v} or {v - 1}")
    budget = _budget if _budget is not None else _Budget(node_budget)

    target = [0] * v
    for s in range(1, v):
        num = T[s] - v + 4 * k2
        if num % 4 or not 0 <= num // 4 <= k2:
            return
        target[s] = num // 4
        if T[s] != T[v - s]:
            return
    if sum(target) != k2 * (k2 - 1) or k2 > v:
        return
    if k2 == 0:
        yield ResidueSet(v, ())
        return

    counts = [0] * v
    chosen: list[int] = []
    emitted = 0

    def place(x: int) -> bool:
        ok = True
        for y in chosen:
            d = (x - y) % v
            counts[d] += 1
            counts[v - d] += 1
            if counts[d] > target[d] or counts[v - d] > target[v - d]:
                ok = False
        chosen.append(x)
        return ok

    def unplace() -> None:
        x = chosen.pop()
        for y in chosen:
            d = (x - y) % v
            counts[d] -= 1
            counts[v - d] -= 1

    def extend(start: int) -> Iterator[ResidueSet]:
        if len(chosen) == k2:
            yield ResidueSet(v, tuple(chosen))
            return
        need = k2 - len(chosen)
        for x in range(start, v - need + 1):
            if not budget.spend():
                return
            if place(x):
                yield from extend(x + 1)
            unplace()
            if limit is not None and emitted >= limit:
                return

    starts = [0] if fix_zero else range(v - k2 + 1)
    for x0 in starts:
        if not budget.spend():
            return
        place(x0)
        for X in extend(x0 + 1):
            yield X
            emitted += 1
            if limit is not None and emitted >= limit:
                unplace()
                return
        unplace()


# -- canonical form ----------------------------------------------------------


def canonical_form(family: DiffFamily) -> bytes:
    """A canonical byte string for ``family`` under a fixed reduction group.

    The group is generated by: multiplying all blocks by one unit m,
    translating (independently) each block whose declared letter is '*',
    and swapping X1 with X4 when they carry the same letter and size.
    This is a deduplication key, not a full equivalence classification.
    """
    v = family.v
    X1, X2, _, X4 = family.blocks
    l1, l2, l4 = family.symbol
    swap = l1 == l4 and len(X1) == len(X4)

    def reduced(X: ResidueSet, letter: str, m: int) -> tuple[int, ...]:
        Y = sorted(m * x % v for x in X)
        return _min_translate(Y, v) if letter == "*" else tuple(Y)

    best = None
    for m in units(v):
        a, b, c = reduced(X1, l1, m), reduced(X2, l2, m), reduced(X4, l4, m)
        for cand in ((a, b, c), (c, b, a)) if swap else ((a, b, c),):
            if best is None or cand < best:
                best = cand
    body = "|".join(",".join(map(str, blk)) for blk in best)
    return f"{v}:{family.symbol}:{body}".encode("ascii")


# -- driver ------------------------------------------------------------------


@dataclass(frozen=True)
class _Context:
    spec: SearchSpec
    fourths: tuple
    fourth_pafs: tuple
    fourth_psds: tuple


def _solve_for_first(X1: ResidueSet, ctx: _Context) -> tuple[list[DiffFamily], SearchStats]:
    spec = ctx.spec
    v = spec.pps.v
    k2 = spec.pps.k[1]
    l2 = spec.symbol[1]
    stats = SearchStats()
    budget = _Budget(spec.node_budget)
    a1 = to_sign_sequence(X1)
    paf1, psd1 = paf_vector(a1), psd_vector(a1)
    found, seen = [], set()
    for X4, paf4, psd4 in zip(ctx.fourths, ctx.fourth_pafs, ctx.fourth_psds):
        stats.pairs += 1
        if np.any(psd1[1:] + psd4[1:] > 4 * v + PSD_EPS):
            continue
        stats.psd_pass += 1
        T = _pair_target(paf1, paf4, psd1, psd4, v)
        if T is None:
            continue
        stats.parity_pass += 1
        budget.limit = spec.node_budget
        budget.used = 0
        for X2 in complete_middle_block(T, k2, v, fix_zero=(l2 == "*"), _budget=budget):
            stats.completions += 1
            if l2 == "s" and not is_symmetric_set(X2):
                continue
            if l2 == "k" and not is_skew_set(X2):
                continue
            family = DiffFamily(spec.pps, (X1, X2, X2, X4), spec.symbol)
            key = canonical_form(family)
            if key in seen:
                continue
            seen.add(key)
            found.append(family)
            if spec.limit is not None and len(found) >= spec.limit:
                break
        stats.nodes += budget.used
        stats.truncated = stats.truncated or budget.exhausted
        if spec.limit is not None and len(found) >= spec.limit:
            break
    return found, stats


def search_pdf(
    spec: SearchSpec, jobs: int = 1, stats: Optional[SearchStats] = None
) -> Iterator[DiffFamily]:
    """Yield verified, pairwise non-equivalent PDFs matching ``spec``.

    Families come out in X1-candidate order, so a fixed seed gives a fixed
    emission order regardless of ``jobs``.
    """
    stats = stats if stats is not None else SearchStats()
    if spec.limit == 0:
        return
    v = spec.pps.v
    k1, _, _, k4 = spec.pps.k
    l1, _, l4 = spec.symbol

    firsts = _candidates(v, k1, l1, spec.reduce)
    if spec.seed is not None:
        random.Random(spec.seed).shuffle(firsts)
    fourths = _candidates(v, k4, l4, False)
    if spec.effort is not None:
        firsts, fourths = firsts[: spec.effort], fourths[: spec.effort]
    stats.first_candidates, stats.fourth_candidates = len(firsts), len(fourths)
    log.info("%s (%s): %d X1 candidates, %d X4 candidates",
             spec.pps, spec.symbol, len(firsts), len(fourths))

    signs = [to_sign_sequence(X) for X in fourths]
    ctx = _Context(
        spec,
        tuple(fourths),
        tuple(paf_vector(a) for a in signs),
        tuple(psd_vector(a) for a in signs),
    )
    worker = partial(_solve_for_first, ctx=ctx)

    seen: set[bytes] = set()
    executor = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 and len(firsts) > 1 else None
    try:
        results = executor.map(worker, firsts, chunksize=max(1, len(firsts) // (4 * jobs))) \
            if executor else map(worker, firsts)
        for found, sub in results:
            stats.merge(sub)
            for family in found:
                verify_pdf(family)
                key = canonical_form(family)
                if key in seen:
                    continue
                seen.add(key)
                stats.emitted += 1
                yield family
                if spec.limit is not None and stats.emitted >= spec.limit:
                    return
    finally:
        if executor is not None:
            executor.shutdown(wait=False, cancel_futures=True)
        log.info("pairs=%d psd_pass=%d parity_pass=%d completions=%d emitted=%d%s",
                 stats.pairs, stats.psd_pass, stats.parity_pass, stats.completions,
                 stats.emitted, " (truncated)" if stats.truncated else "")
