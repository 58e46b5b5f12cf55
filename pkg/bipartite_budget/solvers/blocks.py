"""
Block algebra for merging solved sub-instances.

A Block summarises a contiguous ordering segment by its peak (highest
running level reached inside the segment, never below 0) and its net
(cost minus gain over the whole segment). A Strategy is a list of blocks
kept in non-decreasing rank; concatenating its blocks gives an ordering.

Blocks with net <= 0 come first by increasing peak, blocks with net > 0
after them by decreasing (peak - net). Series composition merges a block
into its predecessor while it would rather run first; parallel
composition interleaves two strategies by rank. Together they give the
optimal peak for any nesting of disjoint unions and forced sequences.
"""
import heapq
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

from ..core import BudgetValue, Instance, peak_and_level


@dataclass(frozen=True)
class Block:
    """Contiguous segment of an ordering."""

    vertices: Tuple[str, ...]
    peak: int
    net: int

    @classmethod
    def of(cls, inst: Instance, sequence: Iterable[str]) -> "Block":
        sequence = tuple(sequence)
        peak, net = peak_and_level(inst, sequence)
        return cls(sequence, peak, net)

    def then(self, other: "Block") -> "Block":
        return Block(
            self.vertices + other.vertices,
            max(self.peak, self.net + other.peak),
            self.net + other.net,
        )

    @property
    def rank(self) -> Tuple[int, int]:
        if self.net <= 0:
            return (0, self.peak)
        return (1, self.net - self.peak)

    @property
    def profile(self) -> Tuple[int, int]:
        return (self.peak, self.net)


Strategy = Tuple[Block, ...]

EMPTY: Strategy = ()


def single(inst: Instance, vid: str) -> Strategy:
    return (Block.of(inst, (vid,)),)


def series(first: Strategy, second: Strategy) -> Strategy:
    """All of ``first`` before all of ``second``."""
    stack: List[Block] = list(first)
    for block in second:
        stack.append(block)
        while len(stack) >= 2 and stack[-1].rank < stack[-2].rank:
            top = stack.pop()
            stack[-1] = stack[-1].then(top)
    return tuple(stack)


def parallel(*strategies: Strategy) -> Strategy:
    """Interleaves independent strategies; ties keep argument order."""
    keyed = [
        [(block.rank, position, i, block) for i, block in enumerate(strategy)]
        for position, strategy in enumerate(strategies)
    ]
    return tuple(item[3] for item in heapq.merge(*keyed))


def chain(*strategies: Strategy) -> Strategy:
    result = EMPTY
    for strategy in strategies:
        result = series(result, strategy)
    return result


def unordered(inst: Instance, vids: Iterable[str]) -> Strategy:
    """Vertices with no constraints among themselves."""
    return parallel(*(single(inst, v) for v in inst.sort_canonical(vids)))


def biclique(inst: Instance, bought: Iterable[str], sold: Iterable[str]) -> Strategy:
    """Every bought vertex before every sold vertex."""
    return series(unordered(inst, bought), unordered(inst, sold))


def with_isolated(inst: Instance, core_strategy: Strategy) -> Strategy:
    """Adds the isolated sold vertices (first) and isolated bought vertices (last)."""
    head, _, tail = inst.split_isolated()
    return parallel(unordered(inst, head), core_strategy, unordered(inst, tail))


def value(strategy: Strategy) -> BudgetValue:
    peak = level = 0
    for block in strategy:
        peak = max(peak, level + block.peak)
        level += block.net
    return peak


def net(strategy: Strategy) -> int:
    return sum(block.net for block in strategy)


def ordering(strategy: Strategy) -> Tuple[str, ...]:
    return tuple(v for block in strategy for v in block.vertices)


def profile(strategy: Strategy) -> Tuple[Tuple[int, int], ...]:
    return tuple(block.profile for block in strategy)


def combine(h1: Strategy, h2: Strategy, K: BudgetValue) -> Tuple[bool, Strategy]:
    """
    Merges the strategies of two independent sub-instances.

    Args:
        h1: Strategy of the first sub-instance
        h2: Strategy of the second sub-instance
        K: Budget to test

    Returns:
        (value of the merge <= K, merged strategy)
    """
    merged = parallel(h1, h2)
    return value(merged) <= K, merged


def prune_alternatives(alternatives: Sequence[Strategy]) -> List[Strategy]:
    """Drops duplicate profiles and single blocks beaten by a single block of equal net."""
    seen = set()
    unique: List[Strategy] = []
    for strategy in alternatives:
        key = profile(strategy)
        if key in seen:
            continue
        seen.add(key)
        unique.append(strategy)

    best_single = {}
    for strategy in unique:
        if len(strategy) == 1:
            block = strategy[0]
            if block.net not in best_single or block.peak < best_single[block.net]:
                best_single[block.net] = block.peak
    return [
        s for s in unique
        if len(s) != 1 or s[0].peak == best_single[s[0].net]
    ]
