"""Brute-force reference solver for small instances."""
import logging
import time
from typing import Collection, List, Optional

from .config import Config
from .core import BudgetValue, Instance
from .exceptions import ContractViolation, SizeLimitError
from .report import SolveReport

logger = logging.getLogger(__name__)


class _Search:
    """Depth-first search over valid orderings, optionally with a forced first block."""

    def __init__(self, inst: Instance, first_block: Optional[Collection[str]], prune: bool):
        self.inst = inst
        self.prune = prune
        self.ids = list(inst.vertices)
        self.n = len(self.ids)
        self.weight = [inst.weight(v) for v in self.ids]
        self.sold = [inst.is_sold(v) for v in self.ids]
        self.need = [
            sum(1 << inst.index(b) for b in inst.neighbors(v)) if inst.is_sold(v) else 0
            for v in self.ids
        ]
        self.block_mask = 0
        if first_block is not None:
            block = set(first_block)
            unknown = block - set(self.ids)
            if unknown:
                raise ContractViolation(f"forced block has unknown vertices: {sorted(unknown)}")
            for v in block:
                if inst.is_sold(v) and not inst.neighbors(v) <= block:
                    raise ContractViolation(f"forced block holds '{v}' without all of its neighbours")
                self.block_mask |= 1 << inst.index(v)
        self.full = (1 << self.n) - 1
        self.nodes = 0
        self.best = 0
        self.best_order: Optional[List[int]] = None

    def default_order(self) -> List[int]:
        """Buy everything in the block, sell it, then buy the rest and sell the rest."""
        inside = [i for i in range(self.n) if self.block_mask >> i & 1]
        outside = [i for i in range(self.n) if not self.block_mask >> i & 1]
        order = []
        for group in (inside, outside):
            order.extend(i for i in group if not self.sold[i])
            order.extend(i for i in group if self.sold[i])
        return order

    def peak_of(self, order: List[int]) -> int:
        level = peak = 0
        for i in order:
            level += self.weight[i]
            peak = max(peak, level)
        return peak

    def run(self, bound: int, stop_at_first: bool) -> None:
        """Looks for an ordering with peak < bound."""
        self.best = bound
        self.stop_at_first = stop_at_first
        self._dfs(0, 0, 0, [])

    def _dfs(self, placed: int, level: int, peak: int, seq: List[int]) -> bool:
        self.nodes += 1
        if self.prune and peak >= self.best:
            return False
        if placed == self.full:
            if peak < self.best:
                self.best = peak
                self.best_order = list(seq)
                return self.stop_at_first
            return False

        pool = self.block_mask & ~placed
        if not pool:
            pool = self.full & ~placed
        candidates = [
            i for i in range(self.n)
            if pool >> i & 1 and (not self.sold[i] or self.need[i] & placed == self.need[i])
        ]
        if self.prune:
            ready = [i for i in candidates if self.sold[i]]
            if ready:
                candidates = ready[:1]

        for i in candidates:
            new_level = level + self.weight[i]
            seq.append(i)
            done = self._dfs(placed | 1 << i, new_level, max(peak, new_level), seq)
            seq.pop()
            if done:
                return True
        return False


def _check_size(inst: Instance, config: Optional[Config]) -> Config:
    config = config or Config()
    if len(inst) > config.oracle_limit:
        raise SizeLimitError(
            f"oracle refuses {len(inst)} vertices (limit {config.oracle_limit}); use the exact DP"
        )
    return config


def brute_force_budget(
    inst: Instance,
    restriction: Optional[Collection[str]] = None,
    config: Optional[Config] = None,
    prune: bool = True,
) -> SolveReport:
    """
    Computes the optimal budget by enumerating valid orderings.

    Args:
        inst: Instance to solve
        restriction: Optional vertex block that must be processed before anything else
        config: Size limits
        prune: Enables selling ready vertices immediately and incumbent cuts

    Returns:
        Self-certifying SolveReport

    Raises:
        SizeLimitError: If the instance exceeds the oracle limit
        ContractViolation: If the forced block is not closed under precedence
    """
    _check_size(inst, config)
    start = time.perf_counter()
    search = _Search(inst, restriction, prune)
    fallback = search.default_order()
    fallback_peak = search.peak_of(fallback)
    search.run(fallback_peak, stop_at_first=False)
    order = search.best_order if search.best_order is not None else fallback
    budget = search.best if search.best_order is not None else fallback_peak
    logger.debug("oracle explored %d nodes on %d vertices", search.nodes, len(inst))
    return SolveReport(
        budget=budget,
        witness=tuple(search.ids[i] for i in order),
        algorithm="oracle",
        elapsed=time.perf_counter() - start,
        states=search.nodes,
    )


def brute_force_feasible(
    inst: Instance,
    K: BudgetValue,
    config: Optional[Config] = None,
    restriction: Optional[Collection[str]] = None,
) -> bool:
    """Decides bg(inst) <= K by the same search with early exit."""
    _check_size(inst, config)
    if K < 0:
        return False
    search = _Search(inst, restriction, prune=True)
    search.run(K + 1, stop_at_first=True)
    return search.best_order is not None

