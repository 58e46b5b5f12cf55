"""
Solver for instances with a min-max ordering (bipartite permutation graphs).

Along a min-max order of the bought vertices every sold neighbourhood is an
interval, and no interval reaches past another on both sides. Buying a
prime interval [a, c] of a window [l, r] and selling what it releases
therefore leaves two independent windows, [l, a-1] and [c+1, r]. A sold
vertex of a window keeps only the part of its interval inside the window;
everything outside has been bought already.

The table keeps one strategy per window: the best over its primes of
"prime block, then both child windows merged". The prime-step search then
tries to beat the table's value by one; when it cannot within the work
budget the table's value stands.
"""
import logging
import time
from typing import Dict, List, Optional, Tuple

from ..config import Config
from ..core import BudgetValue, Instance, Ordering, budget_of_ordering
from ..exceptions import ClassMismatchError, RecognitionError, WorkBudgetExceeded
from ..recognition import check_min_max, find_min_max_ordering
from ..report import SolveReport
from . import blocks
from .search import PrimeStepSearch

logger = logging.getLogger(__name__)

Span = Tuple[int, int, str]


def _engine(inst: Instance, order_b: Tuple[str, ...], config: Config) -> PrimeStepSearch:
    # residual neighbourhoods are intervals of order_b; try them left to right
    core_bought = [b for b in inst.bought_ids if inst.neighbors(b)]
    position = {b: i for i, b in enumerate(order_b)}
    ranks = [position[b] for b in core_bought]

    def by_interval(members: Tuple[int, ...]):
        spots = [ranks[i] for i in members]
        return (min(spots), max(spots))

    return PrimeStepSearch(inst, config.work_budget, prime_key=by_interval)


def _resolve_order(inst: Instance, order_b: Optional[Tuple[str, ...]], config: Config) -> Tuple[str, ...]:
    if order_b is None:
        try:
            order_b, _ = find_min_max_ordering(inst, config)
        except RecognitionError as e:
            raise ClassMismatchError(f"no min-max ordering: {e}") from e
    elif not check_min_max(inst, tuple(order_b)):
        raise ClassMismatchError("given B-ordering is not a min-max ordering")
    return tuple(order_b)


def _minimal_spans(spans: List[Span]) -> List[Tuple[int, int]]:
    """Distinct spans with no other span strictly inside, left to right."""
    distinct = sorted({(a, c) for a, c, _ in spans}, key=lambda t: (-t[0], t[1]))
    out = []
    best = None
    for a, c in distinct:
        if best is None or c < best:
            out.append((a, c))
            best = c
    return sorted(out)


def _key(strategy: blocks.Strategy):
    return blocks.value(strategy), blocks.profile(strategy)


class WindowTable:
    """
    Best strategies of window sub-instances, memoised by (left, right).

    Windows are positions in the min-max order restricted to bought vertices
    that have a neighbour.
    """

    def __init__(self, inst: Instance, order_b: Tuple[str, ...]):
        _, core, _ = inst.split_isolated()
        self.inst = inst
        self.order = [b for b in order_b if b in core and core.is_bought(b)]
        position = {b: i for i, b in enumerate(self.order)}
        spans = []
        for s in core.sold_ids:
            idx = [position[b] for b in core.neighbors(s)]
            spans.append((min(idx), max(idx), s))
        self.spans: List[Span] = sorted(spans, key=lambda t: (t[0], t[1], core.index(t[2])))
        self.memo: Dict[Tuple[int, int], blocks.Strategy] = {}

    @property
    def states(self) -> int:
        return len(self.memo)

    def window(self, left: int, right: int) -> blocks.Strategy:
        if left > right:
            return blocks.EMPTY
        key = (left, right)
        if key in self.memo:
            return self.memo[key]

        members = [
            (max(lo, left), min(hi, right), s)
            for lo, hi, s in self.spans
            if lo <= right and hi >= left
        ]
        best: Optional[blocks.Strategy] = None
        for a, c in _minimal_spans(members):
            released = self.inst.sort_canonical(s for lo, hi, s in members if a <= lo and hi <= c)
            prime = blocks.Block.of(self.inst, tuple(self.order[a:c + 1]) + tuple(released))
            rest = blocks.parallel(self.window(left, a - 1), self.window(c + 1, right))
            candidate = blocks.series((prime,), rest)
            if best is None or _key(candidate) < _key(best):
                best = candidate
        if best is None:
            # a window always meets some sold vertex; kept for empty cores
            best = blocks.unordered(self.inst, self.order[left:right + 1])
        self.memo[key] = best
        return best

    def strategy(self) -> blocks.Strategy:
        return blocks.with_isolated(self.inst, self.window(0, len(self.order) - 1))


def permutation_strategy(
    inst: Instance,
    order_b: Optional[Tuple[str, ...]] = None,
    config: Optional[Config] = None,
) -> blocks.Strategy:
    """
    The window table's strategy for the whole instance.

    Raises:
        ClassMismatchError: If no min-max ordering exists or the given one is not valid
    """
    config = config or Config()
    return WindowTable(inst, _resolve_order(inst, order_b, config)).strategy()


def feasible_permutation(
    inst: Instance,
    K: BudgetValue,
    order_b: Optional[Tuple[str, ...]] = None,
    config: Optional[Config] = None,
) -> Tuple[bool, Optional[Ordering]]:
    """
    Decides bg <= K along a min-max ordering.

    Args:
        inst: Instance
        K: Budget to test
        order_b: Min-max order of the bought vertices; searched for if omitted
        config: Work budget and ordering search limit

    Returns:
        (feasible, witness or None)

    Raises:
        ClassMismatchError: If no min-max ordering exists or the given one is not valid
    """
    report = solve_permutation(inst, order_b, config)
    if report.budget <= K:
        return True, report.witness
    return False, None


def solve_permutation(
    inst: Instance,
    order_b: Optional[Tuple[str, ...]] = None,
    config: Optional[Config] = None,
) -> SolveReport:
    """
    Fills the window table, then tries to beat its value with the prime-step search.

    Never refuses: when the search runs out of work budget, the table's
    strategy is returned.
    """
    start = time.perf_counter()
    config = config or Config()
    order_b = _resolve_order(inst, order_b, config)
    table = WindowTable(inst, order_b)
    strategy = table.strategy()
    budget, witness = blocks.value(strategy), blocks.ordering(strategy)

    engine = _engine(inst, order_b, config)
    probes = 0
    if budget > inst.lower_bound:
        probes = 1
        try:
            below = engine.decide(budget - 1)
        except WorkBudgetExceeded as e:
            logger.warning("window table value %d left uncertified: %s", budget, e)
            below = None
        if below is not None:
            logger.warning("prime-step search beats the window table value %d", budget)
            budget, witness = budget_of_ordering(inst, below), below
            try:
                budget, witness, more = engine.minimize(upper=(budget, witness))
                probes += more
            except WorkBudgetExceeded as e:
                logger.warning("stopping at %d: %s", budget, e)

    logger.debug("permutation table: %d windows, budget %d", table.states, budget)
    return SolveReport(
        budget=budget,
        witness=tuple(witness),
        algorithm="perm",
        elapsed=time.perf_counter() - start,
        states=table.states + engine.total_work,
        probes=probes,
    )
