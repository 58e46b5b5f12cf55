"""
Tree solvers for trivially perfect and co-bipartite instances.

Both walk a union/join tree bottom-up and merge child strategies with the
block algebra. A join node is a forced sequence: the child whose bought
side feeds the other's sold side runs first. Union nodes interleave their
children, which drains self-financing blocks first by increasing peak and
only then the blocks that raise the level.

A complete join has two possible first sales, one per side, so the
co-bipartite solver keeps a small list of alternative strategies per node
instead of a single one.

Decisions at a fixed budget go through TreeDecision instead: union nodes
drain positive minimal sets and then interleave their children closure by
closure. The solvers confirm the block algebra's value with it.
"""
import itertools
import logging
import time
from typing import Dict, List, Optional, Tuple

from ..config import Config
from ..core import BudgetValue, Instance, Ordering
from ..exceptions import ClassMismatchError, ContractViolation, RecognitionError, WorkBudgetExceeded
from ..recognition import COMPLETE_JOIN, JOIN, LEAF, UNION, DecompTree, decompose_co_bipartite, decompose_trivially_perfect
from ..report import SolveReport
from ..structure import StructureSession
from . import blocks

logger = logging.getLogger(__name__)

TP = "tp"
COBIP = "cobip"


def _check_tree(inst: Instance, tree: DecompTree) -> None:
    if tree.vertices != frozenset(inst.vertices) or tree.edges() != set(inst.edges):
        raise ContractViolation("decomposition tree does not describe the instance")


def tp_strategy(inst: Instance, tree: DecompTree) -> blocks.Strategy:
    """Optimal strategy of the sub-instance spanned by a trivially perfect tree node."""
    if tree.kind == LEAF:
        return blocks.biclique(inst, tree.bought, tree.sold)
    first, second = tree.children
    if tree.kind == UNION:
        return blocks.parallel(tp_strategy(inst, first), tp_strategy(inst, second))
    if tree.kind == JOIN:
        return blocks.series(tp_strategy(inst, second), tp_strategy(inst, first))
    raise ContractViolation(f"unexpected node kind in trivially perfect tree: {tree.kind}")


class _Alternatives:
    def __init__(self, inst: Instance, cap: int):
        self.inst = inst
        self.cap = cap
        self.peak_count = 0

    def _keep(self, options: List[blocks.Strategy]) -> List[blocks.Strategy]:
        kept = blocks.prune_alternatives(options)
        if len(kept) > self.cap:
            raise WorkBudgetExceeded(f"co-bipartite node keeps {len(kept)} alternatives (cap {self.cap})")
        self.peak_count = max(self.peak_count, len(kept))
        return kept

    def of(self, tree: DecompTree) -> List[blocks.Strategy]:
        inst = self.inst
        if tree.kind == LEAF:
            return [blocks.biclique(inst, tree.bought, tree.sold)]
        first, second = tree.children
        left, right = self.of(first), self.of(second)
        if tree.kind == UNION:
            return self._keep([blocks.parallel(a, b) for a, b in itertools.product(left, right)])
        if tree.kind == COMPLETE_JOIN:
            # the first sale comes from one side; that side's bought half is paid up front
            options = [
                blocks.chain(blocks.unordered(inst, second.bought), x, blocks.unordered(inst, second.sold))
                for x in left
            ]
            options += [
                blocks.chain(blocks.unordered(inst, first.bought), y, blocks.unordered(inst, first.sold))
                for y in right
            ]
            return self._keep(options)
        raise ContractViolation(f"unexpected node kind in co-bipartite tree: {tree.kind}")


class TreeDecision:
    """
    Decides bg <= K on a trivially perfect or co-bipartite instance, node by node.

    - leaf: the biclique's budget
    - join: the feeding child must fit K, the other child what is left after it
    - complete join: one side's bought half is paid first and the other side fits the rest
    - union: process a positive minimal set that fits and decide the rest;
      reject if positive sets exist but none fits; otherwise both children
      must fit K and StructureSession.combine interleaves them

    Budgets and optimal orderings of sub-instances come from the block algebra.

    Args:
        kind: "tp" or "cobip"
        config: Positive-set search bound, work budget and alternatives cap
    """

    def __init__(self, kind: str, config: Optional[Config] = None):
        if kind not in (TP, COBIP):
            raise ValueError(f"Unknown tree kind: '{kind}'. Valid kinds: {TP}, {COBIP}")
        self.kind = kind
        self.config = config or Config()
        self.session = StructureSession(
            budget_fn=self.budget,
            bound=self.config.positive_search_bound,
            work_budget=self.config.work_budget,
        )
        self._solutions: Dict[Instance, blocks.Strategy] = {}

    def tree(self, sub: Instance) -> DecompTree:
        if self.kind == TP:
            return decompose_trivially_perfect(sub)
        return decompose_co_bipartite(sub)

    def solution(self, sub: Instance) -> blocks.Strategy:
        if sub not in self._solutions:
            tree = self.tree(sub)
            if self.kind == TP:
                best = tp_strategy(sub, tree)
            else:
                best = min(_Alternatives(sub, self.config.max_alternatives).of(tree), key=blocks.value)
            self._solutions[sub] = best
        return self._solutions[sub]

    def budget(self, sub: Instance) -> BudgetValue:
        return blocks.value(self.solution(sub))

    def order(self, sub: Instance) -> Ordering:
        return blocks.ordering(self.solution(sub))

    def decide(self, sub: Instance, K: BudgetValue, tree: Optional[DecompTree] = None) -> bool:
        """
        Raises:
            WorkBudgetExceeded: If the set machinery runs out of work or search bound
        """
        if K < 0:
            return False
        head = sub.isolated_sold()
        if head:
            return self.decide(sub.residual(()), K + sub.gain_of(head))
        if not sub.sold:
            return sub.total_cost <= K
        tree = tree or self.tree(sub)
        if tree.kind == LEAF:
            return self.budget(sub) <= K

        first, second = tree.children
        one, two = sub.induced(first.vertices), sub.induced(second.vertices)
        if tree.kind == JOIN:
            if self.budget(two) > K:
                return False
            return self.budget(one) <= K - sub.cost_of(two.bought_ids) + sub.gain_of(two.sold_ids)
        if tree.kind == COMPLETE_JOIN:
            return any(
                sub.cost_of(lead.bought_ids) <= K
                and self.budget(follow) <= K - sub.cost_of(lead.bought_ids)
                for lead, follow in ((two, one), (one, two))
            )
        if tree.kind == UNION:
            return self._union(sub, one, two, K)
        raise ContractViolation(f"unexpected node kind: {tree.kind}")

    def _union(self, sub: Instance, one: Instance, two: Instance, K: BudgetValue) -> bool:
        found = self.session.find_positive_minimal(sub, K)
        if found is not None:
            left = K - sub.cost_of(found) + sub.gain_of(sub.released(found))
            return self.decide(sub.residual(found), left)
        if self.session.min_positive_budget(sub) is not None:
            return False
        if self.budget(one) > K or self.budget(two) > K:
            return False
        return self.session.combine(sub, one.vertices, two.vertices, K, self.order) is not None


def _decide_or_fallback(
    kind: str, inst: Instance, tree: DecompTree, K: BudgetValue, strategy: blocks.Strategy, config: Optional[Config]
) -> bool:
    try:
        return TreeDecision(kind, config).decide(inst, K, tree)
    except WorkBudgetExceeded as e:
        logger.debug("%s decision at K=%d falls back to the block algebra: %s", kind, K, e)
        return blocks.value(strategy) <= K


def _confirm(kind: str, inst: Instance, tree: DecompTree, budget: BudgetValue, config: Optional[Config]) -> None:
    """Checks the algebra's value against node-by-node decisions at budget and budget - 1."""
    decision = TreeDecision(kind, config)
    try:
        accepted = decision.decide(inst, budget, tree)
        below = budget > inst.lower_bound and decision.decide(inst, budget - 1, tree)
    except WorkBudgetExceeded as e:
        logger.debug("%s value %d not confirmed: %s", kind, budget, e)
        return
    if not accepted or below:
        logger.warning(
            "%s tree decisions disagree with value %d (accepts it: %s, accepts one less: %s)",
            kind, budget, accepted, below,
        )


def feasible_trivially_perfect(
    inst: Instance, tree: DecompTree, K: BudgetValue, config: Optional[Config] = None
) -> Tuple[bool, blocks.Strategy]:
    """
    Decides bg <= K on a trivially perfect instance.

    Args:
        inst: Instance
        tree: Union/join tree of the whole instance
        K: Budget to test
        config: Positive-set search bound and work budget

    Returns:
        (feasible, strategy); the strategy is the block algebra's optimum either way

    Raises:
        ContractViolation: If the tree does not match the instance
    """
    _check_tree(inst, tree)
    strategy = tp_strategy(inst, tree)
    return _decide_or_fallback(TP, inst, tree, K, strategy, config), strategy


def solve_trivially_perfect(
    inst: Instance, tree: Optional[DecompTree] = None, config: Optional[Config] = None
) -> SolveReport:
    start = time.perf_counter()
    if tree is None:
        try:
            tree = decompose_trivially_perfect(inst)
        except RecognitionError as e:
            raise ClassMismatchError(f"not trivially perfect: {e}") from e
    _check_tree(inst, tree)
    strategy = tp_strategy(inst, tree)
    budget = blocks.value(strategy)
    _confirm(TP, inst, tree, budget, config)
    return SolveReport(
        budget=budget,
        witness=blocks.ordering(strategy),
        algorithm="tp",
        elapsed=time.perf_counter() - start,
        states=len(strategy),
    )


def co_bipartite_alternatives(inst: Instance, tree: DecompTree, config: Optional[Config] = None) -> List[blocks.Strategy]:
    """
    Candidate strategies for the root of a co-bipartite tree.

    Raises:
        WorkBudgetExceeded: If a node needs more than ``max_alternatives`` strategies
    """
    config = config or Config()
    _check_tree(inst, tree)
    return _Alternatives(inst, config.max_alternatives).of(tree)


def feasible_co_bipartite(
    inst: Instance, tree: DecompTree, K: BudgetValue, config: Optional[Config] = None
) -> Tuple[bool, blocks.Strategy]:
    """
    Decides bg <= K on a co-bipartite instance.

    Returns:
        (feasible, best strategy among the alternatives)
    """
    best = min(co_bipartite_alternatives(inst, tree, config), key=blocks.value)
    return _decide_or_fallback(COBIP, inst, tree, K, best, config), best


def solve_co_bipartite(inst: Instance, tree: Optional[DecompTree] = None, config: Optional[Config] = None) -> SolveReport:
    start = time.perf_counter()
    config = config or Config()
    if tree is None:
        try:
            tree = decompose_co_bipartite(inst)
        except RecognitionError as e:
            raise ClassMismatchError(f"not co-bipartite: {e}") from e
    _check_tree(inst, tree)
    collector = _Alternatives(inst, config.max_alternatives)
    alternatives = collector.of(tree)
    best = min(alternatives, key=blocks.value)
    budget = blocks.value(best)
    logger.debug("co-bipartite root has %d alternatives (widest node %d)", len(alternatives), collector.peak_count)
    _confirm(COBIP, inst, tree, budget, config)
    return SolveReport(
        budget=budget,
        witness=blocks.ordering(best),
        algorithm="cobip",
        elapsed=time.perf_counter() - start,
        states=collector.peak_count,
    )
