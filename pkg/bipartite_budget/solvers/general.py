"""
Decision procedure for arbitrary instances.

Each round looks at the residual instance and either stops or processes
one set:

- no sold vertex left: accept if the leftover purchases fit
- every prime costs more than the budget: reject
- a positive minimal set fits: process it with an optimal sub-ordering
- some positive set exists but none fits: reject
- otherwise process the first prime that no other prime is after, or
  reject if every prime is after another

The answer is returned as is. The exhaustive prime-step search only takes
over when the set machinery runs out of work budget or its positive-set
search bound.
"""
import logging
import time
from typing import List, Optional, Tuple

from ..config import Config
from ..core import BudgetValue, Instance, Ordering, budget_of_ordering
from ..exact import subset_dp_budget
from ..exceptions import ContractViolation, WorkBudgetExceeded
from ..report import SolveReport
from ..structure import BudgetFn, OrderFn, StructureSession, enumerate_prime_sets
from . import blocks
from .search import PrimeStepSearch, bisect_budget

logger = logging.getLogger(__name__)


def _exact_order(sub: Instance) -> Ordering:
    return subset_dp_budget(sub).witness


class GeneralSolver:
    """
    Shares caches across several decisions on one instance.

    Args:
        inst: Instance to decide
        config: Work budget and positive-set search bound
        budget_fn: Optimal budget of a sub-instance; exact DP if omitted
        order_fn: Optimal ordering of a sub-instance; exact DP if omitted
    """

    def __init__(
        self,
        inst: Instance,
        config: Optional[Config] = None,
        budget_fn: Optional[BudgetFn] = None,
        order_fn: Optional[OrderFn] = None,
    ):
        self.inst = inst
        self.config = config or Config()
        self.order_fn = order_fn or _exact_order
        self.session = StructureSession(
            budget_fn=budget_fn,
            bound=self.config.positive_search_bound,
            work_budget=self.config.work_budget,
        )
        self.engine = PrimeStepSearch(inst, self.config.work_budget)
        self.fallbacks = 0

    def _run(self, K: BudgetValue) -> Optional[List[Tuple[str, ...]]]:
        """Processed sets in order, or None on rejection."""
        rest = self.inst
        running = K
        steps: List[Tuple[str, ...]] = []
        head = rest.isolated_sold()
        if head:
            steps.append(head)
            running += rest.gain_of(head)
            rest = rest.residual(())

        while True:
            if not rest.sold:
                if rest.total_cost > running:
                    return None
                steps.append(tuple(rest.bought_ids))
                return steps

            primes = [p.members for p in enumerate_prime_sets(rest)]
            affordable = [P for P in primes if rest.cost_of(P) <= running]
            if not affordable:
                return None

            chosen = self.session.find_positive_minimal(rest, running)
            if chosen is not None:
                seq = tuple(self.order_fn(rest.block(chosen)))
            else:
                # no positive set fits, so any positive set at all rules K out
                if self.session.min_positive_budget(rest) is not None:
                    logger.debug("cheapest positive set exceeds %d; rejecting", running)
                    return None
                chosen = self.session.first_unblocked(rest, affordable, running)
                if chosen is None:
                    return None
                seq = tuple(rest.sort_canonical(chosen)) + tuple(rest.sort_canonical(rest.released(chosen)))
            steps.append(seq)
            running -= rest.cost_of(chosen) - rest.gain_of(rest.released(chosen))
            rest = rest.residual(chosen)

    def decide(self, K: BudgetValue) -> Tuple[Optional[bool], blocks.Strategy]:
        """
        Decides bg(inst) <= K.

        Args:
            K: Budget to test

        Returns:
            (True, witness strategy), (False, empty strategy), or (None, empty strategy)
            when both the procedure and the exhaustive search ran out of work budget

        Raises:
            ContractViolation: If an accepted run yields an ordering above K
        """
        if K < 0:
            return False, blocks.EMPTY
        try:
            steps = self._run(K)
        except WorkBudgetExceeded as e:
            logger.info("general procedure gave up at K=%d (%s); searching exhaustively", K, e)
            return self._exhaustive(K)

        if steps is None:
            return False, blocks.EMPTY
        strategy = tuple(blocks.Block.of(self.inst, seq) for seq in steps)
        used = budget_of_ordering(self.inst, blocks.ordering(strategy))
        if used > K:
            raise ContractViolation(f"general procedure accepted K={K} with an ordering needing {used}")
        return True, strategy

    def _exhaustive(self, K: BudgetValue) -> Tuple[Optional[bool], blocks.Strategy]:
        self.fallbacks += 1
        try:
            witness = self.engine.decide(K)
        except WorkBudgetExceeded as e:
            logger.info("general decision at K=%d is unknown: %s", K, e)
            return None, blocks.EMPTY
        if witness is None:
            return False, blocks.EMPTY
        return True, (blocks.Block.of(self.inst, witness),)

    def solve(self) -> SolveReport:
        """
        Bisects the optimal budget with decide().

        Raises:
            WorkBudgetExceeded: If some decision ends unknown
        """
        start = time.perf_counter()

        def accept(K: BudgetValue) -> Optional[blocks.Strategy]:
            ok, strategy = self.decide(K)
            if ok is None:
                raise WorkBudgetExceeded(f"general solver could not decide K={K}")
            return strategy if ok else None

        budget, strategy, probes = bisect_budget(self.inst.lower_bound, self.inst.total_cost, accept)
        if self.fallbacks:
            logger.debug("%d of %d decisions fell back to the exhaustive search", self.fallbacks, probes)
        return SolveReport(
            budget=budget,
            witness=blocks.ordering(strategy),
            algorithm="general",
            elapsed=time.perf_counter() - start,
            states=self.session.work + self.engine.total_work,
            probes=probes,
        )


def general_budget(
    inst: Instance,
    K: BudgetValue,
    config: Optional[Config] = None,
    budget_fn: Optional[BudgetFn] = None,
) -> Tuple[Optional[bool], blocks.Strategy]:
    """One-shot form of GeneralSolver.decide; None means unknown."""
    return GeneralSolver(inst, config, budget_fn).decide(K)
