"""
Exact decision search over prime steps.

A state is the set X of bought vertices purchased so far; every sold vertex
whose neighbourhood lies in X has already been sold. A step buys one prime
of the residual instance (an inclusion-minimal residual neighbourhood) and
sells what it releases. Isolated sold vertices run first and isolated
bought vertices last, so every schedule is a sequence of prime steps
followed by the leftover purchases.

Two rules cut the branching without changing answers: a state where no
prime fits under K is dead, and a fitting prime that pays for itself
immediately is taken without trying the others. Dead states are memoised
with the largest K they failed for, so a bisection over K reuses them.
"""
import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

from ..core import BudgetValue, Instance, Ordering
from ..exceptions import ContractViolation, WorkBudgetExceeded

logger = logging.getLogger(__name__)

PrimeKey = Callable[[Tuple[int, ...]], object]
T = TypeVar("T")


def _bits(mask: int) -> Tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


class PrimeStepSearch:
    """Decides bg(inst) <= K and finds witnesses, one instance per session."""

    def __init__(self, inst: Instance, work_budget: int, prime_key: Optional[PrimeKey] = None):
        """
        Args:
            inst: Instance to search
            work_budget: Maximum number of expanded states per decision
            prime_key: Sort key over bought-index tuples; canonical order if omitted
        """
        self.inst = inst
        self.work_budget = work_budget
        self.prime_key = prime_key or (lambda idx: idx)
        head, core, tail = inst.split_isolated()
        self.head = head
        self.tail = tail
        self.bought: List[str] = list(core.bought_ids)
        position = {b: i for i, b in enumerate(self.bought)}
        self.costs = [core.cost(b) for b in self.bought]
        self.sold: List[str] = list(core.sold_ids)
        self.need = [sum(1 << position[b] for b in core.neighbors(s)) for s in self.sold]
        self.gains = [core.gain(s) for s in self.sold]
        self.full = (1 << len(self.bought)) - 1
        self.all_sold = (1 << len(self.sold)) - 1
        self.start_level = -inst.gain_of(head)
        self.tail_cost = inst.cost_of(tail)
        self.dead: Dict[int, int] = {}
        self.work = 0
        self.total_work = 0

    def cost(self, mask: int) -> int:
        return sum(self.costs[i] for i in _bits(mask))

    def released(self, X: int, unsold: int) -> int:
        """Sold indices (as a mask) among ``unsold`` whose neighbourhood lies in X."""
        out = 0
        for j in _bits(unsold):
            if self.need[j] & X == self.need[j]:
                out |= 1 << j
        return out

    def primes(self, X: int, unsold: int) -> List[int]:
        """Distinct inclusion-minimal residual neighbourhoods, in prime_key order."""
        residuals = sorted({self.need[j] & ~X for j in _bits(unsold)}, key=lambda m: bin(m).count("1"))
        minimal: List[int] = []
        for r in residuals:
            if not any(p & r == p for p in minimal):
                minimal.append(r)
        minimal.sort(key=lambda m: self.prime_key(_bits(m)))
        return minimal

    def decide(self, K: BudgetValue) -> Optional[Ordering]:
        """
        Finds an ordering with budget at most K.

        Args:
            K: Budget to test

        Returns:
            Witness ordering, or None if bg > K

        Raises:
            WorkBudgetExceeded: If more than work_budget states are expanded
        """
        if K < 0:
            return None
        self.work = 0
        steps = self._dfs(0, self.start_level, self.all_sold, K)
        self.total_work += self.work
        if steps is None:
            return None
        return self._ordering(steps)

    def _dfs(self, X: int, level: int, unsold: int, K: int) -> Optional[List[int]]:
        self.work += 1
        if self.work > self.work_budget:
            raise WorkBudgetExceeded(
                f"prime-step search expanded more than {self.work_budget} states"
            )
        if self.dead.get(X, -1) >= K:
            return None
        if not unsold:
            rest = self.cost(self.full & ~X) + self.tail_cost
            if level + rest <= K:
                return []
            self._mark_dead(X, K)
            return None

        options = []
        for P in self.primes(X, unsold):
            c = self.cost(P)
            if level + c > K:
                continue
            newly = self.released(X | P, unsold)
            g = sum(self.gains[j] for j in _bits(newly))
            if c <= g:
                # self-financing: some optimal schedule takes it next
                options = [(P, c, newly, g)]
                break
            options.append((P, c, newly, g))

        for P, c, newly, g in options:
            rest = self._dfs(X | P, level + c - g, unsold & ~newly, K)
            if rest is not None:
                return [P] + rest
        self._mark_dead(X, K)
        return None

    def _mark_dead(self, X: int, K: int) -> None:
        if self.dead.get(X, -1) < K:
            self.dead[X] = K

    def _ordering(self, steps: Sequence[int]) -> Ordering:
        order: List[str] = list(self.head)
        X = 0
        unsold = self.all_sold
        for P in steps:
            order.extend(self.bought[i] for i in _bits(P))
            X |= P
            newly = self.released(X, unsold)
            unsold &= ~newly
            order.extend(self.sold[j] for j in _bits(newly))
        order.extend(self.bought[i] for i in _bits(self.full & ~X))
        order.extend(self.tail)
        return tuple(order)

    def minimize(self, upper: Optional[Tuple[BudgetValue, Ordering]] = None) -> Tuple[BudgetValue, Ordering, int]:
        """
        Bisects K over [lower bound, upper] with decide().

        Args:
            upper: Known feasible (budget, witness); defaults to total cost

        Returns:
            (optimal budget, witness, number of decide calls)
        """
        hi = self.inst.total_cost if upper is None else upper[0]
        known = None if upper is None else upper[1]
        return bisect_budget(self.inst.lower_bound, hi, self.decide, known=known)


Decide = Callable[[BudgetValue], Optional[T]]


def bisect_budget(
    lo: BudgetValue,
    hi: BudgetValue,
    decide: Decide,
    known: Optional[T] = None,
) -> Tuple[BudgetValue, T, int]:
    """
    Smallest K in [lo, hi] that ``decide`` accepts.

    Args:
        lo: Lower bound on the answer
        hi: A budget known to be feasible
        decide: Returns a witness for K, or None if K is infeasible
        known: Witness for hi if already at hand; otherwise decide(hi) runs first

    Returns:
        (optimal budget, its witness, number of decide calls)
    """
    probes = 0
    best = known
    if best is None:
        best = decide(hi)
        probes += 1
        if best is None:
            raise ContractViolation(f"upper bound {hi} was rejected")
    while lo < hi:
        mid = (lo + hi) // 2
        probes += 1
        witness = decide(mid)
        logger.debug("bisect K=%d -> %s", mid, witness is not None)
        if witness is None:
            lo = mid + 1
        else:
            hi, best = mid, witness
    return hi, best, probes
