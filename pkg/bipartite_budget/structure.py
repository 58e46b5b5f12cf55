"""Prime sets, positive sets, closures and the "after" relation between primes."""
import itertools
import logging
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from .config import DEFAULT_POSITIVE_SEARCH_BOUND
from .core import BudgetValue, Instance, Ordering
from .exceptions import ContractViolation, SearchBoundExceeded, WorkBudgetExceeded
from .exact import subset_dp_budget

logger = logging.getLogger(__name__)

BudgetFn = Callable[[Instance], BudgetValue]
OrderFn = Callable[[Instance], Ordering]
VertexSet = FrozenSet[str]

MAX_SUBUNION_NEIGHBOURHOODS = 12


@dataclass(frozen=True)
class PrimeStructure:
    """A prime set with the sold vertices it releases and its standalone budget."""

    members: VertexSet
    n_star: VertexSet
    budget: BudgetValue

    def check(self, inst: Instance) -> bool:
        """Recomputes N*, primality and the biclique shape against ``inst``."""
        if n_star(inst, self.members) != self.n_star or not is_prime(inst, self.members):
            return False
        return all(
            inst.has_edge(s, b)
            for s in self.n_star if inst.neighbors(s)
            for b in self.members
        )


@dataclass(frozen=True)
class ClosureResult:
    closure: VertexSet
    steps: Tuple[VertexSet, ...]
    residual_budget: BudgetValue


def lex_key(inst: Instance, vids: Iterable[str]) -> Tuple[int, ...]:
    """Sort key comparing bought sets by their canonical index tuples."""
    return tuple(sorted(inst.index(v) for v in vids))


def _members(x: Union[PrimeStructure, Iterable[str]]) -> VertexSet:
    if isinstance(x, PrimeStructure):
        return x.members
    return frozenset(x)


def _check_bought(inst: Instance, I: VertexSet) -> None:
    stray = [v for v in I if not inst.is_bought(v)]
    if stray:
        raise ContractViolation(f"expected bought vertices only, got {sorted(stray)}")


def n_star(inst: Instance, I: Iterable[str]) -> VertexSet:
    """Sold vertices whose whole neighbourhood lies in I (isolated ones always qualify)."""
    I = frozenset(I)
    _check_bought(inst, I)
    return inst.released(I)


def _neighbourhoods(inst: Instance) -> List[VertexSet]:
    """Distinct non-empty sold neighbourhoods in canonical order."""
    seen = {inst.neighbors(s) for s in inst.sold_ids if inst.neighbors(s)}
    return sorted(seen, key=lambda d: lex_key(inst, d))


def is_prime(inst: Instance, I: Iterable[str]) -> bool:
    I = frozenset(I)
    if not I:
        raise ContractViolation("is_prime needs a non-empty set")
    _check_bought(inst, I)
    hoods = _neighbourhoods(inst)
    return I in hoods and not any(d < I for d in hoods)


def prime_budget(inst: Instance, I: VertexSet) -> BudgetValue:
    """Budget of a prime block: buy all of I, then sell; isolated sold vertices go first."""
    return max(0, inst.cost_of(I) - inst.gain_of(inst.isolated_sold()))


def enumerate_prime_sets(inst: Instance) -> List[PrimeStructure]:
    """All inclusion-minimal sold neighbourhoods, in lexicographic order."""
    hoods = _neighbourhoods(inst)
    primes = [d for d in hoods if not any(other < d for other in hoods)]
    return [PrimeStructure(p, inst.released(p), prime_budget(inst, p)) for p in primes]


def leading_prime(inst: Instance, ordering: Sequence[str]) -> Optional[VertexSet]:
    """
    The prime an ordering starts with.

    Takes the neighbourhood of the first non-isolated sold vertex in
    ``ordering`` and returns the lexicographically first prime inside it,
    or None if every sold vertex is isolated.
    """
    for v in ordering:
        if inst.is_sold(v) and inst.neighbors(v):
            hood = inst.neighbors(v)
            return next(p.members for p in enumerate_prime_sets(inst) if p.members <= hood)
    return None


def is_positive(inst: Instance, I: Iterable[str]) -> bool:
    I = frozenset(I)
    return inst.cost_of(I) <= inst.gain_of(n_star(inst, I))


def surplus(inst: Instance, I: VertexSet) -> int:
    return inst.gain_of(inst.released(I)) - inst.cost_of(I)


def default_budget(inst: Instance) -> BudgetValue:
    return subset_dp_budget(inst).budget


class StructureSession:
    """
    Caches for the recursive set machinery on one instance family.

    Every operation takes the instance explicitly; residual and block
    sub-instances hash by value, so results are shared across calls.
    """

    def __init__(
        self,
        budget_fn: Optional[BudgetFn] = None,
        bound: int = DEFAULT_POSITIVE_SEARCH_BOUND,
        work_budget: Optional[int] = None,
    ):
        self.budget_fn = budget_fn or default_budget
        self.bound = bound
        self.work_budget = work_budget
        self.work = 0
        self._budgets: Dict[Instance, BudgetValue] = {}
        self._positive: Dict[Tuple[Instance, BudgetValue, str], Optional[VertexSet]] = {}
        self._closures: Dict[Tuple[Instance, VertexSet, BudgetValue], ClosureResult] = {}
        self._after: Dict[Tuple[Instance, VertexSet, VertexSet, BudgetValue], bool] = {}

    def _tick(self) -> None:
        self.work += 1
        if self.work_budget is not None and self.work > self.work_budget:
            raise WorkBudgetExceeded(f"set machinery exceeded {self.work_budget} steps")

    def budget(self, inst: Instance) -> BudgetValue:
        if len(inst) == 0:
            return 0
        if inst not in self._budgets:
            self._tick()
            self._budgets[inst] = self.budget_fn(inst)
        return self._budgets[inst]

    def block_budget(self, inst: Instance, I: VertexSet) -> BudgetValue:
        return self.budget(inst.block(I))

    def _positive_candidates(self, inst: Instance) -> Tuple[List[VertexSet], bool]:
        """Unions of up to ``bound`` neighbourhoods, and whether that covers every union."""
        hoods = _neighbourhoods(inst)
        seen = set(hoods)
        out = list(hoods)
        frontier = list(hoods)
        # level k holds the new unions of k neighbourhoods
        for _ in range(1, min(self.bound, len(hoods))):
            grown = []
            for union in frontier:
                for d in hoods:
                    bigger = union | d
                    if bigger not in seen:
                        self._tick()
                        seen.add(bigger)
                        grown.append(bigger)
            out.extend(grown)
            frontier = grown
        return out, len(hoods) <= self.bound

    def _has_smaller_positive(self, inst: Instance, U: VertexSet, K: BudgetValue) -> bool:
        inside = [d for d in _neighbourhoods(inst) if d <= U]
        if len(inside) > MAX_SUBUNION_NEIGHBOURHOODS:
            raise SearchBoundExceeded(
                f"minimality check over {len(inside)} neighbourhoods exceeds {MAX_SUBUNION_NEIGHBOURHOODS}"
            )
        checked = set()
        for k in range(1, len(inside) + 1):
            for combo in itertools.combinations(inside, k):
                sub = frozenset().union(*combo)
                if sub == U or sub in checked:
                    continue
                checked.add(sub)
                if is_positive(inst, sub) and self.block_budget(inst, sub) <= K:
                    return True
        return False

    def find_positive_minimal(self, inst: Instance, K: BudgetValue, prefer: str = "surplus") -> Optional[VertexSet]:
        """
        Finds a positive set of budget <= K with no smaller such subset.

        Args:
            inst: Instance to search
            K: Budget the set must fit
            prefer: "surplus" (largest gain minus cost, then lexicographic) or "lexicographic"

        Returns:
            The chosen set, or None if no positive minimal set exists

        Raises:
            SearchBoundExceeded: If nothing was found and the search was not exhaustive
        """
        if prefer not in ("surplus", "lexicographic"):
            raise ValueError(f"Unknown preference: '{prefer}'. Valid preferences: surplus, lexicographic")
        key = (inst, K, prefer)
        if key in self._positive:
            return self._positive[key]
        self._tick()

        candidates, exhaustive = self._positive_candidates(inst)
        found = [
            U for U in candidates
            if is_positive(inst, U)
            and self.block_budget(inst, U) <= K
            and not self._has_smaller_positive(inst, U, K)
        ]
        if not found:
            if not exhaustive:
                raise SearchBoundExceeded(
                    f"no positive set among unions of {self.bound} neighbourhoods; search incomplete"
                )
            result = None
        elif prefer == "surplus":
            result = min(found, key=lambda U: (-surplus(inst, U), lex_key(inst, U)))
        else:
            result = min(found, key=lambda U: lex_key(inst, U))
        self._positive[key] = result
        return result

    def min_positive_budget(self, inst: Instance) -> Optional[BudgetValue]:
        """Smallest budget over positive unions of neighbourhoods, None if there are none."""
        candidates, exhaustive = self._positive_candidates(inst)
        budgets = [self.block_budget(inst, U) for U in candidates if is_positive(inst, U)]
        if not budgets:
            if not exhaustive:
                raise SearchBoundExceeded("positive-set search incomplete")
            return None
        return min(budgets)

    def closure(self, inst: Instance, I: Iterable[str], K: BudgetValue) -> ClosureResult:
        """
        Absorbs lexicographically first positive minimal sets after processing I.

        Args:
            inst: Instance
            I: Seed bought set with budget at most K
            K: Current budget

        Returns:
            ClosureResult with the absorbed steps and the budget left afterwards
        """
        I = frozenset(I)
        _check_bought(inst, I)
        key = (inst, I, K)
        if key in self._closures:
            return self._closures[key]
        if self.block_budget(inst, I) > K:
            raise ContractViolation("closure seed does not fit the budget")

        acc = set(I)
        steps: List[VertexSet] = []
        running = K - inst.cost_of(I) + inst.gain_of(inst.released(I))
        while True:
            rest = inst.residual(acc)
            if not rest.bought:
                break
            step = self.find_positive_minimal(rest, running, prefer="lexicographic")
            if step is None:
                break
            steps.append(step)
            running += rest.gain_of(rest.released(step)) - rest.cost_of(step)
            acc |= step
        result = ClosureResult(frozenset(acc), tuple(steps), running)
        self._closures[key] = result
        return result

    def superset_of(
        self,
        inst: Instance,
        J: Union[PrimeStructure, Iterable[str]],
        I: Union[PrimeStructure, Iterable[str]],
        K: BudgetValue,
    ) -> VertexSet:
        """Grows cℓ(J) by first-available closures until cℓ(I) is covered."""
        J, I = _members(J), _members(I)
        target = self.closure(inst, I, K).closure
        acc = set(self.closure(inst, J, K).closure)
        while not target <= acc:
            self._tick()
            rest = inst.residual(acc)
            running = K - inst.cost_of(acc) + inst.gain_of(inst.released(acc))
            primes = [p.members for p in enumerate_prime_sets(rest) if rest.cost_of(p.members) <= running]
            if not primes:
                # nothing left fits; the rest can only follow as one piece
                acc |= set(rest.bought_ids)
                break
            chosen = self.first_unblocked(rest, primes, running)
            if chosen is None:
                logger.debug("every affordable residual prime is after another; taking the first")
                chosen = primes[0]
            acc |= self.closure(rest, chosen, running).closure
        return frozenset(acc)

    def first_unblocked(self, inst: Instance, primes: List[VertexSet], K: BudgetValue) -> Optional[VertexSet]:
        """Lexicographically first prime that is not after any other prime."""
        for P in primes:
            if not any(self.is_after(inst, P, Q, K) for Q in primes if Q != P):
                return P
        return None

    def is_after(
        self,
        inst: Instance,
        I: Union[PrimeStructure, Iterable[str]],
        J: Union[PrimeStructure, Iterable[str]],
        K: BudgetValue,
    ) -> bool:
        """
        True if I is too expensive, or what must run between cℓ(J) and cℓ(I) no longer fits after cℓ(I).

        A J that does not fit K on its own never holds I back.
        """
        I, J = _members(I), _members(J)
        if inst.cost_of(I) > K:
            return True
        if self.block_budget(inst, J) > K:
            return False
        key = (inst, I, J, K)
        if key in self._after:
            return self._after[key]
        self._tick()
        closed = self.closure(inst, I, K)
        between = self.superset_of(inst, J, I, K) - closed.closure
        rest = inst.residual(closed.closure)
        result = self.budget(rest.block(between & set(rest.bought_ids))) > closed.residual_budget
        self._after[key] = result
        return result

    def combine(
        self,
        inst: Instance,
        first: Iterable[str],
        second: Iterable[str],
        K: BudgetValue,
        order_fn: OrderFn,
    ) -> Optional[Tuple[VertexSet, ...]]:
        """
        Interleaves two independent parts of ``inst`` one closure at a time.

        Each round reads the leading prime of each part off the part's
        optimal ordering. The first part goes next if its prime fits and the
        second part still fits on what the first part's closure leaves;
        otherwise the second part goes, if its prime fits.

        Args:
            inst: Instance made of the two parts, with no edge between them
            first: Vertices of the first part
            second: Vertices of the second part
            K: Budget to test
            order_fn: Optimal ordering of a sub-instance

        Returns:
            The closures processed, in order, or None if the parts do not fit K together
        """
        first, second = frozenset(first), frozenset(second)
        running = K + inst.gain_of(inst.isolated_sold())
        rest = inst.residual(())
        steps: List[VertexSet] = []
        while rest.sold:
            self._tick()
            one = rest.induced(v for v in rest.vertices if v in first)
            two = rest.induced(v for v in rest.vertices if v in second)
            lead_one = leading_prime(one, order_fn(one)) if one.sold else None
            lead_two = leading_prime(two, order_fn(two)) if two.sold else None

            chosen = None
            if lead_one is not None and rest.cost_of(lead_one) <= running:
                closed = self.closure(rest, lead_one, running)
                # a part with no sold vertex left only adds purchases at the end
                after = rest.residual(closed.closure)
                left_over = after.induced(v for v in after.vertices if v in second)
                if not two.sold or self.budget(left_over) <= closed.residual_budget:
                    chosen = closed
            if chosen is None:
                if lead_two is None or rest.cost_of(lead_two) > running:
                    return None
                chosen = self.closure(rest, lead_two, running)
            steps.append(chosen.closure)
            running = chosen.residual_budget
            rest = rest.residual(chosen.closure)
        if rest.total_cost > running:
            return None
        return tuple(steps)


def find_positive_minimal(
    inst: Instance,
    K: BudgetValue,
    budget_fn: Optional[BudgetFn] = None,
    bound: int = DEFAULT_POSITIVE_SEARCH_BOUND,
    prefer: str = "surplus",
) -> Optional[VertexSet]:
    return StructureSession(budget_fn, bound).find_positive_minimal(inst, K, prefer)


def closure(inst: Instance, I: Iterable[str], K: BudgetValue, budget_fn: Optional[BudgetFn] = None) -> ClosureResult:
    return StructureSession(budget_fn).closure(inst, I, K)


def superset_of(inst: Instance, J, I, K: BudgetValue, budget_fn: Optional[BudgetFn] = None) -> VertexSet:
    return StructureSession(budget_fn).superset_of(inst, J, I, K)


def is_after(inst: Instance, I, J, K: BudgetValue, budget_fn: Optional[BudgetFn] = None) -> bool:
    return StructureSession(budget_fn).is_after(inst, I, J, K)
