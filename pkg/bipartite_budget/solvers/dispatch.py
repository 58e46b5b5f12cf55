"""Algorithm registry and automatic class-based dispatch."""
import logging
import time
from typing import Callable, Dict, Optional

from ..config import MASK_BITS, Config
from ..core import BudgetValue, Instance
from ..exact import feasible_exact, subset_dp_budget
from ..exceptions import ClassMismatchError, ContractViolation, RecognitionError, WorkBudgetExceeded
from ..oracle import brute_force_budget
from ..recognition import decompose_co_bipartite, decompose_trivially_perfect, find_min_max_ordering
from ..report import SolveReport
from .decomposition import solve_co_bipartite, solve_trivially_perfect
from .general import GeneralSolver
from .permutation import solve_permutation
from .search import bisect_budget
from .simple import (
    is_biclique_instance,
    is_biclique_union_instance,
    solve_biclique,
    solve_biclique_union,
    solve_forest_unit,
    solve_path_cycle,
)

logger = logging.getLogger(__name__)

MAX_RECURSION_DEPTH = 3

# Solvers that produce a value directly rather than by bisection
DIRECT = ("biclique", "biclique-union", "path-cycle", "forest", "tp", "cobip")


class Solver:
    """
    Entry point for every algorithm.

    ``solve`` looks the algorithm up in a dispatch table, times the call and
    certifies the returned witness before handing it out.
    """

    def __init__(self, config: Optional[Config] = None, depth: int = 0):
        self.config = config or Config()
        self.depth = depth
        self._handlers: Dict[str, Callable[[Instance], SolveReport]] = {
            "auto": self._auto,
            "oracle": lambda inst: brute_force_budget(inst, config=self.config),
            "exact": lambda inst: subset_dp_budget(inst, config=self.config),
            "tp": lambda inst: solve_trivially_perfect(inst, config=self.config),
            "cobip": lambda inst: solve_co_bipartite(inst, config=self.config),
            "perm": lambda inst: solve_permutation(inst, config=self.config),
            "general": self._general,
            "simple": self._simple,
        }

    @property
    def algorithms(self):
        return tuple(self._handlers)

    def solve(self, inst: Instance, algorithm: str = "auto", cross_check: bool = False) -> SolveReport:
        """
        Computes the optimal budget with the named algorithm.

        Args:
            inst: Instance to solve
            algorithm: One of ``algorithms``
            cross_check: Re-derive the value of direct solvers by bisection over exact decisions

        Returns:
            Certified SolveReport

        Raises:
            ValueError: If the algorithm name is unknown
            ClassMismatchError: If a class-specific algorithm gets an instance outside its class
            SizeLimitError: If an exhaustive algorithm refuses the size
            WorkBudgetExceeded: If a bounded search gives up
        """
        handler = self._handlers.get(algorithm)
        if handler is None:
            raise ValueError(
                f"Unknown algorithm: '{algorithm}'. Valid algorithms: {', '.join(self._handlers)}"
            )
        start = time.perf_counter()
        report = handler(inst)
        report = report.relabel(report.algorithm, elapsed=time.perf_counter() - start)
        report.certify(inst)
        logger.info("%s: budget %d via %s", algorithm, report.budget, report.algorithm)

        if cross_check and report.algorithm in DIRECT:
            self._cross_check(inst, report)
        return report

    def decide(self, inst: Instance, K: BudgetValue, algorithm: str = "auto") -> bool:
        return self.solve(inst, algorithm).budget <= K

    def _cross_check(self, inst: Instance, report: SolveReport) -> None:
        def accept(K: BudgetValue) -> Optional[bool]:
            return True if feasible_exact(inst, K, self.config) else None

        value, _, probes = bisect_budget(inst.lower_bound, inst.total_cost, accept)
        if value != report.budget:
            raise ContractViolation(
                f"{report.algorithm} reports {report.budget}, bisection over exact decisions finds {value}"
            )
        logger.debug("cross-check agrees on %d after %d probes", value, probes)

    def _sub_budget(self, sub: Instance) -> BudgetValue:
        return self._sub_report(sub).budget

    def _sub_report(self, sub: Instance) -> SolveReport:
        if self.depth >= MAX_RECURSION_DEPTH:
            return subset_dp_budget(sub, config=self.config)
        return Solver(self.config, self.depth + 1).solve(sub)

    def _general(self, inst: Instance) -> SolveReport:
        solver = GeneralSolver(
            inst,
            self.config,
            budget_fn=self._sub_budget,
            order_fn=lambda sub: self._sub_report(sub).witness,
        )
        return solver.solve()

    def _simple(self, inst: Instance) -> SolveReport:
        if is_biclique_instance(inst):
            return solve_biclique(inst)
        if is_biclique_union_instance(inst):
            return solve_biclique_union(inst)
        if inst.is_unit_weight:
            for solver in (solve_path_cycle, lambda i: solve_forest_unit(i, self.config)):
                try:
                    return solver(inst)
                except ClassMismatchError:
                    continue
        raise ClassMismatchError("instance is not in a class with a simple solver")

    def _auto(self, inst: Instance) -> SolveReport:
        try:
            return self._simple(inst)
        except ClassMismatchError:
            pass
        except WorkBudgetExceeded as e:
            logger.debug("forest certification gave up: %s", e)

        try:
            return solve_trivially_perfect(inst, decompose_trivially_perfect(inst), self.config)
        except RecognitionError:
            pass
        try:
            return solve_co_bipartite(inst, decompose_co_bipartite(inst), self.config)
        except (RecognitionError, WorkBudgetExceeded) as e:
            logger.debug("co-bipartite route skipped: %s", e)
        try:
            order_b, _ = find_min_max_ordering(inst, self.config)
            return solve_permutation(inst, order_b, self.config)
        except (RecognitionError, WorkBudgetExceeded) as e:
            logger.debug("permutation route skipped: %s", e)

        if len(inst) <= min(self.config.exact_limit, MASK_BITS):
            return subset_dp_budget(inst, config=self.config)
        logger.warning("no class solver applies to %d vertices; using the general procedure", len(inst))
        return self._general(inst)


def solve(
    inst: Instance,
    algorithm: str = "auto",
    config: Optional[Config] = None,
    cross_check: bool = False,
) -> SolveReport:
    return Solver(config).solve(inst, algorithm, cross_check=cross_check)
