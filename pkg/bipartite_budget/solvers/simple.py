"""Closed-form and greedy solvers for bicliques, their unions, paths, cycles and unit forests."""
import logging
import time
from typing import Dict, List, Optional, Set

import networkx as nx

from ..config import Config
from ..core import Instance, budget_of_ordering, schedule_bought
from ..exceptions import ClassMismatchError
from ..report import SolveReport
from . import blocks
from .search import PrimeStepSearch

logger = logging.getLogger(__name__)


def _components(core: Instance) -> List[Set[str]]:
    graph = core.to_networkx()
    comps = [set(c) for c in nx.connected_components(graph)]
    comps.sort(key=lambda c: min(core.index(v) for v in c))
    return comps


def _is_biclique(core: Instance, comp: Set[str]) -> bool:
    bought = {v for v in comp if core.is_bought(v)}
    return all(core.neighbors(s) == bought for s in comp if core.is_sold(s))


def _report(inst: Instance, strategy: blocks.Strategy, algorithm: str, start: float) -> SolveReport:
    witness = blocks.ordering(strategy)
    return SolveReport(
        budget=blocks.value(strategy),
        witness=witness,
        algorithm=algorithm,
        elapsed=time.perf_counter() - start,
    )


def is_biclique_instance(inst: Instance) -> bool:
    _, core, _ = inst.split_isolated()
    comps = _components(core)
    return len(comps) <= 1 and all(_is_biclique(core, c) for c in comps)


def is_biclique_union_instance(inst: Instance) -> bool:
    _, core, _ = inst.split_isolated()
    return all(_is_biclique(core, c) for c in _components(core))


def solve_biclique(inst: Instance) -> SolveReport:
    """
    Buys every bought vertex, then sells everything.

    Isolated sold vertices are sold up front and isolated bought vertices
    bought last, so the budget is the full cost less the isolated gain.

    Raises:
        ClassMismatchError: If the non-isolated part is not a single biclique
    """
    start = time.perf_counter()
    if not is_biclique_instance(inst):
        raise ClassMismatchError("instance is not a biclique")
    _, core, _ = inst.split_isolated()
    strategy = blocks.with_isolated(inst, blocks.biclique(inst, core.bought_ids, core.sold_ids))
    return _report(inst, strategy, "biclique", start)


def solve_biclique_union(inst: Instance) -> SolveReport:
    """
    Processes whole components, positive ones first.

    Components whose gain covers their cost run by increasing cost; the
    rest run by decreasing gain.

    Raises:
        ClassMismatchError: If some component is not a biclique
    """
    start = time.perf_counter()
    _, core, _ = inst.split_isolated()
    parts = []
    for comp in _components(core):
        if not _is_biclique(core, comp):
            raise ClassMismatchError("a connected component is not a biclique")
        parts.append(blocks.biclique(
            inst,
            [v for v in comp if core.is_bought(v)],
            [v for v in comp if core.is_sold(v)],
        ))
    strategy = blocks.with_isolated(inst, blocks.parallel(*parts))
    return _report(inst, strategy, "biclique-union", start)


def _walk(core: Instance, start_vertex: str) -> List[str]:
    """Vertices of a path or cycle in walking order from ``start_vertex``."""
    order = [start_vertex]
    previous: Optional[str] = None
    current = start_vertex
    while True:
        step = [v for v in core.sort_canonical(core.neighbors(current)) if v != previous and v != start_vertex]
        if not step or step[0] in order:
            return order
        previous, current = current, step[0]
        order.append(current)


def solve_path_cycle(inst: Instance) -> SolveReport:
    """
    Sweeps a unit-weight path or cycle.

    A path with a sold end point is swept from that end and needs budget 1.
    A path ending in bought vertices on both sides, and any cycle, needs 2:
    every sold vertex then has two bought neighbours.

    Raises:
        ClassMismatchError: If weights are not unit or the non-isolated part is not one path or cycle
    """
    start = time.perf_counter()
    if not inst.is_unit_weight:
        raise ClassMismatchError("path/cycle solver needs unit weights")
    _, core, _ = inst.split_isolated()
    if len(core) == 0:
        return _report(inst, blocks.with_isolated(inst, blocks.EMPTY), "path-cycle", start)

    graph = core.to_networkx()
    degrees = dict(graph.degree())
    if not nx.is_connected(graph) or max(degrees.values()) > 2:
        raise ClassMismatchError("non-isolated part is not a single path or cycle")

    ends = core.sort_canonical(v for v, d in degrees.items() if d == 1)
    if ends:
        sold_ends = [v for v in ends if core.is_sold(v)]
        first = sold_ends[0] if sold_ends else ends[0]
    else:
        first = core.bought_ids[0]
    walk = _walk(core, first)
    core_order = schedule_bought(core, [v for v in walk if core.is_bought(v)])
    logger.debug("path/cycle sweep from %s: %s", first, core_order)

    strategy = blocks.with_isolated(inst, (blocks.Block.of(inst, core_order),))
    return _report(inst, strategy, "path-cycle", start)


def greedy_forest_order(inst: Instance) -> List[str]:
    """
    Peels sold leaves, otherwise buys the smallest residual neighbourhood.

    Every sold leaf is served by buying its single remaining neighbour. When
    no sold leaf is left, the internal sold vertex with the fewest unbought
    neighbours is served next, lowest canonical index on ties.

    Returns:
        Order in which bought vertices are purchased
    """
    bought: Set[str] = set()
    order: List[str] = []
    pending = [s for s in inst.sold_ids if inst.neighbors(s)]

    def buy(vids) -> None:
        for b in inst.sort_canonical(vids):
            if b not in bought:
                bought.add(b)
                order.append(b)

    while True:
        residual: Dict[str, Set[str]] = {s: set(inst.neighbors(s)) - bought for s in pending}
        pending = [s for s in pending if residual[s]]
        if not pending:
            break
        leaves = [s for s in pending if len(residual[s]) == 1]
        target = leaves[0] if leaves else min(pending, key=lambda s: (len(residual[s]), inst.index(s)))
        buy(residual[target])
    buy(v for v in inst.bought_ids if v not in bought)
    return order


def solve_forest_unit(inst: Instance, config: Optional[Config] = None) -> SolveReport:
    """
    Solves unit-weight forests.

    The greedy order gives an upper bound U; the prime-step search then
    certifies that U - 1 is infeasible, or keeps bisecting below U.

    Raises:
        ClassMismatchError: If weights are not unit or the graph has a cycle
    """
    start = time.perf_counter()
    config = config or Config()
    if not inst.is_unit_weight:
        raise ClassMismatchError("forest solver needs unit weights")
    if not nx.is_forest(inst.to_networkx()):
        raise ClassMismatchError("instance graph has a cycle")

    greedy = schedule_bought(inst, greedy_forest_order(inst))
    upper = budget_of_ordering(inst, greedy)
    engine = PrimeStepSearch(inst, config.work_budget)
    budget, witness, probes = upper, greedy, 0
    if upper > inst.lower_bound:
        probes = 1
        if engine.decide(upper - 1) is not None:
            logger.info("greedy forest bound %d beaten; bisecting below it", upper)
            budget, witness, more = engine.minimize(upper=(upper, greedy))
            probes += more
    return SolveReport(
        budget=budget,
        witness=tuple(witness),
        algorithm="forest",
        elapsed=time.perf_counter() - start,
        states=engine.total_work,
        probes=probes,
    )
