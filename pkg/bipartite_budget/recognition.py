"""Graph-class recognizers, decomposition trees and obstruction witnesses."""
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import networkx as nx

from .config import Config
from .core import Instance
from .exceptions import RecognitionError

logger = logging.getLogger(__name__)

LEAF = "leaf"
UNION = "union"
JOIN = "join"
COMPLETE_JOIN = "complete_join"

WITNESS_SEARCH_LIMIT = 200_000


@dataclass(frozen=True)
class DecompTree:
    """
    Binary union/join tree over vertex sets.

    At a ``join`` node every sold vertex of the first child is adjacent to
    every bought vertex of the second child, so the second child's bought
    side has to be paid for before the first child can sell. A
    ``complete_join`` adds the opposite direction as well. Leaves are
    bicliques (possibly a single vertex).
    """

    kind: str
    bought: FrozenSet[str]
    sold: FrozenSet[str]
    children: Tuple["DecompTree", ...] = ()

    @property
    def vertices(self) -> FrozenSet[str]:
        return self.bought | self.sold

    def edges(self) -> Set[Tuple[str, str]]:
        """Edge set (sold, bought) described by the tree."""
        if self.kind == LEAF:
            return {(s, b) for s in self.sold for b in self.bought}
        first, second = self.children
        out = first.edges() | second.edges()
        if self.kind in (JOIN, COMPLETE_JOIN):
            out |= {(s, b) for s in first.sold for b in second.bought}
        if self.kind == COMPLETE_JOIN:
            out |= {(s, b) for s in second.sold for b in first.bought}
        return out

    def depth(self, kind: Optional[str] = None) -> int:
        """Longest root-to-leaf count of nodes of ``kind`` (all internal nodes if omitted)."""
        if self.kind == LEAF:
            return 0
        here = 1 if kind is None or self.kind == kind else 0
        return here + max(child.depth(kind) for child in self.children)


@dataclass
class GraphClassReport:
    biclique: bool = False
    biclique_union: bool = False
    path: bool = False
    cycle: bool = False
    forest: bool = False
    chain: bool = False
    unit: bool = False
    trivially_perfect: bool = False
    co_bipartite: bool = False
    permutation: bool = False
    tp_tree: Optional[DecompTree] = field(default=None, repr=False)
    cobip_tree: Optional[DecompTree] = field(default=None, repr=False)
    order_b: Optional[Tuple[str, ...]] = None
    order_s: Optional[Tuple[str, ...]] = None
    witness: Optional[Tuple[str, ...]] = None
    witness_kind: Optional[str] = None

    @property
    def path_cycle(self) -> bool:
        return self.path or self.cycle

    def to_lines(self) -> List[str]:
        flags = [
            "biclique", "biclique_union", "path", "cycle", "forest", "chain", "unit",
            "trivially_perfect", "co_bipartite", "permutation",
        ]
        lines = [f"{name}: {str(getattr(self, name)).lower()}" for name in flags]
        if self.order_b is not None:
            lines.append("order_b: " + " ".join(self.order_b))
        if self.witness is not None:
            lines.append(f"witness: {self.witness_kind} " + " ".join(self.witness))
        elif not self.trivially_perfect:
            lines.append("witness: none")
        return lines


class _View:
    """Adjacency restricted to a vertex subset."""

    def __init__(self, inst: Instance, vertices: Iterable[str]):
        self.inst = inst
        self.vertices = frozenset(vertices)
        self.bought = frozenset(v for v in self.vertices if inst.is_bought(v))
        self.sold = self.vertices - self.bought

    def nbrs(self, v: str) -> FrozenSet[str]:
        return self.inst.neighbors(v) & self.vertices

    def is_biclique(self) -> bool:
        return all(self.nbrs(s) == self.bought for s in self.sold)

    def components(self) -> List[FrozenSet[str]]:
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from((s, b) for s in self.sold for b in self.nbrs(s))
        comps = [frozenset(c) for c in nx.connected_components(graph)]
        return sorted(comps, key=lambda c: min(self.inst.index(v) for v in c))

    def complement_components(self) -> List[FrozenSet[str]]:
        """Components of the bipartite complement (bought-sold non-edges)."""
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from(
            (s, b) for s in self.sold for b in self.bought if b not in self.nbrs(s)
        )
        comps = [frozenset(c) for c in nx.connected_components(graph)]
        return sorted(comps, key=lambda c: min(self.inst.index(v) for v in c))


def _leaf(view: _View) -> DecompTree:
    return DecompTree(LEAF, view.bought, view.sold)


def _node(kind: str, first: DecompTree, second: DecompTree) -> DecompTree:
    return DecompTree(kind, first.bought | second.bought, first.sold | second.sold, (first, second))


# --- trivially perfect ---

def _tp_union_split(inst: Instance, comps: List[FrozenSet[str]]) -> Tuple[List[FrozenSet[str]], List[FrozenSet[str]]]:
    """Components with fewer bought than sold vertices go to the first child."""
    first, second = [], []
    for comp in comps:
        b = sum(1 for v in comp if inst.is_bought(v))
        (first if b < len(comp) - b else second).append(comp)
    if not first or not second:
        second, first = comps[:1], comps[1:]
    return first, second


def _tp_join_split(view: _View) -> Optional[Tuple[FrozenSet[str], FrozenSet[str]]]:
    """
    Finds (G, F) with every sold vertex of G adjacent to every bought vertex of F.

    Bought vertices of F are those of degree at least some threshold m; G's
    sold side is their common neighbourhood and G's bought vertices may only
    see that common neighbourhood.
    """
    degree = {b: len(view.nbrs(b)) for b in view.bought}
    for m in sorted(set(degree.values()), reverse=True):
        bought_f = frozenset(b for b in view.bought if degree[b] >= m)
        common = frozenset(view.sold)
        for b in bought_f:
            common &= view.nbrs(b)
        if not common:
            continue
        bought_g = view.bought - bought_f
        if all(view.nbrs(b) <= common for b in bought_g):
            g = bought_g | common
            f = view.vertices - g
            if f and g:
                return g, f
    return None


def _tp(inst: Instance, vertices: FrozenSet[str]) -> DecompTree:
    view = _View(inst, vertices)
    if view.is_biclique():
        return _leaf(view)
    comps = view.components()
    if len(comps) > 1:
        first, second = _tp_union_split(inst, comps)
        return _node(
            UNION,
            _tp(inst, frozenset().union(*first)),
            _tp(inst, frozenset().union(*second)),
        )
    split = _tp_join_split(view)
    if split is None:
        raise RecognitionError("no union or join split applies", blocking=vertices)
    g, f = split
    return _node(JOIN, _tp(inst, g), _tp(inst, f))


def decompose_trivially_perfect(inst: Instance) -> DecompTree:
    """
    Builds a union/join tree by component splits and degree-threshold join splits.

    Args:
        inst: Instance to decompose

    Returns:
        DecompTree whose edges() equal the instance's edges

    Raises:
        RecognitionError: If some connected part has no join split
    """
    return _tp(inst, frozenset(inst.vertices))


# --- co-bipartite ---

def _cobip(inst: Instance, vertices: FrozenSet[str]) -> DecompTree:
    view = _View(inst, vertices)
    if len(vertices) == 1:
        return _leaf(view)
    comps = view.components()
    if len(comps) > 1:
        return _node(UNION, _cobip(inst, comps[0]), _cobip(inst, vertices - comps[0]))
    parts = view.complement_components()
    if len(parts) > 1:
        return _node(COMPLETE_JOIN, _cobip(inst, parts[0]), _cobip(inst, vertices - parts[0]))
    raise RecognitionError("connected with a connected bipartite complement", blocking=vertices)


def decompose_co_bipartite(inst: Instance) -> DecompTree:
    """Union split by components, complete-join split by bipartite-complement components."""
    if len(inst) == 0:
        return DecompTree(LEAF, frozenset(), frozenset())
    return _cobip(inst, frozenset(inst.vertices))


# --- min-max orderings ---

def _intervals(inst: Instance, order_b: Tuple[str, ...]) -> Optional[Dict[str, Tuple[int, int]]]:
    position = {b: i for i, b in enumerate(order_b)}
    spans = {}
    for s in inst.sold_ids:
        nbrs = inst.neighbors(s)
        if not nbrs:
            continue
        idx = sorted(position[b] for b in nbrs)
        if idx[-1] - idx[0] + 1 != len(idx):
            return None
        spans[s] = (idx[0], idx[-1])
    return spans


def sold_order_for(inst: Instance, order_b: Tuple[str, ...]) -> Tuple[str, ...]:
    """Sold vertices sorted by (first neighbour, last neighbour); isolated ones first."""
    position = {b: i for i, b in enumerate(order_b)}

    def key(s: str):
        idx = [position[b] for b in inst.neighbors(s)]
        if not idx:
            return (-1, -1, inst.index(s))
        return (min(idx), max(idx), inst.index(s))

    return tuple(sorted(inst.sold_ids, key=key))


def check_min_max(inst: Instance, order_b: Tuple[str, ...]) -> bool:
    """Consecutive neighbourhoods whose last ends never decrease when sorted by first end."""
    spans = _intervals(inst, order_b)
    if spans is None:
        return False
    last = -1
    for s in sold_order_for(inst, order_b):
        if s not in spans:
            continue
        if spans[s][1] < last:
            return False
        last = spans[s][1]
    return True


def satisfies_min_max_pairs(inst: Instance, order_b: Tuple[str, ...], order_s: Tuple[str, ...]) -> bool:
    """The pairwise edge condition, checked directly over all edge pairs."""
    pb = {b: i for i, b in enumerate(order_b)}
    ps = {s: i for i, s in enumerate(order_s)}
    edges = list(inst.edges)
    for s1, b1 in edges:
        for s2, b2 in edges:
            if ps[s1] < ps[s2] and pb[b2] < pb[b1]:
                if not (inst.has_edge(s1, b2) and inst.has_edge(s2, b1)):
                    return False
    return True


class _OrderSearch:
    """Backtracking over bought orders of one connected component."""

    def __init__(self, inst: Instance, comp: FrozenSet[str], limit: int):
        self.inst = inst
        self.view = _View(inst, comp)
        self.limit = limit
        self.nodes = 0

    def run(self) -> Optional[List[str]]:
        starts = sorted(self.view.bought, key=lambda b: (len(self.view.nbrs(b)), self.inst.index(b)))
        for b in starts:
            found = self._extend([b], {s: 0 for s in self.view.nbrs(b)}, set())
            if found is not None:
                return found
        return None

    def _extend(self, placed: List[str], open_: Dict[str, int], closed: Set[str]) -> Optional[List[str]]:
        self.nodes += 1
        if self.nodes > self.limit:
            raise RecognitionError("min-max ordering search limit reached", blocking=self.view.vertices)
        if len(placed) == len(self.view.bought):
            return placed
        pos = len(placed)
        remaining = [b for b in self.view.bought if b not in set(placed)]
        candidates = [b for b in remaining if self.view.nbrs(b) & open_.keys()]
        candidates.sort(key=lambda b: (
            -len(self.view.nbrs(b) & open_.keys()), len(self.view.nbrs(b)), self.inst.index(b)
        ))
        for b in candidates:
            nbrs = self.view.nbrs(b)
            if nbrs & closed:
                continue
            closing = [s for s in open_ if s not in nbrs]
            if closing:
                earliest_kept = min((open_[s] for s in open_ if s in nbrs), default=pos)
                if any(open_[s] > earliest_kept for s in closing):
                    continue
            new_open = {s: l for s, l in open_.items() if s in nbrs}
            for s in nbrs:
                new_open.setdefault(s, pos)
            found = self._extend(placed + [b], new_open, closed | set(closing))
            if found is not None:
                return found
        return None


def find_min_max_ordering(inst: Instance, config: Optional[Config] = None) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    """
    Finds bought and sold orders satisfying the min-max condition.

    A declared ``order-b`` is verified and used when valid. Otherwise each
    connected component is searched separately and the results are
    concatenated, with isolated bought vertices last.

    Args:
        inst: Instance to order
        config: Supplies the backtracking node limit

    Returns:
        (order of B, order of S)

    Raises:
        RecognitionError: If no ordering exists or the search limit is hit
    """
    config = config or Config()
    if inst.order_b is not None:
        if check_min_max(inst, inst.order_b):
            return inst.order_b, sold_order_for(inst, inst.order_b)
        logger.warning("declared B-ordering is not min-max; searching instead")

    _, core, tail = inst.split_isolated()
    order: List[str] = []
    for comp in _View(core, core.vertices).components():
        bought = [v for v in comp if core.is_bought(v)]
        if len(bought) <= 1:
            order.extend(bought)
            continue
        found = _OrderSearch(core, comp, config.minmax_search_limit).run()
        if found is None:
            raise RecognitionError("no min-max ordering exists", blocking=comp)
        order.extend(found)
    order.extend(tail)
    order_b = tuple(order)
    if not check_min_max(inst, order_b):
        raise RecognitionError("ordering failed verification", blocking=frozenset(inst.vertices))
    return order_b, sold_order_for(inst, order_b)


# --- obstruction witnesses ---

def find_obstruction(inst: Instance, vertices: Optional[Iterable[str]] = None) -> Optional[Tuple[str, Tuple[str, ...]]]:
    """
    Searches for an induced C6 or P6.

    Args:
        inst: Instance to search
        vertices: Restrict the search to these vertices

    Returns:
        ("C6" or "P6", vertex tuple) verified by an isomorphism check, or None
    """
    view = _View(inst, vertices if vertices is not None else inst.vertices)
    graph = inst.to_networkx().subgraph(view.vertices)
    budget = [WITNESS_SEARCH_LIMIT]

    def grow(path: List[str]) -> Optional[Tuple[str, Tuple[str, ...]]]:
        budget[0] -= 1
        if budget[0] < 0:
            return None
        if len(path) == 6:
            kind = "C6" if path[-1] in view.nbrs(path[0]) else "P6"
            return kind, tuple(path)
        for v in inst.sort_canonical(view.nbrs(path[-1])):
            if v in path:
                continue
            touching = [u for u in path[:-1] if v in view.nbrs(u)]
            if touching and not (len(path) == 5 and touching == [path[0]]):
                continue
            found = grow(path + [v])
            if found is not None:
                return found
        return None

    for start in inst.sort_canonical(view.vertices):
        found = grow([start])
        if found is not None:
            kind, witness = found
            target = nx.cycle_graph(6) if kind == "C6" else nx.path_graph(6)
            if nx.is_isomorphic(graph.subgraph(witness), target):
                return found
            logger.warning("discarding unverified %s witness %s", kind, witness)
            return None
        if budget[0] < 0:
            break
    return None


# --- classification ---

def _is_chain(core: Instance) -> bool:
    hoods = sorted((core.neighbors(b) for b in core.bought_ids), key=len)
    return all(a <= b for a, b in zip(hoods, hoods[1:]))


def classify(inst: Instance, config: Optional[Config] = None) -> GraphClassReport:
    """
    Runs every recognizer on the non-isolated part of the instance.

    Args:
        inst: Instance to classify
        config: Limits for the ordering search

    Returns:
        GraphClassReport with flags, trees, orderings and any obstruction witness
    """
    report = GraphClassReport(unit=inst.is_unit_weight)
    _, core, _ = inst.split_isolated()
    graph = core.to_networkx()
    view = _View(core, core.vertices)
    comps = view.components()

    if len(core) == 0:
        report.biclique = report.biclique_union = report.forest = report.chain = True
    else:
        report.biclique = len(comps) == 1 and view.is_biclique()
        report.biclique_union = all(_View(core, c).is_biclique() for c in comps)
        report.forest = nx.is_forest(graph)
        degrees = [d for _, d in graph.degree()]
        connected = len(comps) == 1
        report.path = connected and report.forest and max(degrees) <= 2
        report.cycle = connected and len(core) >= 4 and all(d == 2 for d in degrees)
        report.chain = _is_chain(core)

    try:
        report.tp_tree = decompose_trivially_perfect(inst)
        report.trivially_perfect = True
    except RecognitionError as e:
        logger.debug("not trivially perfect: %s", e)
        found = find_obstruction(inst, e.blocking)
        if found is not None:
            report.witness_kind, report.witness = found

    try:
        report.cobip_tree = decompose_co_bipartite(inst)
        report.co_bipartite = True
    except RecognitionError as e:
        logger.debug("not co-bipartite: %s", e)

    try:
        report.order_b, report.order_s = find_min_max_ordering(inst, config)
        report.permutation = True
    except RecognitionError as e:
        logger.debug("no min-max ordering: %s", e)

    return report
