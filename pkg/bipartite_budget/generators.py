"""
Seeded instance generators, one per graph class, plus arc-diagram ingestion.

Every generator builds its instance from a certificate (a decomposition
tree, an interval ordering, nested prefixes) so the output is in its class
by construction. The same GenSpec always yields the same instance.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Set, Tuple

import numpy as np

from .core import Instance
from .exceptions import ContractViolation, ParseError

logger = logging.getLogger(__name__)

ARCS_HEADER = "arcs 1"
PROJECTIVE_ORDERS = (2, 3, 5, 7)


@dataclass(frozen=True)
class GenSpec:
    """
    Family name, size, weight range and seed.

    ``size`` is the main size knob of the family: components for
    biclique-union, vertices for forest and path-cycle, bought vertices for chain and
    permutation, tree leaves for tp and cobip, boxes for tp-chain.
    """

    family: str
    size: int = 6
    max_weight: int = 1
    seed: int = 0
    p: int = 2


@dataclass(frozen=True)
class Arc:
    id: str
    x1: float
    x2: float
    weight: int = 1

    def crosses(self, other: "Arc") -> bool:
        return self.x1 < other.x1 < self.x2 < other.x2 or other.x1 < self.x1 < other.x2 < self.x2


@dataclass
class ArcDiagram:
    """Non-crossing arcs above a line (removed) and below it (added)."""

    remove: List[Arc] = field(default_factory=list)
    add: List[Arc] = field(default_factory=list)

    def validate(self) -> None:
        for side, arcs in (("rm", self.remove), ("add", self.add)):
            ends: Set[float] = set()
            for arc in arcs:
                if not arc.x1 < arc.x2:
                    raise ContractViolation(f"{side} arc '{arc.id}' needs x1 < x2")
                if arc.x1 in ends or arc.x2 in ends:
                    raise ContractViolation(f"{side} arc '{arc.id}' reuses an endpoint")
                ends.update((arc.x1, arc.x2))
            for i, a in enumerate(arcs):
                for b in arcs[i + 1:]:
                    if a.crosses(b):
                        raise ContractViolation(f"{side} arcs '{a.id}' and '{b.id}' cross")


class _Builder:
    """Accumulates vertices with generated names and random weights."""

    def __init__(self, spec: GenSpec):
        if spec.size < 1:
            raise ContractViolation(f"generator size must be at least 1, got {spec.size}")
        if spec.max_weight < 1:
            raise ContractViolation(f"max weight must be at least 1, got {spec.max_weight}")
        self.rng = np.random.default_rng(spec.seed)
        self.max_weight = spec.max_weight
        self.bought: List[Tuple[str, int]] = []
        self.sold: List[Tuple[str, int]] = []
        self.edges: Set[Tuple[str, str]] = set()

    def weight(self) -> int:
        return int(self.rng.integers(1, self.max_weight + 1))

    def buy(self) -> str:
        vid = f"b{len(self.bought) + 1}"
        self.bought.append((vid, self.weight()))
        return vid

    def sell(self) -> str:
        vid = f"s{len(self.sold) + 1}"
        self.sold.append((vid, self.weight()))
        return vid

    def link(self, sold: str, bought: str) -> None:
        self.edges.add((sold, bought))

    def pick(self, low: int, high: int) -> int:
        return int(self.rng.integers(low, high + 1))

    def build(self, order_b: Optional[List[str]] = None) -> Instance:
        return Instance.build(self.bought, self.sold, self.edges, order_b=order_b)


def gen_biclique_union(spec: GenSpec) -> Instance:
    g = _Builder(spec)
    for _ in range(spec.size):
        bought = [g.buy() for _ in range(g.pick(1, 3))]
        sold = [g.sell() for _ in range(g.pick(1, 3))]
        for s in sold:
            for b in bought:
                g.link(s, b)
    return g.build()


def gen_forest(spec: GenSpec) -> Instance:
    """Random forest: each new vertex hangs off an earlier one of the other side, or starts a tree."""
    g = _Builder(spec)
    placed: List[str] = []
    for _ in range(spec.size):
        if placed and g.rng.random() < 0.85:
            parent = placed[g.pick(0, len(placed) - 1)]
            if parent.startswith("b"):
                vid = g.sell()
                g.link(vid, parent)
            else:
                vid = g.buy()
                g.link(parent, vid)
        else:
            vid = g.buy() if g.rng.random() < 0.5 else g.sell()
        placed.append(vid)
    return g.build()


def gen_chain(spec: GenSpec) -> Instance:
    """Sold neighbourhoods are prefixes b1..bt of the bought vertices."""
    g = _Builder(spec)
    bought = [g.buy() for _ in range(spec.size)]
    lengths = [g.pick(1, spec.size) for _ in range(spec.size)]
    lengths[-1] = spec.size
    for t in lengths:
        s = g.sell()
        for b in bought[:t]:
            g.link(s, b)
    return g.build(order_b=bought)


def gen_permutation(spec: GenSpec) -> Instance:
    """
    Sold neighbourhoods are intervals whose left and right ends both never decrease.

    The bought vertices are declared in shuffled order; the construction
    order is attached as the instance's B-ordering.
    """
    g = _Builder(spec)
    k = spec.size
    names = [f"b{i + 1}" for i in range(k)]
    costs = [g.weight() for _ in range(k)]
    m = g.pick(1, k + 1)
    lefts = np.sort(g.rng.integers(0, k, size=m))
    rights = np.maximum(lefts, np.sort(g.rng.integers(0, k, size=m)))
    sold = []
    for j, (left, right) in enumerate(zip(lefts, rights)):
        sid = f"s{j + 1}"
        sold.append((sid, g.weight()))
        for i in range(int(left), int(right) + 1):
            g.edges.add((sid, names[i]))
    shuffled = [int(i) for i in g.rng.permutation(k)]
    bought = [(names[i], costs[i]) for i in shuffled]
    return Instance.build(bought, sold, g.edges, order_b=names)


@dataclass
class _Part:
    bought: List[str]
    sold: List[str]


def _random_tree(g: _Builder, leaves: int, leaf: Callable[[], _Part], merge: Callable[[_Part, _Part], None]) -> _Part:
    parts = [leaf() for _ in range(leaves)]
    while len(parts) > 1:
        i = g.pick(0, len(parts) - 2)
        first, second = parts[i], parts[i + 1]
        merge(first, second)
        parts[i:i + 2] = [_Part(first.bought + second.bought, first.sold + second.sold)]
    return parts[0]


def gen_path_cycle(spec: GenSpec) -> Instance:
    """
    One path or one even cycle on ``size`` vertices, sides alternating along it.

    A cycle needs at least four vertices and an even count; odd sizes and
    sizes below four give a path.
    """
    g = _Builder(spec)
    cycle = spec.size >= 4 and spec.size % 2 == 0 and g.rng.random() < 0.5
    sold_first = g.rng.random() < 0.5
    walk = []
    for i in range(spec.size):
        walk.append(g.sell() if (i % 2 == 0) == sold_first else g.buy())
    pairs = list(zip(walk, walk[1:]))
    if cycle:
        pairs.append((walk[-1], walk[0]))
    for u, v in pairs:
        if u.startswith("s"):
            g.link(u, v)
        else:
            g.link(v, u)
    return g.build()


def gen_trivially_perfect(spec: GenSpec) -> Instance:
    """Random union/join tree over biclique leaves; a join makes the first part's sold side depend on the second's bought side."""
    g = _Builder(spec)

    def leaf() -> _Part:
        nb, ns = g.pick(0, 2), g.pick(0, 2)
        if nb + ns == 0:
            nb = 1
        part = _Part([g.buy() for _ in range(nb)], [g.sell() for _ in range(ns)])
        for s in part.sold:
            for b in part.bought:
                g.link(s, b)
        return part

    def merge(first: _Part, second: _Part) -> None:
        if g.rng.random() < 0.5:
            for s in first.sold:
                for b in second.bought:
                    g.link(s, b)

    _random_tree(g, spec.size, leaf, merge)
    return g.build()


def gen_co_bipartite(spec: GenSpec) -> Instance:
    """Random union/complete-join tree over single vertices."""
    g = _Builder(spec)

    def leaf() -> _Part:
        if g.rng.random() < 0.5:
            return _Part([g.buy()], [])
        return _Part([], [g.sell()])

    def merge(first: _Part, second: _Part) -> None:
        if g.rng.random() < 0.5:
            for s in first.sold:
                for b in second.bought:
                    g.link(s, b)
            for s in second.sold:
                for b in first.bought:
                    g.link(s, b)

    _random_tree(g, spec.size, leaf, merge)
    return g.build()


def gen_tp_chain(spec: GenSpec) -> Instance:
    """
    Boxes of two bought vertices in a row.

    Each box has a private sold vertex needing just that box, and each pair
    of neighbouring boxes shares a bridge sold vertex needing both, so the
    boxes are exactly the primes.
    """
    g = _Builder(spec)
    boxes = [[g.buy(), g.buy()] for _ in range(max(2, spec.size))]
    for box in boxes:
        s = g.sell()
        for b in box:
            g.link(s, b)
    for left, right in zip(boxes, boxes[1:]):
        s = g.sell()
        for b in left + right:
            g.link(s, b)
    return g.build()


def projective_plane_points(p: int) -> List[Tuple[int, int, int]]:
    """Normalised homogeneous coordinates over GF(p): p^2 + p + 1 points."""
    points = [(1, a, b) for a in range(p) for b in range(p)]
    points += [(0, 1, a) for a in range(p)]
    points.append((0, 0, 1))
    return points


def gen_projective_plane(p: int) -> Instance:
    """
    Lines are bought (unit cost), points sold (unit gain); a point needs every line through it.

    Raises:
        ContractViolation: If p is not a prime up to 7
    """
    if p not in PROJECTIVE_ORDERS:
        raise ContractViolation(f"projective order must be a prime up to 7, got {p}")
    coords = np.array(projective_plane_points(p))
    incidence = (coords @ coords.T) % p == 0
    size = len(coords)
    bought = [(f"L{i + 1}", 1) for i in range(size)]
    sold = [(f"P{j + 1}", 1) for j in range(size)]
    edges = [
        (f"P{j + 1}", f"L{i + 1}")
        for i in range(size)
        for j in range(size)
        if incidence[i, j]
    ]
    logger.debug("projective plane of order %d: %d points, %d incidences", p, size, len(edges))
    return Instance.build(bought, sold, edges)


def instance_from_arcs(diagram: ArcDiagram) -> Instance:
    """Removed arcs become bought vertices, added arcs sold ones; an edge for every crossing."""
    diagram.validate()
    edges = [(a.id, r.id) for a in diagram.add for r in diagram.remove if a.crosses(r)]
    return Instance.build(
        [(r.id, r.weight) for r in diagram.remove],
        [(a.id, a.weight) for a in diagram.add],
        edges,
    )


def parse_arcs(text: str) -> ArcDiagram:
    """
    Parses the ``arcs 1`` text format.

    Raises:
        ParseError: On a bad header, line kind or number
    """
    diagram = ArcDiagram()
    header_seen = False
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not header_seen:
            if line != ARCS_HEADER:
                raise ParseError(f"expected header '{ARCS_HEADER}', got '{line}'", number)
            header_seen = True
            continue
        fields = line.split()
        if fields[0] not in ("rm", "add") or len(fields) not in (4, 5):
            raise ParseError(f"expected 'rm|add <id> <x1> <x2> [w]', got '{line}'", number)
        try:
            x1, x2 = float(fields[2]), float(fields[3])
            weight = int(fields[4]) if len(fields) == 5 else 1
        except ValueError as e:
            raise ParseError(f"bad number in '{line}'", number) from e
        arc = Arc(fields[1], x1, x2, weight)
        (diagram.remove if fields[0] == "rm" else diagram.add).append(arc)
    if not header_seen:
        raise ParseError(f"missing header '{ARCS_HEADER}'")
    return diagram


FAMILIES: Dict[str, Callable[[GenSpec], Instance]] = {
    "biclique-union": gen_biclique_union,
    "forest": gen_forest,
    "path-cycle": gen_path_cycle,
    "chain": gen_chain,
    "tp": gen_trivially_perfect,
    "cobip": gen_co_bipartite,
    "permutation": gen_permutation,
    "tp-chain": gen_tp_chain,
    "projective": lambda spec: gen_projective_plane(spec.p),
}


def generate(spec: GenSpec) -> Instance:
    """
    Dispatches to the family's generator.

    Raises:
        ValueError: If the family is unknown
    """
    generator = FAMILIES.get(spec.family)
    if generator is None:
        raise ValueError(f"Unknown family: '{spec.family}'. Valid families: {', '.join(FAMILIES)}")
    return generator(spec)
