"""Instance model, ordering validity and budget evaluation."""
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from .config import MAX_TOTAL_WEIGHT
from .exceptions import ContractViolation, InvalidOrderingError, ParseError

logger = logging.getLogger(__name__)

Ordering = Tuple[str, ...]
BudgetValue = int

INSTANCE_HEADER = "bgp 1"
ORDERING_HEADER = "order 1"


@dataclass(frozen=True)
class Instance:
    """
    Weighted bipartite precedence graph.

    Bought vertices carry a positive cost, sold vertices a non-negative gain.
    An edge (s, b) means sold vertex s can only be processed after bought
    vertex b. The declaration order of ``bought`` is the canonical order used
    for every lexicographic tie-break.
    """

    bought: Tuple[Tuple[str, int], ...]
    sold: Tuple[Tuple[str, int], ...]
    edges: FrozenSet[Tuple[str, str]]
    order_b: Optional[Tuple[str, ...]] = None

    _cost: Dict[str, int] = field(init=False, repr=False, compare=False)
    _gain: Dict[str, int] = field(init=False, repr=False, compare=False)
    _sold_nbrs: Dict[str, FrozenSet[str]] = field(init=False, repr=False, compare=False)
    _bought_nbrs: Dict[str, FrozenSet[str]] = field(init=False, repr=False, compare=False)
    _index: Dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        cost: Dict[str, int] = {}
        gain: Dict[str, int] = {}
        for vid, c in self.bought:
            if vid in cost:
                raise ContractViolation(f"duplicate vertex id '{vid}'")
            if not isinstance(c, int) or c < 1:
                raise ContractViolation(f"bought vertex '{vid}' needs a positive integer cost, got {c!r}")
            cost[vid] = c
        for vid, g in self.sold:
            if vid in cost or vid in gain:
                raise ContractViolation(f"duplicate vertex id '{vid}'")
            if not isinstance(g, int) or g < 0:
                raise ContractViolation(f"sold vertex '{vid}' needs a non-negative integer gain, got {g!r}")
            gain[vid] = g
        if sum(cost.values()) + sum(gain.values()) > MAX_TOTAL_WEIGHT:
            raise ContractViolation("total weight does not fit a signed 64-bit integer")

        sold_nbrs: Dict[str, Set[str]] = {vid: set() for vid in gain}
        bought_nbrs: Dict[str, Set[str]] = {vid: set() for vid in cost}
        for s, b in self.edges:
            if s not in gain:
                raise ContractViolation(f"edge ({s}, {b}) references unknown sold vertex '{s}'")
            if b not in cost:
                raise ContractViolation(f"edge ({s}, {b}) references unknown bought vertex '{b}'")
            sold_nbrs[s].add(b)
            bought_nbrs[b].add(s)

        if self.order_b is not None and sorted(self.order_b) != sorted(cost):
            raise ContractViolation("declared B-ordering must list every bought vertex exactly once")

        index = {vid: i for i, (vid, _) in enumerate(self.bought)}
        offset = len(self.bought)
        index.update({vid: offset + i for i, (vid, _) in enumerate(self.sold)})

        object.__setattr__(self, "_cost", cost)
        object.__setattr__(self, "_gain", gain)
        object.__setattr__(self, "_sold_nbrs", {k: frozenset(v) for k, v in sold_nbrs.items()})
        object.__setattr__(self, "_bought_nbrs", {k: frozenset(v) for k, v in bought_nbrs.items()})
        object.__setattr__(self, "_index", index)

    @classmethod
    def build(
        cls,
        bought: Iterable[Tuple[str, int]],
        sold: Iterable[Tuple[str, int]],
        edges: Iterable[Tuple[str, str]],
        order_b: Optional[Iterable[str]] = None,
    ) -> "Instance":
        """Create an instance from any iterables of (id, weight) pairs and (sold, bought) edges."""
        return cls(
            bought=tuple((str(v), int(w)) for v, w in bought),
            sold=tuple((str(v), int(w)) for v, w in sold),
            edges=frozenset((str(s), str(b)) for s, b in edges),
            order_b=tuple(order_b) if order_b is not None else None,
        )

    # --- vertex queries ---

    @property
    def bought_ids(self) -> Tuple[str, ...]:
        return tuple(vid for vid, _ in self.bought)

    @property
    def sold_ids(self) -> Tuple[str, ...]:
        return tuple(vid for vid, _ in self.sold)

    @property
    def vertices(self) -> Tuple[str, ...]:
        """All vertex ids in canonical order: bought first, then sold."""
        return self.bought_ids + self.sold_ids

    def __len__(self) -> int:
        return len(self.bought) + len(self.sold)

    def __contains__(self, vid: object) -> bool:
        return vid in self._index

    def is_bought(self, vid: str) -> bool:
        return vid in self._cost

    def is_sold(self, vid: str) -> bool:
        return vid in self._gain

    def cost(self, vid: str) -> int:
        return self._cost[vid]

    def gain(self, vid: str) -> int:
        return self._gain[vid]

    def weight(self, vid: str) -> int:
        """Signed contribution to the running level: +cost for bought, -gain for sold."""
        if vid in self._cost:
            return self._cost[vid]
        return -self._gain[vid]

    def index(self, vid: str) -> int:
        return self._index[vid]

    def neighbors(self, vid: str) -> FrozenSet[str]:
        if vid in self._sold_nbrs:
            return self._sold_nbrs[vid]
        return self._bought_nbrs[vid]

    def has_edge(self, sold_id: str, bought_id: str) -> bool:
        return bought_id in self._sold_nbrs.get(sold_id, frozenset())

    def degree(self, vid: str) -> int:
        return len(self.neighbors(vid))

    @property
    def total_cost(self) -> int:
        return sum(self._cost.values())

    @property
    def total_gain(self) -> int:
        return sum(self._gain.values())

    @property
    def lower_bound(self) -> BudgetValue:
        """Budget no ordering can go under: the final level, floored at zero."""
        return max(0, self.total_cost - self.total_gain)

    @property
    def is_unit_weight(self) -> bool:
        return all(c == 1 for _, c in self.bought) and all(g == 1 for _, g in self.sold)

    def sort_canonical(self, vids: Iterable[str]) -> List[str]:
        return sorted(vids, key=self._index.__getitem__)

    def cost_of(self, vids: Iterable[str]) -> int:
        return sum(self._cost[v] for v in vids)

    def gain_of(self, vids: Iterable[str]) -> int:
        return sum(self._gain[v] for v in vids)

    def released(self, bought_set: Iterable[str]) -> FrozenSet[str]:
        """Sold vertices whose whole neighbourhood lies inside ``bought_set``."""
        bought_set = frozenset(bought_set)
        return frozenset(s for s, nbrs in self._sold_nbrs.items() if nbrs <= bought_set)

    def isolated_sold(self) -> Tuple[str, ...]:
        return tuple(s for s in self.sold_ids if not self._sold_nbrs[s])

    def isolated_bought(self) -> Tuple[str, ...]:
        return tuple(b for b in self.bought_ids if not self._bought_nbrs[b])

    # --- derived instances ---

    def induced(self, vids: Iterable[str]) -> "Instance":
        """Sub-instance induced by ``vids``, keeping declaration order."""
        keep = frozenset(vids)
        unknown = keep - self._index.keys()
        if unknown:
            raise ContractViolation(f"unknown vertices: {sorted(unknown)}")
        order_b = None
        if self.order_b is not None:
            order_b = tuple(b for b in self.order_b if b in keep)
        return Instance(
            bought=tuple(p for p in self.bought if p[0] in keep),
            sold=tuple(p for p in self.sold if p[0] in keep),
            edges=frozenset(e for e in self.edges if e[0] in keep and e[1] in keep),
            order_b=order_b,
        )

    def residual(self, processed: Iterable[str]) -> "Instance":
        """Instance left after buying ``processed`` and selling everything it releases."""
        processed = frozenset(processed)
        if not processed <= self._cost.keys():
            raise ContractViolation("residual() takes bought vertices only")
        gone = processed | self.released(processed)
        return self.induced(v for v in self.vertices if v not in gone)

    def block(self, bought_set: Iterable[str]) -> "Instance":
        """Sub-instance on ``bought_set`` plus the sold vertices it releases."""
        bought_set = frozenset(bought_set)
        return self.induced(bought_set | self.released(bought_set))

    def split_isolated(self) -> Tuple[Tuple[str, ...], "Instance", Tuple[str, ...]]:
        """Return (isolated sold, core instance, isolated bought)."""
        head = self.isolated_sold()
        tail = self.isolated_bought()
        if not head and not tail:
            return head, self, tail
        outside = set(head) | set(tail)
        return head, self.induced(v for v in self.vertices if v not in outside), tail

    def to_networkx(self) -> nx.Graph:
        """Undirected graph with ``side`` ('b' or 's') and ``weight`` node attributes."""
        graph = nx.Graph()
        for vid, c in self.bought:
            graph.add_node(vid, side="b", weight=c)
        for vid, g in self.sold:
            graph.add_node(vid, side="s", weight=g)
        graph.add_edges_from(self.edges)
        return graph


# --- ordering evaluation ---

def _check_permutation(inst: Instance, ordering: Sequence[str]) -> None:
    if len(ordering) != len(inst) or set(ordering) != set(inst.vertices):
        raise ContractViolation("ordering is not a permutation of the instance's vertices")


def is_valid_ordering(inst: Instance, ordering: Sequence[str]) -> bool:
    """
    Checks that every sold vertex comes after all of its bought neighbours.

    Args:
        inst: Instance the ordering refers to
        ordering: Permutation of the instance's vertices

    Returns:
        True if every precedence edge is respected

    Raises:
        ContractViolation: If the ordering is not a permutation
    """
    _check_permutation(inst, ordering)
    seen: Set[str] = set()
    for vid in ordering:
        if inst.is_sold(vid) and not inst.neighbors(vid) <= seen:
            return False
        seen.add(vid)
    return True


def peak_and_level(inst: Instance, sequence: Iterable[str]) -> Tuple[int, int]:
    """Peak prefix value (including the empty prefix) and final level of a vertex sequence."""
    level = 0
    peak = 0
    for vid in sequence:
        level += inst.weight(vid)
        if level > peak:
            peak = level
    return peak, level


def budget_of_ordering(inst: Instance, ordering: Sequence[str]) -> BudgetValue:
    """
    Evaluates the budget of a valid ordering.

    Args:
        inst: Instance the ordering refers to
        ordering: Permutation of the instance's vertices

    Returns:
        Maximum over all prefixes of (bought cost - sold gain), at least 0

    Raises:
        InvalidOrderingError: If the ordering breaks a precedence edge
    """
    if not is_valid_ordering(inst, ordering):
        raise InvalidOrderingError("budget is undefined for an ordering that breaks precedence")
    return peak_and_level(inst, ordering)[0]


def net_value(inst: Instance, subset: Iterable[str]) -> int:
    """Returns gains of the sold members minus costs of the bought members."""
    total = 0
    for vid in subset:
        if vid not in inst:
            raise ContractViolation(f"unknown vertex '{vid}'")
        total -= inst.weight(vid)
    return total


# --- file formats ---

def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _parse_weight(token: str, line_number: int) -> int:
    try:
        return int(token)
    except ValueError as e:
        raise ParseError(f"weight must be an integer, got '{token}'", line_number) from e


def parse_instance(text: str) -> Instance:
    """
    Parses the ``bgp 1`` instance format.

    Args:
        text: File contents

    Returns:
        Validated Instance

    Raises:
        ParseError: On malformed lines, duplicate or unknown ids, bad weights
    """
    bought: List[Tuple[str, int]] = []
    sold: List[Tuple[str, int]] = []
    edges: List[Tuple[str, str, int]] = []
    order_b: Optional[Tuple[str, ...]] = None
    order_line = 0
    seen: Dict[str, int] = {}
    header_seen = False

    for line_number, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        tokens = line.split()
        if not header_seen:
            if tokens != INSTANCE_HEADER.split():
                raise ParseError(f"expected header '{INSTANCE_HEADER}'", line_number)
            header_seen = True
            continue

        kind = tokens[0]
        if kind in ("b", "s"):
            if len(tokens) != 3:
                raise ParseError(f"'{kind}' line needs an id and a weight", line_number)
            vid, weight = tokens[1], _parse_weight(tokens[2], line_number)
            if vid in seen:
                raise ParseError(f"duplicate vertex id '{vid}' (first declared on line {seen[vid]})", line_number)
            seen[vid] = line_number
            if kind == "b":
                if weight < 1:
                    raise ParseError(f"bought vertex '{vid}' needs a positive cost", line_number)
                bought.append((vid, weight))
            else:
                if weight < 0:
                    raise ParseError(f"sold vertex '{vid}' needs a non-negative gain", line_number)
                sold.append((vid, weight))
        elif kind == "e":
            if len(tokens) != 3:
                raise ParseError("'e' line needs a sold id and a bought id", line_number)
            edges.append((tokens[1], tokens[2], line_number))
        elif kind == "order-b":
            if order_b is not None:
                raise ParseError("B-ordering declared twice", line_number)
            order_b = tuple(tokens[1:])
            order_line = line_number
        else:
            raise ParseError(f"unknown line type '{kind}'", line_number)

    if not header_seen:
        raise ParseError(f"missing header '{INSTANCE_HEADER}'", 1)

    sold_ids = {vid for vid, _ in sold}
    bought_ids = {vid for vid, _ in bought}
    for s, b, line_number in edges:
        if s not in sold_ids:
            raise ParseError(f"unknown vertex '{s}' (expected a declared sold id)", line_number)
        if b not in bought_ids:
            raise ParseError(f"unknown vertex '{b}' (expected a declared bought id)", line_number)
    if order_b is not None and sorted(order_b) != sorted(bought_ids):
        raise ParseError("B-ordering must list every bought vertex exactly once", order_line)

    total = sum(w for _, w in bought) + sum(w for _, w in sold)
    if total > MAX_TOTAL_WEIGHT:
        raise ParseError("total weight does not fit a signed 64-bit integer", len(text.splitlines()))

    return Instance.build(bought, sold, [(s, b) for s, b, _ in edges], order_b)


def serialize_instance(inst: Instance) -> str:
    """Writes an instance in the ``bgp 1`` format with edges in canonical order."""
    lines = [INSTANCE_HEADER]
    lines.extend(f"b {vid} {c}" for vid, c in inst.bought)
    lines.extend(f"s {vid} {g}" for vid, g in inst.sold)
    for s, b in sorted(inst.edges, key=lambda e: (inst.index(e[0]), inst.index(e[1]))):
        lines.append(f"e {s} {b}")
    if inst.order_b is not None:
        lines.append("order-b " + " ".join(inst.order_b))
    return "\n".join(lines) + "\n"


def parse_ordering(text: str) -> Ordering:
    """Parses an ``order 1`` certificate into a tuple of vertex ids."""
    sequence: List[str] = []
    header_seen = False
    for line_number, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        if not header_seen:
            if line.split() != ORDERING_HEADER.split():
                raise ParseError(f"expected header '{ORDERING_HEADER}'", line_number)
            header_seen = True
            continue
        tokens = line.split()
        if len(tokens) != 1:
            raise ParseError("ordering lines hold exactly one vertex id", line_number)
        sequence.append(tokens[0])
    if not header_seen:
        raise ParseError(f"missing header '{ORDERING_HEADER}'", 1)
    return tuple(sequence)


def serialize_ordering(ordering: Sequence[str]) -> str:
    return "\n".join([ORDERING_HEADER, *ordering]) + "\n"


def schedule_bought(inst: Instance, bought_order: Sequence[str]) -> Ordering:
    """
    Turns an order of the bought vertices into a full ordering.

    Isolated sold vertices go first; every other sold vertex follows the
    purchase that completes its neighbourhood, in canonical order.
    """
    by_last: Dict[str, List[str]] = {}
    position = {b: i for i, b in enumerate(bought_order)}
    head = []
    for s in inst.sold_ids:
        nbrs = inst.neighbors(s)
        if not nbrs:
            head.append(s)
        else:
            last = max(nbrs, key=position.__getitem__)
            by_last.setdefault(last, []).append(s)
    order = list(head)
    for b in bought_order:
        order.append(b)
        order.extend(by_last.get(b, ()))
    return tuple(order)
