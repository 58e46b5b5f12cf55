"""Exact subset dynamic program over closed vertex sets."""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np

from .config import DP_BYTES_PER_STATE, MASK_BITS, Config
from .core import BudgetValue, Instance, schedule_bought
from .exceptions import SizeLimitError
from .report import SolveReport

logger = logging.getLogger(__name__)


@dataclass
class SubsetTable:
    """
    Optimal prefix peaks of closed vertex sets, one layer per cardinality.

    Masks are bit sets over the canonical vertex order (bought first, then
    sold). Each layer's masks are sorted so lookups are binary searches.
    """

    vertices: Tuple[str, ...]
    layers: List[Tuple[np.ndarray, np.ndarray]]

    def __len__(self) -> int:
        return sum(len(masks) for masks, _ in self.layers)

    def mask_of(self, vids: Iterable[str]) -> int:
        position = {v: i for i, v in enumerate(self.vertices)}
        mask = 0
        for v in vids:
            mask |= 1 << position[v]
        return mask

    def lookup(self, mask: int) -> Optional[int]:
        """Value stored for ``mask``, or None if the set is not closed (or was cut)."""
        k = bin(mask).count("1")
        if k >= len(self.layers):
            return None
        masks, values = self.layers[k]
        pos = int(np.searchsorted(masks, mask))
        if pos < len(masks) and int(masks[pos]) == mask:
            return int(values[pos])
        return None

    def is_identical(self, other: "SubsetTable") -> bool:
        if self.vertices != other.vertices or len(self.layers) != len(other.layers):
            return False
        return all(
            np.array_equal(m1, m2) and np.array_equal(v1, v2)
            for (m1, v1), (m2, v2) in zip(self.layers, other.layers)
        )


class _Arrays:
    def __init__(self, inst: Instance):
        self.vertices = inst.vertices
        self.n = len(self.vertices)
        self.weight = [inst.weight(v) for v in self.vertices]
        self.sold = [inst.is_sold(v) for v in self.vertices]
        self.need = [
            sum(1 << inst.index(b) for b in inst.neighbors(v)) if inst.is_sold(v) else 0
            for v in self.vertices
        ]

    def expand(self, chunk: Tuple[np.ndarray, np.ndarray, np.ndarray]):
        """All one-vertex closed extensions of a chunk of the previous layer."""
        masks, values, pcs = chunk
        new_masks, cands, new_pcs = [], [], []
        for v in range(self.n):
            bit = np.int64(1 << v)
            sel = (masks & bit) == 0
            if self.sold[v]:
                need = np.int64(self.need[v])
                sel &= (masks & need) == need
            if not sel.any():
                continue
            new_masks.append(masks[sel] | bit)
            cands.append(values[sel])
            new_pcs.append(pcs[sel] + self.weight[v])
        if not new_masks:
            empty = np.empty(0, dtype=np.int64)
            return empty, empty, empty
        return np.concatenate(new_masks), np.concatenate(cands), np.concatenate(new_pcs)


def prefix_cost(inst: Instance, Q: Iterable[str]) -> int:
    """Bought cost minus sold gain of a vertex set."""
    return sum(inst.weight(v) for v in Q)


def _check_size(inst: Instance, config: Config) -> None:
    n = len(inst)
    limit = min(config.exact_limit, MASK_BITS)
    if n > limit:
        estimate = (1 << n) * DP_BYTES_PER_STATE
        raise SizeLimitError(
            f"subset DP refuses {n} vertices (limit {limit}); "
            f"worst-case table needs about {estimate / 2**30:.1f} GiB"
        )


def build_table(
    inst: Instance,
    K: Optional[BudgetValue] = None,
    config: Optional[Config] = None,
    chunks: int = 1,
    workers: int = 1,
) -> SubsetTable:
    """
    Fills the DP layer by layer.

    Args:
        inst: Instance to solve
        K: If given, entries above K are dropped and the DP stops at an empty layer
        config: Size limits
        chunks: Number of independent slices each layer is expanded in
        workers: Threads expanding the slices; results do not depend on it

    Returns:
        SubsetTable of all (surviving) closed subsets

    Raises:
        SizeLimitError: If the instance exceeds the DP limit
    """
    config = config or Config()
    _check_size(inst, config)
    arrays = _Arrays(inst)

    masks = np.zeros(1, dtype=np.int64)
    values = np.zeros(1, dtype=np.int64)
    pcs = np.zeros(1, dtype=np.int64)
    layers = [(masks, values)]
    executor = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for _ in range(arrays.n):
            parts = max(1, min(chunks, len(masks)))
            slices = list(zip(
                np.array_split(masks, parts),
                np.array_split(values, parts),
                np.array_split(pcs, parts),
            ))
            if executor is not None:
                expanded = list(executor.map(arrays.expand, slices))
            else:
                expanded = [arrays.expand(s) for s in slices]
            new = np.concatenate([e[0] for e in expanded])
            cand = np.concatenate([e[1] for e in expanded])
            pc = np.concatenate([e[2] for e in expanded])
            if len(new) == 0:
                break

            order = np.lexsort((cand, new))
            new, cand, pc = new[order], cand[order], pc[order]
            first = np.ones(len(new), dtype=bool)
            first[1:] = new[1:] != new[:-1]
            masks, cand, pcs = new[first], cand[first], pc[first]
            values = np.maximum(pcs, cand)

            if K is not None:
                keep = values <= K
                masks, values, pcs = masks[keep], values[keep], pcs[keep]
            layers.append((masks, values))
            if len(masks) == 0:
                break
    finally:
        if executor is not None:
            executor.shutdown()

    return SubsetTable(vertices=arrays.vertices, layers=layers)


def reconstruct_witness(inst: Instance, table: SubsetTable) -> List[str]:
    """Backtracks from the full set, choosing the smallest predecessor value, lowest index on ties."""
    n = len(table.vertices)
    mask = (1 << n) - 1
    reverse = []
    for _ in range(n):
        best_v, best_val = -1, None
        for v in range(n):
            if not mask >> v & 1:
                continue
            val = table.lookup(mask ^ (1 << v))
            if val is not None and (best_val is None or val < best_val):
                best_v, best_val = v, val
        reverse.append(table.vertices[best_v])
        mask ^= 1 << best_v
    forward = list(reversed(reverse))
    return list(schedule_bought(inst, [v for v in forward if inst.is_bought(v)]))


def subset_dp_budget(inst: Instance, config: Optional[Config] = None, chunks: int = 1, workers: int = 1) -> SolveReport:
    """
    Computes the optimal budget with the closed-subset DP.

    Args:
        inst: Instance to solve
        config: Size limits
        chunks: Slices per layer
        workers: Threads per layer

    Returns:
        Self-certifying SolveReport

    Raises:
        SizeLimitError: If the instance exceeds the DP limit
    """
    start = time.perf_counter()
    table = build_table(inst, config=config, chunks=chunks, workers=workers)
    budget = table.lookup((1 << len(table.vertices)) - 1)
    witness = reconstruct_witness(inst, table)
    logger.debug("subset DP kept %d closed sets for %d vertices", len(table), len(inst))
    return SolveReport(
        budget=int(budget),
        witness=tuple(witness),
        algorithm="exact",
        elapsed=time.perf_counter() - start,
        states=len(table),
    )


def feasible_exact(inst: Instance, K: BudgetValue, config: Optional[Config] = None) -> bool:
    """Decides bg(inst) <= K, cutting every entry above K as it goes."""
    if K < 0:
        return False
    table = build_table(inst, K=K, config=config)
    return table.lookup((1 << len(table.vertices)) - 1) is not None
