"""Shared fixtures: named small instances, a seeded random-instance factory and a config."""
import numpy as np
import pytest

from bipartite_budget.config import Config
from bipartite_budget.core import Instance
from bipartite_budget.generators import gen_projective_plane


def make_random_instance(seed, n_bought=4, n_sold=4, max_weight=1, density=0.5):
    """Random instance with independent edges; weights drawn from 1..max_weight."""
    rng = np.random.default_rng(seed)
    bought = [(f"b{i + 1}", int(rng.integers(1, max_weight + 1))) for i in range(n_bought)]
    sold = [(f"s{j + 1}", int(rng.integers(1, max_weight + 1))) for j in range(n_sold)]
    edges = [
        (s, b)
        for s, _ in sold
        for b, _ in bought
        if rng.random() < density
    ]
    return Instance.build(bought, sold, edges)


def unit(bought, sold, edges, order_b=None):
    """Unit-weight instance from id lists."""
    return Instance.build([(b, 1) for b in bought], [(s, 1) for s in sold], edges, order_b=order_b)


def biclique_instance(n_bought, n_sold, costs=None):
    bought = [f"b{i + 1}" for i in range(n_bought)]
    sold = [f"s{j + 1}" for j in range(n_sold)]
    costs = costs or [1] * n_bought
    return Instance.build(
        list(zip(bought, costs)),
        [(s, 1) for s in sold],
        [(s, b) for s in sold for b in bought],
    )


@pytest.fixture
def random_instance():
    return make_random_instance


@pytest.fixture
def config():
    return Config(work_budget=500_000)


@pytest.fixture
def c6():
    """Cycle b1 s1 b2 s2 b3 s3."""
    return unit(
        ["b1", "b2", "b3"],
        ["s1", "s2", "s3"],
        [("s1", "b1"), ("s1", "b2"), ("s2", "b2"), ("s2", "b3"), ("s3", "b3"), ("s3", "b1")],
    )


@pytest.fixture
def p6():
    """Path s1 b1 s2 b2 s3 b3."""
    return unit(
        ["b1", "b2", "b3"],
        ["s1", "s2", "s3"],
        [("s1", "b1"), ("s2", "b1"), ("s2", "b2"), ("s3", "b2"), ("s3", "b3")],
    )


@pytest.fixture(scope="session")
def fano():
    return gen_projective_plane(2)
