import pytest

from bipartite_budget.config import Config
from bipartite_budget.core import Instance
from bipartite_budget.exact import build_table, feasible_exact, prefix_cost, subset_dp_budget
from bipartite_budget.exceptions import SizeLimitError
from bipartite_budget.oracle import brute_force_budget, brute_force_feasible

from conftest import biclique_instance, make_random_instance, unit

FANO_BUDGET = 4


def test_prefix_cost():
    inst = Instance.build([("b1", 1), ("b2", 1)], [("s1", 1)], [("s1", "b1")])
    assert prefix_cost(inst, []) == 0
    assert prefix_cost(inst, ["b1", "b2", "s1"]) == 1


@pytest.mark.parametrize("costs", [[1, 1], [2, 3], [4, 1, 2]])
def test_biclique_budget_is_total_cost(costs):
    inst = biclique_instance(len(costs), 2, costs)
    assert subset_dp_budget(inst).budget == sum(costs)


@pytest.mark.parametrize("seed", range(60))
def test_matches_oracle(seed):
    n_bought = 2 + seed % 4
    n_sold = 2 + (seed // 4) % 4
    inst = make_random_instance(seed, n_bought, n_sold, max_weight=5, density=0.45)
    report = subset_dp_budget(inst)
    report.certify(inst)
    assert report.budget == brute_force_budget(inst).budget


@pytest.mark.parametrize("seed", range(15))
def test_decision_sweep_matches_oracle(seed):
    inst = make_random_instance(seed, 4, 4, max_weight=3)
    for K in range(inst.total_cost + 1):
        assert feasible_exact(inst, K) == brute_force_feasible(inst, K)


def test_fano_budget_is_pinned(fano):
    report = subset_dp_budget(fano)
    report.certify(fano)
    assert report.budget == FANO_BUDGET
    assert brute_force_budget(fano).budget == FANO_BUDGET


@pytest.mark.parametrize("seed", range(5))
def test_chunked_layers_are_identical(seed):
    inst = make_random_instance(seed, 5, 5, max_weight=4)
    base = build_table(inst)
    assert base.is_identical(build_table(inst, chunks=4))
    assert base.is_identical(build_table(inst, chunks=3, workers=3))


def test_table_lookup_of_unclosed_set():
    inst = unit(["b1"], ["s1"], [("s1", "b1")])
    table = build_table(inst)
    assert table.lookup(table.mask_of(["s1"])) is None
    assert table.lookup(table.mask_of(["b1"])) == 1
    assert table.lookup(table.mask_of(["b1", "s1"])) == 1


def test_size_limit_reports_memory():
    inst = biclique_instance(4, 4)
    with pytest.raises(SizeLimitError, match="GiB"):
        subset_dp_budget(inst, config=Config(exact_limit=6))


def test_negative_budget_is_infeasible():
    assert not feasible_exact(biclique_instance(1, 1), -1)


def test_mask_width_caps_a_larger_limit():
    inst = biclique_instance(40, 30)
    with pytest.raises(SizeLimitError, match="limit 62"):
        subset_dp_budget(inst, config=Config(exact_limit=100))


def test_twenty_two_vertices():
    inst = make_random_instance(3, 11, 11, max_weight=3, density=0.35)
    report = subset_dp_budget(inst).certify(inst)
    assert inst.lower_bound <= report.budget <= inst.total_cost
