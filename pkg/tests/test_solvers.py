import math

import pytest

from bipartite_budget.config import Config
from bipartite_budget.core import Instance, budget_of_ordering, is_valid_ordering, net_value
from bipartite_budget.exact import feasible_exact, subset_dp_budget
from bipartite_budget.exceptions import ClassMismatchError
from bipartite_budget.generators import GenSpec, generate
from bipartite_budget.oracle import brute_force_budget, brute_force_feasible
from bipartite_budget.recognition import (
    COMPLETE_JOIN,
    LEAF,
    UNION,
    DecompTree,
    decompose_co_bipartite,
    decompose_trivially_perfect,
)
from bipartite_budget.solvers import GeneralSolver, Solver, general_budget, solve
from bipartite_budget.solvers import blocks
from bipartite_budget.solvers.decomposition import (
    TreeDecision,
    feasible_co_bipartite,
    feasible_trivially_perfect,
    solve_co_bipartite,
    solve_trivially_perfect,
)
from bipartite_budget.solvers.permutation import (
    WindowTable,
    feasible_permutation,
    permutation_strategy,
    solve_permutation,
)
from bipartite_budget.solvers.simple import (
    solve_biclique,
    solve_biclique_union,
    solve_forest_unit,
    solve_path_cycle,
)

from conftest import biclique_instance, make_random_instance, unit


def union_of_bicliques(shapes):
    """Unit bicliques with (bought, sold) sizes, vertex ids numbered across components."""
    bought, sold, edges = [], [], []
    for nb, ns in shapes:
        bs = [f"b{len(bought) + i + 1}" for i in range(nb)]
        ss = [f"s{len(sold) + j + 1}" for j in range(ns)]
        edges += [(s, b) for s in ss for b in bs]
        bought += bs
        sold += ss
    return unit(bought, sold, edges)


def disjoint_union(first, second):
    def tag(inst, prefix):
        return (
            [(prefix + v, w) for v, w in inst.bought],
            [(prefix + v, w) for v, w in inst.sold],
            [(prefix + s, prefix + b) for s, b in inst.edges],
        )

    b1, s1, e1 = tag(first, "x")
    b2, s2, e2 = tag(second, "y")
    return Instance.build(b1 + b2, s1 + s2, e1 + e2)


def exact(inst):
    return subset_dp_budget(inst).budget


# --- block algebra ---

class TestBlocks:
    def test_block_profile(self, p6):
        block = blocks.Block.of(p6, ("b1", "s1", "b2", "s2"))
        assert block.profile == (1, 0)
        assert block.rank == (0, 1)

    def test_then_joins_profiles(self, p6):
        a = blocks.Block.of(p6, ("b1", "b2"))
        b = blocks.Block.of(p6, ("s1", "s2", "s3"))
        joined = a.then(b)
        assert joined.profile == (2, -1)
        assert joined.vertices == ("b1", "b2", "s1", "s2", "s3")

    def test_series_merges_a_cheaper_tail(self):
        inst = biclique_instance(2, 2)
        strategy = blocks.biclique(inst, ["b1", "b2"], ["s1", "s2"])
        assert len(strategy) == 1
        assert blocks.value(strategy) == 2
        assert blocks.net(strategy) == 0

    def test_parallel_runs_self_financing_blocks_first(self):
        inst = union_of_bicliques([(2, 1), (1, 2)])
        heavy = blocks.biclique(inst, ["b1", "b2"], ["s1"])
        light = blocks.biclique(inst, ["b3"], ["s2", "s3"])
        merged = blocks.parallel(heavy, light)
        assert blocks.ordering(merged)[:3] == ("b3", "s2", "s3")
        assert blocks.value(merged) == 1

    def test_parallel_keeps_argument_order_on_ties(self):
        inst = union_of_bicliques([(1, 1), (1, 1)])
        first = blocks.biclique(inst, ["b1"], ["s1"])
        second = blocks.biclique(inst, ["b2"], ["s2"])
        assert blocks.ordering(blocks.parallel(first, second)) == ("b1", "s1", "b2", "s2")
        assert blocks.ordering(blocks.parallel(second, first)) == ("b2", "s2", "b1", "s1")

    def test_combine_with_empty_side(self):
        inst = biclique_instance(2, 1)
        h1 = blocks.biclique(inst, ["b1", "b2"], ["s1"])
        assert blocks.combine(h1, blocks.EMPTY, 2) == (True, h1)
        assert blocks.combine(h1, blocks.EMPTY, 1)[0] is False

    def test_combine_two_edges(self):
        inst = union_of_bicliques([(1, 1), (1, 1)])
        ok, merged = blocks.combine(
            blocks.biclique(inst, ["b1"], ["s1"]),
            blocks.biclique(inst, ["b2"], ["s2"]),
            1,
        )
        assert ok
        assert budget_of_ordering(inst, blocks.ordering(merged)) == 1

    def test_combine_prefers_larger_component_first(self):
        inst = union_of_bicliques([(2, 1), (3, 1)])
        ok, merged = blocks.combine(
            blocks.biclique(inst, ["b1", "b2"], ["s1"]),
            blocks.biclique(inst, ["b3", "b4", "b5"], ["s2"]),
            4,
        )
        assert ok
        assert blocks.value(merged) == 4

    def test_prune_drops_duplicates_and_dominated_singles(self):
        a = (blocks.Block(("x",), 3, 1),)
        b = (blocks.Block(("y",), 2, 1),)
        c = (blocks.Block(("z",), 2, 1),)
        d = (blocks.Block(("u",), 1, -1), blocks.Block(("v",), 4, 2))
        kept = blocks.prune_alternatives([a, b, c, d])
        assert kept == [b, d]


# --- closed forms ---

def test_biclique_budget_is_total_cost():
    assert solve_biclique(biclique_instance(3, 2)).budget == 3
    assert solve_biclique(biclique_instance(2, 4, costs=[2, 3])).budget == 5


def test_only_isolated_sold_vertices():
    inst = Instance.build([], [("s1", 1), ("s2", 2)], [])
    assert solve_biclique(inst).budget == 0


@pytest.mark.parametrize("seed", range(20))
def test_weighted_biclique(seed):
    base = make_random_instance(seed, n_bought=3, n_sold=3, max_weight=5, density=1.0)
    assert solve_biclique(base).budget == base.total_cost


def test_biclique_solver_rejects_paths(p6):
    with pytest.raises(ClassMismatchError):
        solve_biclique(p6)


@pytest.mark.parametrize("shapes,expected", [
    ([(1, 2), (2, 1)], 1),
    ([(2, 1), (2, 1)], 3),
    ([(2, 1), (3, 1)], 4),
    ([(1, 1), (1, 1), (1, 1)], 1),
])
def test_biclique_unions(shapes, expected):
    inst = union_of_bicliques(shapes)
    assert solve_biclique_union(inst).budget == expected
    assert exact(inst) == expected


def test_path_and_cycle_examples():
    assert solve_path_cycle(unit(["b1"], ["s1", "s2"], [("s1", "b1"), ("s2", "b1")])).budget == 1
    assert solve_path_cycle(unit(["b1", "b2"], ["s1"], [("s1", "b1"), ("s1", "b2")])).budget == 2
    assert solve_path_cycle(biclique_instance(2, 2)).budget == 2


def test_path_and_cycle_fixtures(p6, c6):
    assert solve_path_cycle(p6).budget == 1 == exact(p6)
    assert solve_path_cycle(c6).budget == 2 == exact(c6)


def test_path_cycle_needs_unit_weights():
    inst = Instance.build([("b1", 2)], [("s1", 1)], [("s1", "b1")])
    with pytest.raises(ClassMismatchError):
        solve_path_cycle(inst)


def test_forest_examples():
    star = unit(["b1"], ["s1", "s2", "s3"], [("s1", "b1"), ("s2", "b1"), ("s3", "b1")])
    spider = unit(["b1", "b2", "b3"], ["s1"], [("s1", "b1"), ("s1", "b2"), ("s1", "b3")])
    assert solve_forest_unit(star).budget == 1
    assert solve_forest_unit(spider).budget == 3


def test_forest_rejects_cycles(c6):
    with pytest.raises(ClassMismatchError):
        solve_forest_unit(c6)


# --- tree solvers ---

def test_join_of_two_edges():
    inst = unit(["b1", "b2"], ["s1", "s2"], [("s1", "b1"), ("s1", "b2"), ("s2", "b2")])
    tree = decompose_trivially_perfect(inst)
    ok, strategy = feasible_trivially_perfect(inst, tree, 1)
    assert ok
    assert blocks.ordering(strategy)[:2] == ("b2", "s2")
    assert feasible_trivially_perfect(inst, tree, 0)[0] is False


def test_complete_join_of_two_edges():
    inst = biclique_instance(2, 2)
    tree = decompose_co_bipartite(inst)
    assert feasible_co_bipartite(inst, tree, 2)[0]
    assert not feasible_co_bipartite(inst, tree, 1)[0]


def _tree_config():
    # every union of neighbourhoods is searched, so nothing falls back to the block algebra
    return Config(positive_search_bound=12, work_budget=1_000_000)


@pytest.mark.parametrize("seed", range(25))
@pytest.mark.parametrize("kind,family,size", [("tp", "tp", 4), ("cobip", "cobip", 9)])
def test_tree_decisions_match_exact(kind, family, size, seed):
    inst = generate(GenSpec(family, size=size, max_weight=1 + seed % 3, seed=seed))
    optimum = exact(inst)
    decision = TreeDecision(kind, _tree_config())
    for K in range(inst.total_cost + 1):
        assert decision.decide(inst, K) == (K >= optimum), K


def test_tree_decision_on_a_union_needs_the_larger_part_first():
    # 4 is reached only when the edge that loses less goes first
    inst = Instance.build(
        [("b1", 3), ("b2", 3)],
        [("s1", 1), ("s2", 2)],
        [("s1", "b1"), ("s2", "b2")],
    )
    decision = TreeDecision("tp", _tree_config())
    assert decision.decide(inst, 4)
    assert not decision.decide(inst, 3)
    assert exact(inst) == 4


def test_tree_decision_kinds():
    with pytest.raises(ValueError, match="Unknown tree kind"):
        TreeDecision("forest")


@pytest.mark.parametrize("seed", range(20))
def test_tree_feasibility_is_monotone(seed):
    tp = generate(GenSpec("tp", size=5, max_weight=3, seed=seed))
    cobip = generate(GenSpec("cobip", size=10, max_weight=3, seed=seed))
    tp_tree, cobip_tree = decompose_trivially_perfect(tp), decompose_co_bipartite(cobip)
    for inst, decide in (
        (tp, lambda K: feasible_trivially_perfect(tp, tp_tree, K)[0]),
        (cobip, lambda K: feasible_co_bipartite(cobip, cobip_tree, K)[0]),
    ):
        answers = [decide(K) for K in range(inst.total_cost + 1)]
        assert answers == sorted(answers)
        assert answers[-1]


def _factor(inst, vids):
    """Union tree of single-vertex leaves."""
    trees = [
        DecompTree(LEAF, frozenset({v}) & set(inst.bought_ids), frozenset({v}) & set(inst.sold_ids))
        for v in inst.sort_canonical(vids)
    ]
    tree = trees[0]
    for leaf in trees[1:]:
        tree = DecompTree(UNION, tree.bought | leaf.bought, tree.sold | leaf.sold, (tree, leaf))
    return tree


def _complete_join(first, second):
    return DecompTree(COMPLETE_JOIN, first.bought | second.bought, first.sold | second.sold, (first, second))


def test_complete_join_binarization_order_does_not_matter():
    factors = {
        "A": ([("a1", 2)], [("x1", 3)]),
        "B": ([("b1", 1), ("b2", 2)], [("y1", 2)]),
        "C": ([("c1", 3)], [("z1", 1), ("z2", 2)]),
    }
    bought = [pair for b, _ in factors.values() for pair in b]
    sold = [pair for _, s in factors.values() for pair in s]
    edges = [
        (s, b)
        for name, (_, ss) in factors.items()
        for other, (bs, _) in factors.items()
        if other != name
        for s, _ in ss
        for b, _ in bs
    ]
    inst = Instance.build(bought, sold, edges)
    A, B, C = (_factor(inst, [v for v, _ in b + s]) for b, s in factors.values())
    trees = [
        _complete_join(A, _complete_join(B, C)),
        _complete_join(_complete_join(A, B), C),
        _complete_join(B, _complete_join(A, C)),
        _complete_join(_complete_join(C, A), B),
    ]
    optimum = exact(inst)
    for K in range(inst.total_cost + 1):
        answers = {feasible_co_bipartite(inst, tree, K)[0] for tree in trees}
        assert answers == {K >= optimum}, K
    assert {blocks.value(feasible_co_bipartite(inst, tree, 0)[1]) for tree in trees} == {optimum}


def test_tree_solvers_reject_other_classes(c6):
    with pytest.raises(ClassMismatchError):
        solve_trivially_perfect(c6)
    with pytest.raises(ClassMismatchError):
        solve_permutation(c6)


@pytest.mark.parametrize("seed", range(100))
@pytest.mark.parametrize("family,size,weight", [
    ("biclique-union", 3, 3),
    ("path-cycle", 9, 1),
    ("path-cycle", 8, 1),
    ("tp", 5, 3),
    ("tp", 4, 1),
    ("cobip", 9, 3),
    ("cobip", 12, 1),
    ("permutation", 6, 3),
    ("chain", 6, 1),
])
def test_class_solver_matches_exact(family, size, weight, seed):
    inst = generate(GenSpec(family, size=size, max_weight=weight, seed=seed))
    expected = exact(inst)
    if family == "biclique-union":
        report = solve_biclique_union(inst)
    elif family == "path-cycle":
        report = solve_path_cycle(inst)
    elif family == "tp":
        report = solve_trivially_perfect(inst)
    elif family == "cobip":
        report = solve_co_bipartite(inst)
    else:
        report = solve_permutation(inst)
    report.certify(inst)
    assert report.budget == expected


@pytest.mark.parametrize("seed", range(25))
def test_unit_forest_matches_exact(seed):
    inst = generate(GenSpec("forest", size=12, seed=seed))
    report = solve_forest_unit(inst).certify(inst)
    assert report.budget == exact(inst)


@pytest.mark.parametrize("seed", range(10))
def test_permutation_decisions_are_monotone(seed):
    inst = generate(GenSpec("permutation", size=5, max_weight=2, seed=seed))
    optimum = exact(inst)
    assert feasible_permutation(inst, optimum)[0]
    if optimum > 0:
        assert not feasible_permutation(inst, optimum - 1)[0]
    assert feasible_permutation(inst, optimum + 1)[0]


def test_permutation_biclique():
    assert solve_permutation(biclique_instance(3, 2, costs=[1, 2, 4])).budget == 7


@pytest.mark.parametrize("seed", range(100))
def test_window_table_is_an_upper_bound(seed):
    inst = generate(GenSpec("permutation", size=7, max_weight=3, seed=seed))
    strategy = permutation_strategy(inst)
    order = blocks.ordering(strategy)
    assert is_valid_ordering(inst, order)
    assert budget_of_ordering(inst, order) == blocks.value(strategy) >= exact(inst)


def test_window_table_splits_around_the_prime():
    # spans [0,0], [0,1], [1,2], [2,2]: buying b1 or b3 leaves one window
    inst = unit(
        ["b1", "b2", "b3"],
        ["s1", "s2", "s3", "s4"],
        [("s1", "b1"), ("s2", "b1"), ("s2", "b2"), ("s3", "b2"), ("s3", "b3"), ("s4", "b3")],
        order_b=["b1", "b2", "b3"],
    )
    table = WindowTable(inst, ("b1", "b2", "b3"))
    assert blocks.value(table.strategy()) == 1 == exact(inst)
    assert (1, 2) in table.memo
    assert (0, 1) in table.memo


def test_window_table_on_a_long_chain():
    inst = generate(GenSpec("chain", size=60, max_weight=3, seed=1))
    config = Config(work_budget=2_000)
    perm = solve_permutation(inst, config=config).certify(inst)
    assert perm.budget == solve_trivially_perfect(inst, config=config).budget


@pytest.mark.parametrize("seed", range(3))
def test_permutation_never_refuses_large_instances(seed):
    inst = generate(GenSpec("permutation", size=60, max_weight=3, seed=seed))
    report = solve_permutation(inst, config=Config(work_budget=50)).certify(inst)
    assert report.algorithm == "perm"
    assert inst.lower_bound <= report.budget <= inst.total_cost


# --- general procedure ---

@pytest.mark.parametrize("seed", range(40))
def test_general_matches_oracle_at_every_budget(seed, config):
    inst = make_random_instance(seed, n_bought=4, n_sold=4, max_weight=1 + seed % 3, density=0.45)
    solver = GeneralSolver(inst, config)
    for K in range(inst.total_cost + 1):
        ok, strategy = solver.decide(K)
        assert ok is not None
        assert ok == brute_force_feasible(inst, K)
        if ok:
            assert budget_of_ordering(inst, blocks.ordering(strategy)) <= K


def test_general_on_biclique():
    inst = biclique_instance(3, 2)
    assert general_budget(inst, 3)[0] is True
    assert general_budget(inst, 2)[0] is False


@pytest.mark.parametrize("seed", range(60))
def test_general_on_weighted_six_by_five(seed, config):
    inst = make_random_instance(seed, n_bought=6, n_sold=4 + seed % 2, max_weight=4, density=0.5)
    optimum = exact(inst)
    solver = GeneralSolver(inst, config)
    for K in range(inst.total_cost + 1):
        ok, strategy = solver.decide(K)
        assert ok == (K >= optimum), K
        if ok:
            assert budget_of_ordering(inst, blocks.ordering(strategy)) <= K


@pytest.mark.parametrize("seed", range(300))
def test_general_procedure_answers_without_the_exhaustive_search(seed):
    inst = make_random_instance(
        seed,
        n_bought=3 + seed % 4,
        n_sold=2 + (seed // 4) % 4,
        max_weight=1 + seed % 3,
        density=0.35 + 0.1 * (seed % 4),
    )
    assert len(inst) <= 11
    solver = GeneralSolver(inst, Config(positive_search_bound=6, work_budget=1_000_000))
    answers = [solver.decide(K)[0] for K in range(inst.total_cost + 1)]
    assert answers == [feasible_exact(inst, K) for K in range(inst.total_cost + 1)]
    assert solver.fallbacks == 0


def test_general_returns_the_procedures_rejection():
    # the set machinery settles K=2 on its own
    inst = unit(["b1", "b2", "b3"], ["s1"], [("s1", "b1"), ("s1", "b2"), ("s1", "b3")])
    solver = GeneralSolver(inst, Config(positive_search_bound=6))
    assert solver.decide(2) == (False, blocks.EMPTY)
    assert solver.decide(3)[0] is True
    assert solver.fallbacks == 0


def test_general_solve_with_recursive_budgets(fano):
    report = Solver(Config(work_budget=2_000_000)).solve(fano, "general")
    assert report.budget == exact(fano)


def test_general_rejects_when_every_positive_set_is_too_expensive():
    # the only way to gain is to buy all three, so K=2 fails
    inst = unit(["b1", "b2", "b3"], ["s1", "s2"], [("s1", "b1"), ("s1", "b2"), ("s1", "b3"),
                                                   ("s2", "b1"), ("s2", "b2"), ("s2", "b3")])
    assert general_budget(inst, 2)[0] is False


# --- dispatcher ---

@pytest.mark.parametrize("seed", range(30))
def test_auto_matches_oracle(seed):
    inst = make_random_instance(seed, n_bought=5, n_sold=5, max_weight=3, density=0.4)
    report = solve(inst)
    assert report.budget == brute_force_budget(inst).budget
    assert is_valid_ordering(inst, report.witness)


@pytest.mark.parametrize("seed", range(10))
def test_bisection_count_is_logarithmic(seed):
    inst = generate(GenSpec("permutation", size=6, max_weight=4, seed=seed))
    report = Solver().solve(inst, "perm")
    assert report.probes <= math.ceil(math.log2(inst.total_cost + 1)) + 1


def test_auto_routes_the_fano_plane_to_the_exact_dp(fano):
    assert solve(fano).algorithm == "exact"


def test_auto_picks_the_cheapest_class(p6, c6):
    assert solve(biclique_instance(2, 2)).algorithm == "biclique"
    assert solve(p6).algorithm == "path-cycle"
    assert solve(c6).algorithm == "path-cycle"


def test_named_algorithm_outside_its_class(c6):
    with pytest.raises(ClassMismatchError):
        solve(c6, "tp")


def test_unknown_algorithm():
    with pytest.raises(ValueError, match="Unknown algorithm"):
        solve(biclique_instance(1, 1), "magic")


@pytest.mark.parametrize("seed", range(5))
def test_cross_check_agrees(seed):
    inst = generate(GenSpec("tp", size=4, max_weight=2, seed=seed))
    report = solve(inst, "tp", cross_check=True)
    assert report.budget == exact(inst)


def test_decide(p6):
    solver = Solver()
    assert solver.decide(p6, 1)
    assert not solver.decide(p6, 0)


# --- properties ---

@pytest.mark.parametrize("seed", range(15))
def test_disjoint_union_bounds(seed):
    first = make_random_instance(seed, n_bought=3, n_sold=3, max_weight=3)
    second = make_random_instance(seed + 100, n_bought=3, n_sold=3, max_weight=3)
    both = disjoint_union(first, second)
    a, b, ab = exact(first), exact(second), exact(both)
    assert max(a, b) <= ab <= a + b


@pytest.mark.parametrize("seed", range(15))
def test_removing_a_sold_vertex_never_helps(seed):
    inst = make_random_instance(seed, n_bought=4, n_sold=4, max_weight=3)
    whole = exact(inst)
    for s in inst.sold_ids:
        rest = inst.induced([v for v in inst.vertices if v != s])
        assert exact(rest) >= whole


@pytest.mark.parametrize("seed", range(10))
def test_all_solvers_agree_on_weighted_tp(seed):
    inst = generate(GenSpec("tp", size=4, max_weight=4, seed=seed))
    budgets = {name: solve(inst, name).budget for name in ("auto", "exact", "tp", "general")}
    assert len(set(budgets.values())) == 1, budgets


def _sold_runs_reversed(inst, ordering):
    out, run = [], []
    for v in ordering:
        if inst.is_sold(v):
            run.append(v)
        else:
            out += reversed(run)
            run = []
            out.append(v)
    return tuple(out + list(reversed(run)))


@pytest.mark.parametrize("seed", range(20))
def test_consecutive_sales_can_be_reordered(seed):
    inst = make_random_instance(seed, n_bought=5, n_sold=5, max_weight=4, density=0.4)
    witness = solve(inst).witness
    shuffled = _sold_runs_reversed(inst, witness)
    assert is_valid_ordering(inst, shuffled)
    assert budget_of_ordering(inst, shuffled) == budget_of_ordering(inst, witness)


@pytest.mark.parametrize("seed", range(20))
def test_budget_is_the_deepest_prefix_deficit(seed):
    inst = make_random_instance(seed, n_bought=4, n_sold=4, max_weight=5, density=0.5)
    witness = solve(inst).witness
    deepest = min(net_value(inst, witness[:i]) for i in range(len(witness) + 1))
    assert budget_of_ordering(inst, witness) == -deepest


def _with_twins(base, vid, w):
    """``vid`` replaced by w unit copies with its neighbourhood."""
    copies = [vid] + [f"{vid}t{k}" for k in range(1, w)]
    if base.is_bought(vid):
        bought = [(b, 1) for b in base.bought_ids if b != vid] + [(c, 1) for c in copies]
        sold = [(s, 1) for s in base.sold_ids]
        edges = set(base.edges) | {(s, c) for s in base.neighbors(vid) for c in copies}
    else:
        bought = [(b, 1) for b in base.bought_ids]
        sold = [(s, 1) for s in base.sold_ids if s != vid] + [(c, 1) for c in copies]
        edges = set(base.edges) | {(c, b) for b in base.neighbors(vid) for c in copies}
    return Instance.build(bought, sold, edges)


@pytest.mark.parametrize("seed", range(20))
def test_weighted_vertex_equals_unit_twins(seed):
    base = make_random_instance(seed, n_bought=3, n_sold=3, density=0.6)
    vid = base.vertices[seed % len(base)]
    w = 2 + seed % 2
    weighted = Instance.build(
        [(b, w if b == vid else 1) for b in base.bought_ids],
        [(s, w if s == vid else 1) for s in base.sold_ids],
        base.edges,
    )
    assert exact(weighted) == exact(_with_twins(base, vid, w))


@pytest.mark.parametrize("seed", range(15))
def test_general_feasibility_is_monotone(seed, config):
    inst = make_random_instance(seed, n_bought=5, n_sold=4, max_weight=3, density=0.45)
    solver = GeneralSolver(inst, config)
    answers = [solver.decide(K)[0] for K in range(inst.total_cost + 1)]
    assert answers == sorted(answers)
    assert answers[-1]
