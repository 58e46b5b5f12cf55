import pytest

from bipartite_budget.core import serialize_instance
from bipartite_budget.exact import subset_dp_budget
from bipartite_budget.exceptions import ContractViolation, ParseError
from bipartite_budget.generators import (
    FAMILIES,
    Arc,
    ArcDiagram,
    GenSpec,
    gen_projective_plane,
    generate,
    instance_from_arcs,
    parse_arcs,
    projective_plane_points,
)
from bipartite_budget.recognition import classify

REFOLDING = """arcs 1
# removed arcs sit above the line
rm 1 0 2
rm 2 4 6
rm 3 8 10
add a 1 5
add b 5.5 9
add c 1.5 4.5
"""

MEMBERSHIP = {
    "biclique-union": "biclique_union",
    "forest": "forest",
    "path-cycle": "path_cycle",
    "chain": "chain",
    "tp": "trivially_perfect",
    "cobip": "co_bipartite",
    "permutation": "permutation",
}


@pytest.mark.parametrize("family", sorted(FAMILIES))
def test_same_spec_same_instance(family):
    spec = GenSpec(family, size=5, max_weight=3, seed=11)
    assert serialize_instance(generate(spec)) == serialize_instance(generate(spec))


def test_seed_changes_the_instance():
    a = generate(GenSpec("tp", size=6, seed=1))
    b = generate(GenSpec("tp", size=6, seed=2))
    assert serialize_instance(a) != serialize_instance(b)


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("family,flag", sorted(MEMBERSHIP.items()))
def test_generated_instances_are_in_their_class(family, flag, seed):
    inst = generate(GenSpec(family, size=5, max_weight=2, seed=seed))
    assert getattr(classify(inst), flag)


def test_weights_stay_in_range():
    inst = generate(GenSpec("biclique-union", size=4, max_weight=5, seed=3))
    weights = [w for _, w in inst.bought + inst.sold]
    assert min(weights) >= 1 and max(weights) <= 5


def test_bad_sizes():
    with pytest.raises(ContractViolation):
        generate(GenSpec("forest", size=0))
    with pytest.raises(ContractViolation):
        generate(GenSpec("forest", max_weight=0))


def test_unknown_family():
    with pytest.raises(ValueError, match="Unknown family"):
        generate(GenSpec("hypercube"))


def test_tp_chain_shape():
    inst = generate(GenSpec("tp-chain", size=3))
    assert len(inst.bought) == 6
    assert len(inst.sold) == 5
    assert inst.neighbors("s4") == frozenset({"b1", "b2", "b3", "b4"})


@pytest.mark.parametrize("seed", range(10))
def test_path_cycle_shape(seed):
    inst = generate(GenSpec("path-cycle", size=8, seed=seed))
    report = classify(inst)
    assert report.path != report.cycle
    assert len(inst.edges) == (8 if report.cycle else 7)
    assert inst.is_unit_weight


def test_odd_path_cycle_sizes_give_paths():
    assert all(classify(generate(GenSpec("path-cycle", size=7, seed=s))).path for s in range(6))


# --- projective planes ---

def test_fano_plane(fano):
    assert len(fano) == 14
    assert all(fano.degree(v) == 3 for v in fano.vertices)
    assert fano.is_unit_weight


def test_order_three_plane():
    inst = gen_projective_plane(3)
    assert len(inst) == 26
    assert len(inst.edges) == 52
    assert all(inst.degree(v) == 4 for v in inst.vertices)


def test_two_lines_share_exactly_one_point(fano):
    lines = fano.bought_ids
    for i, a in enumerate(lines):
        for b in lines[i + 1:]:
            assert len(fano.neighbors(a) & fano.neighbors(b)) == 1


def test_points_are_normalised():
    points = projective_plane_points(5)
    assert len(points) == 31
    assert len(set(points)) == 31


@pytest.mark.parametrize("p", [1, 4, 11])
def test_unsupported_orders(p):
    with pytest.raises(ContractViolation):
        gen_projective_plane(p)


def test_projective_family_uses_p():
    assert len(generate(GenSpec("projective", p=3))) == 26


# --- arc diagrams ---

def test_refolding_example():
    inst = instance_from_arcs(parse_arcs(REFOLDING))
    assert inst.neighbors("a") == frozenset({"1", "2"})
    assert inst.neighbors("c") == frozenset({"1", "2"})
    assert inst.neighbors("b") == frozenset({"2", "3"})
    assert subset_dp_budget(inst).budget == 2


def test_disjoint_and_nested_arcs_do_not_cross():
    outer = Arc("o", 0, 10)
    assert not outer.crosses(Arc("n", 2, 3))
    assert not outer.crosses(Arc("d", 11, 12))
    inst = instance_from_arcs(ArcDiagram([outer], [Arc("n", 2, 3), Arc("d", 11, 12)]))
    assert not inst.edges


def test_crossing_is_symmetric():
    a, b = Arc("a", 0, 2), Arc("b", 1, 3)
    assert a.crosses(b) and b.crosses(a)


def test_arc_weights_carry_over():
    inst = instance_from_arcs(parse_arcs("arcs 1\nrm r 0 2 4\nadd a 1 3 2\n"))
    assert inst.cost("r") == 4
    assert inst.gain("a") == 2


@pytest.mark.parametrize("diagram", [
    ArcDiagram([Arc("r", 2, 1)], []),
    ArcDiagram([Arc("r", 0, 2), Arc("q", 2, 3)], []),
    ArcDiagram([], [Arc("a", 0, 2), Arc("b", 1, 3)]),
])
def test_invalid_diagrams(diagram):
    with pytest.raises(ContractViolation):
        instance_from_arcs(diagram)


@pytest.mark.parametrize("text,line", [
    ("rm 1 0 2\n", 1),
    ("arcs 1\nmove 1 0 2\n", 2),
    ("arcs 1\nrm 1 zero 2\n", 2),
    ("arcs 1\nadd a 1\n", 2),
])
def test_parse_arc_errors(text, line):
    with pytest.raises(ParseError) as info:
        parse_arcs(text)
    assert info.value.line_number == line


def test_empty_arc_file():
    with pytest.raises(ParseError, match="missing header"):
        parse_arcs("# nothing here\n")
