from fractions import Fraction as F

import pytest

from slopelab import families as fam
from slopelab.errors import (
    DisconnectedGraph,
    EmptyVertexSet,
    GenusTooSmall,
    InputError,
    NonPositiveLength,
)
from slopelab.graph import (
    PolarizedGraph,
    blocks,
    canonical_divisor,
    contract,
    contract_all_but,
    edge_profile,
    genus,
    is_stable,
    is_two_connected,
    minimal_model,
    validate,
)


def test_validate_segment():
    g = validate(
        {
            "vertices": [{"id": "u", "genus": 1}, {"id": "v", "genus": 1}],
            "edges": [{"id": "e", "u": "u", "v": "v", "length": "1"}],
        }
    )
    assert genus(g) == 2


def test_validate_errors():
    with pytest.raises(DisconnectedGraph):
        PolarizedGraph.build([("u", 1), ("v", 1)], [])
    with pytest.raises(NonPositiveLength):
        PolarizedGraph.build([("u", 1), ("v", 1)], [("e", "u", "v", 0)])
    with pytest.raises(EmptyVertexSet):
        PolarizedGraph.build([], [])
    with pytest.raises(InputError):
        PolarizedGraph.build([("u", -1)], [])
    with pytest.raises(InputError):
        PolarizedGraph.build([("u", 1), ("u", 1)], [])
    with pytest.raises(InputError):
        PolarizedGraph.build([("u", 1)], [("e", "u", "w", 1)])
    with pytest.raises(InputError):
        validate({"edges": []})


def test_genus_examples():
    assert genus(fam.banana(2)) == 2
    assert genus(fam.loop_graph(2)) == 2
    assert genus(fam.segment(2, 3)) == 5


@pytest.mark.parametrize("g", [2, 3, 4, 5])
def test_canonical_divisor(g):
    assert canonical_divisor(fam.banana(g)) == {"u": g - 1, "v": g - 1}
    for h in range(g):
        assert canonical_divisor(fam.two_gon(g, h)) == {"p1": 2 * h, "p2": 2 * (g - h - 1)}
    assert canonical_divisor(fam.point(g)) == {"p": 2 * g - 2}


def test_degree_of_canonical_divisor():
    for g in [fam.dumbbell(), fam.complete_graph(4), fam.caterpillar([1, 2], [[1], [], [1, 1]])]:
        assert sum(canonical_divisor(g).values()) == 2 * genus(g) - 2


def test_stability():
    assert not is_stable(fam.two_gon(3, 0))
    assert is_stable(fam.banana(3))
    path = PolarizedGraph.build([("a", 1), ("b", 0), ("c", 1)], [("e1", "a", "b", 1), ("e2", "b", "c", 1)])
    assert not is_stable(path)


def test_minimal_model_suppresses_valence_two():
    g = fam.theta(1, 2, 3).subdivide("e1", F(1, 3))
    mm = minimal_model(g)
    assert len(mm.vertices) == 2
    assert sorted(e.length for e in mm.edges) == [1, 2, 3]


def test_minimal_model_identity_and_errors():
    g = fam.complete_graph(4)
    assert minimal_model(g) == g
    with pytest.raises(GenusTooSmall):
        minimal_model(fam.circle())


def test_minimal_model_idempotent():
    g = fam.caterpillar([1, 2], [[1], [], [2]]).subdivide("b0", F(1, 2))
    mm = minimal_model(g)
    assert minimal_model(mm) == mm


def test_blocks_dumbbell():
    dec = blocks(fam.dumbbell(1, 2, 3))
    kinds = sorted(b.kind for b in dec.blocks)
    assert kinds == ["bridge", "loop", "loop"]
    for b in dec.blocks:
        assert b.graph.genus == 2
        if b.kind == "bridge":
            assert b.graph.q == {"u": 1, "v": 1}
        else:
            assert list(b.graph.q.values()) == [1]


def test_blocks_theta_and_segment():
    t = fam.theta()
    dec = blocks(t)
    assert len(dec.blocks) == 1 and dec.blocks[0].kind == "two-connected"
    s = blocks(fam.segment(1, 1))
    assert [b.kind for b in s.blocks] == ["bridge"]


def test_blocks_preserve_genus():
    g = fam.caterpillar([1, 2, 3], [[1, 2], [], [1], [3]])
    for b in blocks(g).blocks:
        assert b.graph.genus == g.genus


def test_two_connected():
    assert is_two_connected(fam.circle())
    assert not is_two_connected(fam.segment(1, 1))
    assert is_two_connected(fam.theta())
    assert not is_two_connected(fam.dumbbell())


def test_edge_profile():
    p = edge_profile(fam.dumbbell(1, 2, 3))
    assert p.delta0 == 4 and p.deltaH == {1: 2} and p.delta == 6
    b = edge_profile(fam.banana(3, [1, 2, 3, 4]))
    assert b.delta0 == 10 and b.deltaH == {}
    t = edge_profile(fam.two_gon(4, 1, F(1, 2), 3))
    assert t.delta0 == F(7, 2)


def test_contract_all_but():
    c = contract_all_but(fam.theta(2, 3, 5), "e1").graph
    assert len(c.vertices) == 1 and c.edges[0].is_loop and c.edges[0].length == 2
    assert list(c.q.values()) == [1]
    s = contract_all_but(fam.dumbbell(), "b").graph
    assert sorted(s.q.values()) == [1, 1] and not s.edges[0].is_loop
    t = contract_all_but(fam.two_gon(5, 2), "e1").graph
    assert list(t.q.values()) == [4]


def test_contract_preserves_genus_and_mapping():
    g = fam.complete_graph(4)
    c = contract(g, ["e01", "e23"])
    assert c.graph.genus == g.genus
    assert set(c.mapping) == {v.id for v in g.vertices}
    assert len(set(c.mapping.values())) == 2


def test_to_dict_roundtrip():
    g = fam.two_gon(3, 1, F(2, 3), 5)
    assert validate(g.to_dict()) == g
