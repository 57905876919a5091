"""Product spaces, exact enumeration, conditioning, risk tables."""

from fractions import Fraction

import pytest

from localcut.digraph import MultiDigraph
from localcut.probability import (CutModel, EnumerationCapError, ProductSpace,
                                  SpaceError, cond_prob, estimate_cond_prob,
                                  exact_prob, risk_table_exact,
                                  risk_table_from_json, space_from_json,
                                  validate_cut_model, vertex_probabilities)

from corpus import corpus


def biased_pair():
    # dyadic weights so the Fraction path sums to exactly 1
    return ProductSpace.build([
        ("x", [0, 1], [0.25, 0.75]),
        ("y", ["a", "b", "c"], [0.5, 0.25, 0.25]),
    ])


def test_space_build_rejects_bad_input():
    with pytest.raises(SpaceError):
        ProductSpace.build([("x", [0], [1.0]), ("x", [0], [1.0])])
    with pytest.raises(SpaceError):
        ProductSpace.build([("x", [], [])])
    with pytest.raises(SpaceError):
        ProductSpace.build([("x", [0, 1], [1.0])])
    with pytest.raises(SpaceError):
        ProductSpace.build([("x", [0, 1], [-0.5, 1.5])])
    with pytest.raises(SpaceError):
        ProductSpace.build([("x", [0, 1], [0.3, 0.3])])


def test_outcomes_sum_to_one():
    space = biased_pair()
    assert space.n_outcomes == 6
    assert sum(p for _, p in space.outcomes()) == pytest.approx(1.0, abs=1e-15)
    assert sum(p for _, p in space.outcomes_exact()) == Fraction(1)


def test_enumeration_cap():
    space = ProductSpace.uniform([(f"b{i}", [0, 1]) for i in range(8)])
    with pytest.raises(EnumerationCapError):
        list(space.outcomes(cap=255))
    assert len(list(space.outcomes(cap=256))) == 256


def test_exact_prob_matches_rational_enumeration():
    space = biased_pair()

    def event(pt):
        return pt["x"] == 1 and pt["y"] != "a"

    want = Fraction(3, 4) * Fraction(1, 2)
    assert exact_prob(space, event, exact=True) == want
    assert exact_prob(space, event) == pytest.approx(float(want), abs=1e-15)


def test_cond_prob_and_zero_condition_convention():
    space = biased_pair()

    def event(pt):
        return pt["y"] == "b"

    def given(pt):
        return pt["x"] == 1

    assert cond_prob(space, event, given) == pytest.approx(0.25, abs=1e-15)
    assert cond_prob(space, event, given, exact=True) == Fraction(1, 4)
    # impossible condition contributes probability 0, not an error
    assert cond_prob(space, event, lambda pt: False) == 0.0
    assert cond_prob(space, event, lambda pt: False, exact=True) == Fraction(0)


def test_float_enumeration_tracks_exact_on_many_variables():
    space = ProductSpace.build(
        [(f"b{i}", [0, 1], [1.0 / 3.0, 2.0 / 3.0]) for i in range(10)])

    def event(pt):
        return sum(pt.values()) % 3 == 0

    want = exact_prob(space, event, exact=True)
    assert exact_prob(space, event) == pytest.approx(float(want), abs=1e-13)


def test_estimate_cond_prob_is_deterministic_and_calibrated():
    space = biased_pair()

    def event(pt):
        return pt["y"] == "b"

    def given(pt):
        return pt["x"] == 1

    a = estimate_cond_prob(space, event, given, 4000, seed=5)
    b = estimate_cond_prob(space, event, given, 4000, seed=5)
    assert a == b
    assert a.conditioned and a.hits > 0
    assert abs(a.estimate - 0.25) <= max(2.0 * a.half_width, 0.02)
    none = estimate_cond_prob(space, event, lambda pt: False, 100, seed=5)
    assert not none.conditioned and none.estimate == 0.0
    with pytest.raises(ValueError):
        estimate_cond_prob(space, event, given, 0, seed=5)


def path_graph():
    return MultiDigraph.build(["u", "v"], [("e1", "u", "v")])


def test_validate_cut_model_catches_bad_models():
    g = path_graph()
    space = ProductSpace.uniform([("b", [0, 1])])
    good = CutModel(g, lambda pt: frozenset({"u", "v"}) if pt["b"] else frozenset(),
                    lambda pt: frozenset())
    assert validate_cut_model(space, good).ok

    not_closed = CutModel(g, lambda pt: frozenset({"u"}), lambda pt: frozenset())
    chk = validate_cut_model(space, not_closed)
    assert not chk.ok and "out-closed" in chk.reason

    uncovered = CutModel(g, lambda pt: frozenset({"v"}), lambda pt: frozenset())
    chk = validate_cut_model(space, uncovered)
    assert not chk.ok and "misses boundary" in chk.reason

    ghost = CutModel(g, lambda pt: frozenset(), lambda pt: frozenset({"nope"}))
    chk = validate_cut_model(space, ghost)
    assert not chk.ok and "unknown edge" in chk.reason


def test_zero_probability_outcomes_are_ignored():
    g = path_graph()
    space = ProductSpace.build([("b", [0, 1], [1.0, 0.0])])
    # the b=1 branch would break out-closure, but it has probability zero
    model = CutModel(g, lambda pt: frozenset({"u"}) if pt["b"] else frozenset(),
                     lambda pt: frozenset())
    assert validate_cut_model(space, model).ok


def test_risk_table_exact_matches_direct_conditionals():
    for inst in corpus(12):
        table = risk_table_exact(inst.space, inst.model)
        for (eid, z), p in table.entries.items():
            want = cond_prob(inst.space,
                             lambda pt, eid=eid: eid in inst.model.f_of(pt),
                             lambda pt, z=z: z in inst.model.a_of(pt))
            assert p == pytest.approx(want, abs=1e-12)


def test_vertex_probabilities_match_exact_prob():
    inst = corpus(3)[0]
    probs = vertex_probabilities(inst.space, inst.model)
    for v in inst.graph.vertices:
        want = exact_prob(inst.space,
                          lambda pt, v=v: v in inst.model.a_of(pt))
        assert probs[v] == pytest.approx(want, abs=1e-14)


def test_risk_table_validation():
    g = path_graph()
    table = risk_table_from_json({"risks": []}, g)
    assert table.entries == {("e1", "v"): 1.0}
    table = risk_table_from_json({"risks": [{"edge": "e1", "z": "v", "p": 0.25}]}, g)
    assert table.entries[("e1", "v")] == 0.25
    with pytest.raises(SpaceError):
        risk_table_from_json({"risks": [{"edge": "e1", "z": "u", "p": 0.5}]}, g)
    with pytest.raises(SpaceError):
        risk_table_from_json({}, g)
    bad = risk_table_from_json({"risks": []}, g)
    bad.entries[("e1", "v")] = 1.5
    with pytest.raises(ValueError):
        bad.validate(g)


def test_space_json_round_trip():
    space = space_from_json({"variables": [
        {"name": "x", "values": [0, 1], "weights": [0.5, 0.5]}]})
    assert space.n_outcomes == 2
    with pytest.raises(SpaceError):
        space_from_json({"variables": [{"name": "x", "values": [0, 1]}]})
