"""Model checking, consistency, and entailment oracles."""

import pytest
from hypothesis import given, settings, strategies as st

from dlfit.core import (
    ALC, ALCI, ALCQ, And, AtLeast, AtMost, Bottom, Exists, Forall,
    InputError, Name, Not, Or, Role, Top, abox, cq, ontology, ucq,
)
from dlfit.homs import Mapping
from dlfit.semantics import (
    TreeInterpretation, abox_interpretation, build_iah, check_consistency,
    entails_ground, entails_ucq_bounded, evaluate_query, extension,
    find_finite_countermodel, interp, is_forest_model, is_model, unravel,
)

R = Role("r")


def two_cycle():
    return interp(
        {"a", "c"},
        {("A1", "a"), ("A2", "c")},
        {("r", "a", "c"), ("r", "c", "a")},
        {("a", "a")})


def test_interpretation_validation():
    with pytest.raises(InputError):
        interp(set())
    with pytest.raises(InputError):
        interp({"a"}, labels={("A", "b")})
    with pytest.raises(InputError):
        interp({"a"}, names={("x", "b")})


def test_extension_boolean_and_role_constructs():
    i = interp({"a", "b", "c"},
               {("A", "a"), ("A", "b"), ("B", "c")},
               {("r", "a", "b"), ("r", "a", "c")})
    assert extension(i, Name("A")) == {"a", "b"}
    assert extension(i, Not(Name("A"))) == {"c"}
    assert extension(i, And(Name("A"), Name("B"))) == set()
    assert extension(i, Or(Name("A"), Name("B"))) == {"a", "b", "c"}
    assert extension(i, Exists(R, Name("B"))) == {"a"}
    assert extension(i, Forall(R, Name("A"))) == {"b", "c"}
    assert extension(i, Exists(Role("r", True), Name("A"))) == {"b", "c"}
    assert extension(i, AtMost(1, R, Top())) == {"b", "c"}
    assert extension(i, AtLeast(2, R, Top())) == {"a"}


def test_is_model_two_step_forbidding_ontology():
    # forbids two consecutive role steps: holds on a single edge, fails on a
    # self-loop
    o = ontology([(Exists(R, Exists(R, Top())), Bottom())], ALC)
    edge = abox(roles=[("r", "a1", "a2")])
    loop = abox(roles=[("r", "b", "b")])
    assert is_model(abox_interpretation(edge), o)
    assert not is_model(abox_interpretation(loop), o)
    assert is_model(abox_interpretation(edge), edge)
    assert not is_model(abox_interpretation(loop),
                        abox(roles=[("s", "b", "b")]))
    with pytest.raises(InputError):
        is_model(abox_interpretation(edge), loop)  # b is not anchored


def test_check_consistency_edge_vs_loop():
    o = ontology([(Exists(R, Exists(R, Top())), Bottom())], ALC)
    assert check_consistency(abox(roles=[("r", "a1", "a2")]), o, ALC)
    assert not check_consistency(abox(roles=[("r", "b", "b")]), o, ALC)


def test_check_consistency_needs_type_elimination():
    o = ontology([(Top(), Exists(R, Name("B"))), (Name("B"), Bottom())], ALC)
    assert not check_consistency(abox(concepts=[("A", "a")]), o, ALC)
    o2 = ontology([(Name("A"), Exists(R, Name("A")))], ALC)
    assert check_consistency(abox(concepts=[("A", "a")]), o2, ALC)


def test_check_consistency_alcq():
    o = ontology([(Top(), AtMost(1, R, Top()))], ALCQ)
    assert check_consistency(abox(roles=[("r", "a", "b")]), o, ALCQ)
    assert not check_consistency(
        abox(roles=[("r", "a", "b"), ("r", "a", "c")]), o, ALCQ)


def all_propositional_models(a, names):
    """All label assignments to the individuals of a extending its
    assertions."""
    inds = sorted(a.individuals)
    extra = [(n, x) for x in inds for n in names
             if (n, x) not in a.concept_assertions]
    for bits in range(1 << len(extra)):
        labels = set(a.concept_assertions) | {
            extra[i] for i in range(len(extra)) if bits >> i & 1}
        yield interp(inds, labels, a.role_assertions,
                     {(x, x) for x in inds})


def prop_concepts():
    base = st.one_of(st.just(Top()), st.just(Bottom()),
                     st.builds(Name, st.sampled_from(["A", "B"])))
    return st.recursive(
        base, lambda inner: st.one_of(st.builds(Not, inner),
                                      st.builds(And, inner, inner),
                                      st.builds(Or, inner, inner)),
        max_leaves=4)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(prop_concepts(), prop_concepts()), max_size=2),
       st.sets(st.tuples(st.sampled_from(["A", "B"]),
                         st.sampled_from(["x", "y"])), min_size=1, max_size=3))
def test_consistency_matches_brute_force_on_propositional_instances(cis, cs):
    o = ontology(cis, ALC)
    a = abox(concepts=cs)
    want = any(is_model(i, o) for i in all_propositional_models(a, ["A", "B"]))
    assert check_consistency(a, o, ALC) == want


def test_is_forest_model_directions():
    i = two_cycle()
    a = abox(concepts=[("A1", "a")])
    # the backward edge breaks ALC, but antiparallel edges between the same
    # pair are a single undirected tree edge, so ALCI accepts it
    assert not is_forest_model(i, a, ALC)
    assert is_forest_model(i, a, ALCI)
    triangle = interp({"a", "c", "d"}, {("A1", "a")},
                      {("r", "a", "c"), ("r", "c", "d"), ("r", "d", "a")},
                      {("a", "a")})
    assert not is_forest_model(triangle, a, ALCI)
    loop = interp({"a", "t"}, {("A1", "a")}, {("r", "t", "t")}, {("a", "a")})
    assert not is_forest_model(loop, a, ALCI)
    tree = interp({"a", "t"}, {("A1", "a")}, {("r", "t", "a")}, {("a", "a")})
    assert not is_forest_model(tree, a, ALC)  # edge points at the individual
    assert is_forest_model(tree, a, ALCI)
    down = interp({"a", "t"}, {("A1", "a")}, {("r", "a", "t")}, {("a", "a")})
    assert is_forest_model(down, a, ALC)


def test_two_disjoint_cycles_model_the_inverse_cycles_witness():
    # each part is a model of its ABox but never a forest model
    i = two_cycle()
    assert is_model(i, abox(concepts=[("A1", "a")]))
    assert evaluate_query(
        i, cq(concepts=[("A2", "x")], roles=[("r", "x", "a")],
              variables=["x"]))


def test_tree_interpretation_validation():
    TreeInterpretation(frozenset({((1,), "A")}),
                       frozenset({((1,), "r", False)}))
    with pytest.raises(InputError):
        TreeInterpretation(frozenset({((2,), "A")}),
                           frozenset({((2,), "r", False)}))  # gap: no (1,)
    with pytest.raises(InputError):
        TreeInterpretation(frozenset({((1,), "A")}), frozenset())  # no edge


def test_unravel_of_cycle_is_a_tree_with_hom_back():
    i = two_cycle()
    tree, tails = unravel(i, "a", ALC, 3)
    assert tree.depth == 3
    # each word maps back to the element it copies
    back = {(): "a"}
    for w in sorted(tree.words, key=len):
        if not w:
            continue
        r, up = tree.edge_at(w)
        assert not up  # ALC unravels forward only
        succs = {y for (rr, x, y) in i.edges
                 if rr == r and x == back[w[:-1]]}
        matches = [y for y in succs if tree.labels_at(w) ==
                   {n for n, e in i.labels if e == y}]
        assert matches
        back[w] = matches[0]
    assert set(tails) <= set(tree.words)


def test_unravel_alci_walks_edges_backwards_too():
    i = interp({"a", "t"}, {("B", "t")}, {("r", "t", "a")}, {("a", "a")})
    tree_alc, _ = unravel(i, "a", ALC, 2)
    tree_alci, _ = unravel(i, "a", ALCI, 2)
    assert tree_alc.words == frozenset({()})
    assert any(up for _, _, up in tree_alci.node_edges)


def test_build_iah_pulls_back_labels_and_undoes_identifications():
    i = interp({"u"}, {("A", "u"), ("B", "u")}, {("r", "u", "u")},
               {("a", "u")})
    a = abox(roles=[("r", "x", "y")])
    h = Mapping((("x", "u"), ("y", "u")))
    j = build_iah(i, a, h, ALC, 2)
    assert {"A", "B"} <= {n for n, e in j.labels if e == "x"}
    assert ("r", "x", "y") in j.edges
    assert ("r", "x", "x") not in j.edges  # identification undone
    with pytest.raises(InputError):
        build_iah(i, abox(concepts=[("C", "z")]), Mapping((("z", "u"),)),
                  ALC, 1)  # not a homomorphism: C missing at u


def test_entails_ground_basics():
    o = ontology([(Name("A"), Name("B"))], ALC)
    a = abox(concepts=[("A", "a")])
    assert entails_ground(a, o, cq(concepts=[("B", "a")]), ALC)
    assert not entails_ground(a, o, cq(concepts=[("C", "a")]), ALC)
    # role atom not in the ABox is never entailed by a consistent pair
    assert not entails_ground(a, o, cq(roles=[("r", "a", "a")]), ALC)
    # inconsistency entails everything
    bot = ontology([(Top(), Bottom())], ALC)
    assert entails_ground(a, bot, cq(roles=[("r", "a", "a")]), ALC)
    with pytest.raises(InputError):
        entails_ground(a, o, cq(concepts=[("B", "x")], variables=["x"]), ALC)


def test_evaluate_query_anchors_individuals():
    i = interp({"u", "v"}, {("A", "v")}, set(), {("a", "u")})
    assert not evaluate_query(i, cq(concepts=[("A", "a")]))
    assert evaluate_query(i, ucq(cq(concepts=[("A", "x")], variables=["x"])))


def test_entails_ucq_bounded_with_existential_witness():
    o = ontology([(Name("A"), Exists(R, Name("B")))], ALC)
    a = abox(concepts=[("A", "a")])
    q = ucq(cq(concepts=[("B", "x")], roles=[("r", "a", "x")],
               variables=["x"]))
    assert entails_ucq_bounded(a, o, q, ALC).status == "entailed"
    q2 = ucq(cq(concepts=[("C", "x")], variables=["x"]))
    ans = entails_ucq_bounded(a, o, q2, ALC)
    assert ans.status == "not-entailed"
    cm = ans.countermodel
    assert is_model(cm, o) and is_model(cm, a)
    assert not evaluate_query(cm, q2)


def test_entails_ucq_bounded_countermodels_are_genuine():
    # inverse-role ontology distinguishes the logics
    o = ontology([(Name("A1"), Exists(Role("r", True), Name("A2")))], ALCI)
    a = abox(concepts=[("A1", "a")])
    q = ucq(cq(concepts=[("A2", "x")], roles=[("r", "x", "a")],
               variables=["x"]))
    assert entails_ucq_bounded(a, o, q, ALCI).status == "entailed"
    empty = ontology([], ALC)
    ans = entails_ucq_bounded(a, empty, q, ALC)
    assert ans.status == "not-entailed"


def test_find_finite_countermodel():
    o = ontology([(Name("A"), Exists(R, Name("B")))], ALC)
    a = abox(concepts=[("A", "a")])
    q = ucq(cq(concepts=[("C", "x")], variables=["x"]))
    model, settled = find_finite_countermodel(a, o, q, ALC, 2)
    assert settled and model is not None
    assert is_model(model, o) and is_model(model, a)
    assert not evaluate_query(model, q)
    q_hit = ucq(cq(concepts=[("B", "x")], variables=["x"]))
    model2, settled2 = find_finite_countermodel(a, o, q_hit, ALC, 2)
    assert settled2 and model2 is None
