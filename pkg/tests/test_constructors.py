import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from cdgraph.classes import conjugacy_classes
from cdgraph.constructors import (
    EX31A, EX31B, ActionNotAutomorphism, GroupSpec, InvalidSpec, ParseError, alternating, build,
    builtin_corpus, cyclic, dihedral, direct, extraspecial_plus, frobenius_metacyclic, parse_spec,
    perm, semidirect, serialize_spec, symmetric,
)
from cdgraph.permgroup import CapExceeded, center_mask


def test_cyclic_one_is_trivial():
    assert build(cyclic(1)).order == 1


def test_f42_has_trivial_center():
    G = build(frobenius_metacyclic(7, 6))
    assert G.order == 42
    assert center_mask(G).sum() == 1


def test_example_groups_order_and_center():
    for spec, degree in ((EX31A, 7 + 25), (EX31B, 21 + 25)):
        G = build(spec)
        assert G.order == 5250
        assert G.degree == degree
        assert center_mask(G).sum() == 5


@pytest.mark.parametrize("n", range(1, 9))
def test_family_orders(n):
    assert build(cyclic(n)).order == n
    assert build(dihedral(2 * n)).order == 2 * n
    if n <= 6:
        assert build(symmetric(n)).order == math.factorial(n)
        assert build(alternating(n)).order == max(1, math.factorial(n) // 2)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_extraspecial_order_center_exponent(p):
    G = build(extraspecial_plus(p))
    assert G.order == p ** 3
    assert G.degree == p * p
    assert center_mask(G).sum() == p
    assert set(G.orders.tolist()) == {1, p}
    assert not G.is_abelian()


@pytest.mark.parametrize("q,d", [(5, 2), (5, 4), (7, 3), (7, 6), (11, 5), (13, 4)])
def test_frobenius_metacyclic_classes(q, d):
    G = build(frobenius_metacyclic(q, d))
    assert G.order == q * d and G.degree == q
    table = conjugacy_classes(G)
    kernel = [c for c in table if c.order == q]
    outside = [c for c in table if c.order != q and c.size > 1]
    assert len(kernel) == (q - 1) // d and all(c.size == d for c in kernel)
    assert len(outside) == d - 1 and all(c.size == q for c in outside)


def test_direct_product_is_disjoint():
    G = build(direct(cyclic(3), symmetric(3)))
    assert G.order == 18 and G.degree == 6


def test_semidirect_valid_and_invalid_actions():
    # C7 by C3 acting as x -> x^2
    G = build(semidirect(cyclic(7), cyclic(3), [[[0, 0]]]))
    assert G.order == 21
    assert center_mask(G).sum() == 1
    with pytest.raises(ActionNotAutomorphism):
        # x -> x^3 has order 6 mod 7, not a C3 action
        build(semidirect(cyclic(7), cyclic(3), [[[0, 0, 0]]]))
    with pytest.raises(ActionNotAutomorphism):
        # x -> x^7 = 1 is not bijective
        build(semidirect(cyclic(7), cyclic(3), [[[0] * 7]]))


def test_parse_examples():
    assert parse_spec('{"kind":"cyclic","n":6}') == cyclic(6)
    text = '{"kind":"direct","parts":[{"kind":"dihedral","order":42},{"kind":"extraspecial_plus","p":5}]}'
    assert parse_spec(text) == EX31B
    s3 = parse_spec('{"kind":"perm","degree":3,"generators":[[[0,1]],[[0,1,2]]]}')
    assert build(s3).order == len(oracles.closure([(1, 0, 2), (1, 2, 0)], 3)) == 6


@pytest.mark.parametrize("text,position", [
    ('{"kind": "cyclic", "n": 6', 25),
    ('{"kind" "cyclic"}', 8),
])
def test_parse_error_reports_position(text, position):
    with pytest.raises(ParseError) as info:
        parse_spec(text)
    assert info.value.position == position


@pytest.mark.parametrize("text", [
    '{"kind":"cyclic"}',
    '{"kind":"cyclic","n":0}',
    '{"kind":"cyclic","n":6,"extra":1}',
    '{"kind":"dihedral","order":7}',
    '{"kind":"extraspecial_plus","p":2}',
    '{"kind":"extraspecial_plus","p":9}',
    '{"kind":"frobenius_metacyclic","q":7,"d":4}',
    '{"kind":"frobenius_metacyclic","q":8,"d":7}',
    '{"kind":"perm","degree":3,"generators":[[[0,3]]]}',
    '{"kind":"perm","degree":3,"generators":[[[0,1],[1,2]]]}',
    '{"kind":"direct","parts":[]}',
    '{"kind":"blob"}',
    '[1,2]',
])
def test_invalid_specs(text):
    with pytest.raises(InvalidSpec):
        parse_spec(text)


def test_cap_exceeded():
    with pytest.raises(CapExceeded):
        build(symmetric(6), cap=100)


def _specs():
    leaf = st.one_of(
        st.integers(1, 12).map(cyclic),
        st.integers(1, 12).map(lambda n: dihedral(2 * n)),
        st.integers(1, 5).map(symmetric),
        st.sampled_from([(5, 4), (7, 3), (7, 6)]).map(lambda t: frobenius_metacyclic(*t)),
        st.sampled_from([3, 5]).map(extraspecial_plus),
        st.just(perm(4, [[[0, 1, 2, 3]], [[0, 2]]])),
    )
    return st.recursive(leaf, lambda inner: st.lists(inner, min_size=1, max_size=3).map(
        lambda parts: direct(*parts)), max_leaves=4)


@given(_specs())
def test_serialize_parse_round_trip(spec):
    text = serialize_spec(spec)
    assert parse_spec(text) == spec
    assert serialize_spec(parse_spec(text)) == text
    assert json.loads(text)["kind"] == spec.kind


def test_corpus_contents():
    corpus = builtin_corpus()
    names = [n for n, _ in corpus]
    assert names == sorted(names) and len(set(names)) == len(names)
    specs = dict(corpus)
    assert specs["ex31a"] == EX31A
    assert specs["ex31b"] == EX31B
    for n in range(1, 51):
        assert specs[f"C{n}"] == cyclic(n)
    for n in range(3, 51):
        assert specs[f"D{2 * n}"] == dihedral(2 * n)
    assert specs["E27"] == extraspecial_plus(3) and specs["E125"] == extraspecial_plus(5)
    assert specs["F31_30"] == frobenius_metacyclic(31, 30)
    assert all(isinstance(s, GroupSpec) for s in specs.values())


@pytest.mark.slow
def test_every_corpus_entry_builds_within_order_limit():
    for name, spec in builtin_corpus():
        assert build(spec).order <= 10_000, name
