import json

import numpy as np
import pytest

from cdgraph import verifier
from cdgraph.classes import conjugacy_classes
from cdgraph.constructors import build, cyclic, direct, extraspecial_plus, frobenius_metacyclic, symmetric
from cdgraph.graph import build_graph
from cdgraph.verdict import FAILS, HOLDS, INCONCLUSIVE, NOT_APPLICABLE, Verdict
from cdgraph.verifier import (
    ALL_CHECKS, THEOREM_CHECKS, check_conjecture_C, check_cor_diam, check_disc_ordinary,
    check_disc_pregular, check_fms, check_prop_25, check_thm_A, check_thm_B, isolated_size_pairs,
    revalidate, run_suite,
)
from conftest import corpus_group


def fresh(name):
    # corrupting tests mutate caches, so build a private copy
    from cdgraph.constructors import builtin_corpus
    return build(dict(builtin_corpus())[name], name=name)


# -- verdict plumbing ------------------------------------------------------


def test_verdict_forces_not_applicable():
    v = Verdict("X", "g", 2, hypothesis=FAILS, conclusion=HOLDS)
    assert v.conclusion == NOT_APPLICABLE
    doc = json.loads(v.dumps())
    assert set(doc) == {"check_id", "group", "prime", "hypothesis", "conclusion", "witnesses", "elapsed_ms"}
    assert "elapsed_ms" not in v.to_json(timing=False)


# -- individual checks -----------------------------------------------------


def test_thm_a_examples():
    assert check_thm_A(build(symmetric(3)), 2).hypothesis == FAILS
    v = check_thm_A(corpus_group("ex31a"), 2)
    assert (v.hypothesis, v.conclusion) == (HOLDS, HOLDS)
    assert v.witnesses["max_distance_from_maximal"] == 2
    v = check_thm_A(corpus_group("A5"), 5)
    assert v.hypothesis == FAILS and v.conclusion == NOT_APPLICABLE
    assert v.witnesses["p_separable"] is False


def test_cor_diam_examples():
    v = check_cor_diam(corpus_group("ex31a"), 2)
    assert v.conclusion == HOLDS and v.witnesses["diameter"] == 3
    v = check_cor_diam(corpus_group("ex31b"), 3)
    assert v.conclusion == HOLDS and v.witnesses["diameter"] == 3
    assert check_cor_diam(build(cyclic(10)), 2).hypothesis == FAILS


def test_thm_b_first_example():
    v = check_thm_B(corpus_group("ex31a"), 2)
    assert (v.hypothesis, v.conclusion) == (HOLDS, HOLDS)
    w = v.witnesses
    assert w["complement_order"] == 2625
    assert w["Z_H_order"] == w["H_meet_Z_G_order"] == 5
    [entry] = w["per_pi"]
    assert entry["pi"] == [2, 3, 7]
    assert entry["o_pi_order"] == 21 and entry["o_pi_prime_order"] == 125
    assert entry["o_pi"]["kernel_order"] == 7 and entry["o_pi"]["complement_order"] == 3
    assert entry["o_pi"]["kernel_abelian"] and entry["o_pi"]["complement_abelian"]
    assert entry["sylow_centralizes_complement"] == 2
    assert "sylow_centralizes_H_complement" in entry
    json.dumps(v.to_json())


def test_thm_b_second_example():
    v = check_thm_B(corpus_group("ex31b"), 3)
    assert v.hypothesis == FAILS and v.conclusion == NOT_APPLICABLE
    assert [2, 21] in v.witnesses["distance3_size_pairs"]
    assert v.witnesses["p_nilpotent"] is False


def test_disc_ordinary_examples():
    for spec, sizes in ((symmetric(3), [2, 3]), (frobenius_metacyclic(7, 6), [6, 7])):
        v = check_disc_ordinary(build(spec))
        assert v.conclusion == HOLDS
        assert v.witnesses["disconnected"] and v.witnesses["class_sizes"] == sizes
    v = check_disc_ordinary(build(extraspecial_plus(5)))
    assert v.conclusion == HOLDS and not v.witnesses["disconnected"]
    assert v.witnesses["quasi_frobenius"]["quasi_frobenius"] is False


def test_disc_pregular_examples():
    v = check_disc_pregular(build(frobenius_metacyclic(7, 6)), 2)
    assert v.conclusion == HOLDS and v.witnesses["clause"] == "a"
    assert v.witnesses["H"]["kernel_order"] == 7 and v.witnesses["H"]["complement_order"] == 3
    assert check_disc_pregular(corpus_group("ex31a"), 2).hypothesis == FAILS
    assert check_disc_pregular(build(cyclic(6)), 2).hypothesis == FAILS


def test_prop_s_examples():
    v = check_prop_25(corpus_group("ex31a"), 2)
    assert v.conclusion == HOLDS
    for entry in v.witnesses["per_B0"]:
        assert entry["B0"]["size"] == 35
        assert entry["S_order"] == 35 and entry["Z_p_prime_order"] == 5
        assert entry["S_over_Z_primes"] == [7]
    v = check_prop_25(build(symmetric(3)), 2)
    assert v.conclusion == HOLDS and v.witnesses["per_B0"][0]["S_order"] == 1
    v = check_prop_25(build(frobenius_metacyclic(7, 6)), 2)
    assert v.conclusion == HOLDS
    assert {e["S_order"] for e in v.witnesses["per_B0"]} == {7}


def test_prop_s_without_far_classes():
    # every non-central class of E125 has size 5, so S is trivial while Z is not
    v = check_prop_25(build(extraspecial_plus(5)), 2)
    assert v.conclusion == HOLDS
    assert all(e["S_order"] == 1 and not e["S_generated_by_far_classes"] for e in v.witnesses["per_B0"])


def test_fms_examples():
    assert check_fms(build(direct(symmetric(3), cyclic(5))), [2, 3]).conclusion == HOLDS
    v = check_fms(build(symmetric(3)), [2])
    assert v.conclusion == HOLDS and v.witnesses["a"] and v.witnesses["b"] and v.witnesses["c"]
    v = check_fms(build(cyclic(1)), [2])
    assert v.witnesses["a"] and v.witnesses["b"] and v.witnesses["c"]
    assert v.conclusion == NOT_APPLICABLE
    assert check_fms(corpus_group("A5"), [5]).hypothesis == FAILS


def test_conjecture_examples():
    v = check_conjecture_C(corpus_group("ex31a"), 2)
    assert (v.hypothesis, v.conclusion) == (HOLDS, HOLDS)
    assert [6, 7] in v.witnesses["isolated_size_pairs"]
    v = check_conjecture_C(build(frobenius_metacyclic(7, 6)), 2)
    assert (v.hypothesis, v.conclusion) == (HOLDS, HOLDS)
    v = check_conjecture_C(build(extraspecial_plus(5)), 2)
    assert v.hypothesis == FAILS


def test_isolated_pairs_need_coprime_sizes():
    g = build_graph(conjugacy_classes(build(extraspecial_plus(5))), 2)
    assert isolated_size_pairs(g) == []


# -- suites ----------------------------------------------------------------


def test_trivial_group_suite():
    out = run_suite(build(cyclic(1)), primes=[2, 3], checks=ALL_CHECKS)
    assert len(out) == 1 + 2 * 7
    assert all(v.conclusion == NOT_APPLICABLE for v in out)


def test_first_example_full_suite():
    out = run_suite(corpus_group("ex31a"), primes=[2], checks=THEOREM_CHECKS)
    assert [v.check_id for v in out] == ["DISC-ORD", "THM-A", "COR-DIAM", "THM-B", "DISC-PREG", "PROP-S", "FMS-EQ"]
    assert not any(v.failed for v in out)
    assert all(v.elapsed_ms >= 0 for v in out)


def test_suite_is_deterministic():
    a = [v.dumps(timing=False) for v in run_suite(fresh("S3xF21"), checks=ALL_CHECKS)]
    b = [v.dumps(timing=False) for v in run_suite(fresh("S3xF21"), checks=ALL_CHECKS)]
    assert a == b


def test_unknown_check_rejected():
    with pytest.raises(ValueError):
        run_suite(build(cyclic(2)), checks=["NOPE"])


@pytest.mark.parametrize("name", ["S4", "F7_6", "S3xD10", "A4xF20", "E27xS4", "D8xF21", "A5", "C5xF42"])
def test_no_theorem_fails_on_sample(name):
    out = run_suite(corpus_group(name), checks=ALL_CHECKS)
    assert [v for v in out if v.conclusion in (FAILS, INCONCLUSIVE)] == []


# -- fault injection and witness re-validation ------------------------------


def _corrupt_graph(G, p, far):
    """The real graph with the distance matrix replaced by a path metric."""
    g = build_graph(conjugacy_classes(G), p)
    n = len(g)
    idx = np.arange(n)
    g.dist = np.minimum(np.abs(idx[:, None] - idx[None, :]), far).astype(float)
    g.components = [list(range(n))]
    return g


def test_corrupted_distances_are_caught(monkeypatch):
    G = fresh("ex31a")
    bad = _corrupt_graph(G, 2, 6)
    monkeypatch.setattr(verifier, "_graph", lambda G, p: bad)
    v = check_cor_diam(G, 2)
    assert v.conclusion == FAILS
    ce = v.witnesses["counterexample"]
    assert ce["distance"] > 3 and {"B", "C"} <= set(ce)
    # the witness does not reproduce against an honest recomputation
    assert not revalidate(G, v)
    v = check_thm_A(G, 2)
    assert v.conclusion == FAILS and not revalidate(G, v)


def test_revalidate_reproduces_real_distances():
    G = corpus_group("ex31a")
    g = build_graph(conjugacy_classes(G), 2)
    i, j = next((i, j) for i in range(len(g)) for j in range(len(g)) if g.dist[i, j] == 3)
    fake = Verdict("COR-DIAM", "ex31a", 2, conclusion=FAILS, witnesses={"counterexample": {
        "B": {"class_index": g.classes[i].index}, "C": {"class_index": g.classes[j].index},
        "distance": 3}})
    assert revalidate(G, fake)
    with pytest.raises(ValueError):
        revalidate(G, Verdict("FMS-EQ", "x", [2]))


def test_fail_without_witness_is_an_error(monkeypatch):
    G = fresh("S3")
    monkeypatch.setattr(verifier.st, "is_p_separable", lambda G, p: True)

    @verifier._timed
    def broken(G):
        return Verdict("X", "S3", 2, conclusion=FAILS)

    with pytest.raises(AssertionError):
        broken(G)
