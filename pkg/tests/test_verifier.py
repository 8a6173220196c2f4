"""Oracles, amalgamation-failure witnessing, confusion sweeps, collisions."""

from __future__ import annotations

import pickle

import pytest

from finstruct import core
from finstruct.consistency import BudgetExceeded
from finstruct.core import ElementMap, Structure, StructureError, pullback, quotient
from finstruct.families import (
    AbelianGroup,
    Coloring,
    FnFamily,
    FN_SIGNATURE,
    TreeShape,
    build_JC,
    build_template,
    diagram_Fn,
    diagram_lineq,
    gen_Fn,
    gen_G,
    io_expansion,
    marking,
    tree_instance,
)
from finstruct.morphisms import canonical_embeddings, find_homomorphism
from finstruct.rng import SplitMix64
from finstruct.verifier import (
    ClassOracle,
    ExpansionSpec,
    antichain,
    check_confusion,
    collision_search,
    consistency_oracle,
    forbh_oracle,
    homogenization_probe,
    random_expansion,
    witnesses_failure,
)

Z2 = AbelianGroup([2])
T2 = build_template(Z2)


def test_forbh_oracle_fn():
    oracle = forbh_oracle(FnFamily(), size_bound=0)
    assert not oracle.member(gen_Fn(3))  # the identity maps F_3 in
    no_source = Structure(FN_SIGNATURE, ["x"], {"R": [("x",)]})
    assert oracle.member(no_source)
    d = diagram_Fn(3)
    spots = canonical_embeddings(d.base, 2).members
    glued, _ = build_JC(d, 2, Coloring.from_encoding(spots, 0b1010_1010))
    assert oracle.member(glued)
    assert oracle.witness(gen_Fn(3)) is not None
    assert oracle.witness(no_source) is None


def test_forbh_oracle_substructure_monotone():
    oracle = forbh_oracle(FnFamily(), size_bound=0)
    member = diagram_Fn(4).left  # no blue vertex, so no F_k maps in
    assert oracle.member(member)
    sub = core.induced_substructure(member, list(member.domain)[:3])
    assert oracle.member(sub)


def test_forbh_oracle_agrees_with_single_member_check():
    oracle = forbh_oracle(FnFamily(), size_bound=0)
    d = diagram_Fn(3)
    spots = canonical_embeddings(d.base, 2).members
    f3 = gen_Fn(3)
    for enc in (0, 0b11111111, 0b1100_0011, 0b0101_0101):
        glued, _ = build_JC(d, 2, Coloring.from_encoding(spots, enc))
        assert oracle.member(glued) == (find_homomorphism(f3, glued) is None)


def test_consistency_oracle():
    oracle = consistency_oracle(T2, 2, 3)
    assert oracle.member(marking(tree_instance(2), (0,), Z2))
    amalgam = diagram_lineq(4, Z2).free_amalgam().amalgam
    assert not oracle.member(amalgam)
    empty = Structure(T2.signature, [], {})
    assert oracle.member(empty)


def test_witnesses_failure():
    assert witnesses_failure(diagram_Fn(3), forbh_oracle(FnFamily(), size_bound=0))
    assert witnesses_failure(diagram_lineq(4, Z2), consistency_oracle(T2, 2, 3))
    # a span whose free amalgam stays in the class does not witness failure
    point = Structure(FN_SIGNATURE, ["x"], {})
    from finstruct.families import Diagram

    ident = ElementMap.identity(point.domain)
    degenerate = Diagram(point, point, point, ident, ident)
    assert not witnesses_failure(degenerate, forbh_oracle(FnFamily(), size_bound=0))


def test_witnesses_failure_requires_closure_and_membership():
    closed_less = ClassOracle(
        membership=lambda s: True, inverse_hom_closed=False, description="open"
    )
    with pytest.raises(StructureError):
        witnesses_failure(diagram_Fn(3), closed_less)
    from finstruct.families import Diagram

    f3 = gen_Fn(3)
    d = diagram_Fn(3)
    bad = Diagram(d.base, d.left, f3, d.left_emb, ElementMap(
        d.base.domain, f3.domain, {x: x for x in d.base.domain}
    ))
    with pytest.raises(StructureError):
        witnesses_failure(bad, forbh_oracle(FnFamily(), size_bound=0))


def test_quotients_of_failing_amalgam_stay_outside():
    d = diagram_Fn(3)
    free = d.free_amalgam().amalgam
    # quotients can shrink below the family member that maps in, so the
    # enumeration bound must cover the amalgam's own size
    oracle = forbh_oracle(FnFamily(), size_bound=len(free.domain))
    assert witnesses_failure(d, oracle)
    rng = SplitMix64(11)
    for _ in range(5):
        blocks: dict[int, list[str]] = {}
        count = 1 + rng.next_below(len(free.domain))
        for x in free.domain:
            blocks.setdefault(rng.next_below(count), []).append(x)
        glued, _ = quotient(free, list(blocks.values()))
        assert not oracle.member(glued)


def test_check_confusion_small_fn():
    d = diagram_Fn(2)
    oracle = forbh_oracle(FnFamily(), size_bound=0)
    report = check_confusion(d, 2, oracle)
    assert report.colorings_tested == 16
    assert report.verdict and not report.failures
    doc = report.to_dict()
    assert doc["verdict"] is True and doc["colorings_tested"] == 16


def test_check_confusion_exhaustive_budget():
    d = diagram_Fn(3)
    oracle = forbh_oracle(FnFamily(), size_bound=0)
    with pytest.raises(BudgetExceeded):
        check_confusion(d, 3, oracle)  # 27 spots > 20


def test_check_confusion_sample_mode_deterministic():
    d = diagram_Fn(3)
    oracle = forbh_oracle(FnFamily(), size_bound=0)
    one = check_confusion(d, 2, oracle, mode="sample", samples=20, seed=42)
    two = check_confusion(d, 2, oracle, mode="sample", samples=20, seed=42)
    assert one.to_dict() == two.to_dict()
    assert one.colorings_tested == 20
    with pytest.raises(StructureError):
        check_confusion(d, 2, oracle, mode="sample", samples=0)
    with pytest.raises(StructureError):
        check_confusion(d, 2, oracle, mode="bogus")


def test_check_confusion_parallel_matches_sequential():
    d = diagram_Fn(2)
    oracle = forbh_oracle(FnFamily(), size_bound=0)
    seq = check_confusion(d, 2, oracle, jobs=1)
    par = check_confusion(d, 2, oracle, jobs=2)
    assert seq.to_dict() == par.to_dict()


def test_check_confusion_exhaustive_small_spot_counts():
    # every coloring passes whenever the sweep is exhaustively testable
    oracle = forbh_oracle(FnFamily(), size_bound=0)
    for n, m in ((2, 2), (2, 3)):
        report = check_confusion(diagram_Fn(n), m, oracle)
        assert report.colorings_tested == 2 ** (m**n)
        assert report.verdict


def test_bounds_cross_link_with_confusion():
    # a confusing diagram of order n plus a minimal multiplicity from the
    # threshold arithmetic; the sweep at that multiplicity is sampled when
    # exhausting it is out of budget
    from finstruct.bounds import BoundsParams, condition_holds, minimal_m

    d = diagram_Fn(2)
    oracle = forbh_oracle(FnFamily(), size_bound=0)
    m = minimal_m(n=2, r=1, t=0, cap=10**6)
    assert m == 4
    assert condition_holds(BoundsParams(1, 0, 2, m)).verdict
    report = check_confusion(d, m, oracle, mode="sample", samples=48, seed=5)
    assert report.verdict and report.colorings_tested == 48


def test_check_confusion_reports_failures():
    # lineq(2) at m=2: odd-parity colorings leave the consistent class
    d = diagram_lineq(2, Z2)
    oracle = consistency_oracle(T2, 2, 3)
    report = check_confusion(d, 2, oracle)
    assert report.colorings_tested == 16
    failed = {enc for enc, _ in report.failures}
    assert failed == {enc for enc in range(16) if bin(enc).count("1") % 2 == 1}
    assert not report.verdict


def test_oracles_pickle():
    # empty structures are members of both built-in classes
    for oracle, sig in (
        (forbh_oracle(FnFamily(), size_bound=0), FN_SIGNATURE),
        (consistency_oracle(T2, 2, 3), T2.signature),
    ):
        clone = pickle.loads(pickle.dumps(oracle))
        assert clone.member(Structure(sig, [], {}))
        assert clone.inverse_hom_closed


def test_antichain():
    assert antichain([gen_Fn(3), gen_Fn(4), gen_Fn(5)])
    assert not antichain([gen_Fn(3), gen_Fn(3)])
    shapes = TreeShape.all_shapes(4)
    assert len(shapes) == 5
    assert antichain([gen_G(s) for s in shapes])


def test_random_expansion():
    f3 = gen_Fn(3)
    unchanged = random_expansion(f3, ExpansionSpec(0, 1, seed=3))
    assert unchanged == f3
    one = random_expansion(f3, ExpansionSpec(2, 2, seed=9))
    two = random_expansion(f3, ExpansionSpec(2, 2, seed=9))
    assert one == two
    assert one.signature.arity("Q1") == 1
    assert one.signature.arity("Q2") == 2
    assert core.reduct(one, FN_SIGNATURE.names) == f3
    with pytest.raises(StructureError):
        ExpansionSpec(-1, 1, 0)
    with pytest.raises(StructureError):
        ExpansionSpec(1, 0, 0)


def test_collision_search_trivial_cases():
    d = diagram_Fn(3)
    spots = canonical_embeddings(d.base, 3).members
    constant = Coloring.from_encoding(spots, 0)
    glued, _ = build_JC(d, 3, constant)
    assert collision_search(d, 3, constant, glued) is None
    mixed = Coloring.from_encoding(spots, 0b1)
    glued, _ = build_JC(d, 3, mixed)
    pair = collision_search(d, 3, mixed, glued)
    assert pair is not None
    pi, sigma = pair
    assert mixed.of(pi) != mixed.of(sigma)


def test_collision_search_verified_on_random_expansions():
    d = diagram_Fn(3)
    spots = canonical_embeddings(d.base, 3).members
    rng = SplitMix64(123)
    for trial in range(3):
        coloring = Coloring.from_encoding(spots, rng.next_bits(len(spots)))
        glued, lifted = build_JC(d, 3, coloring)
        expansion = random_expansion(glued, ExpansionSpec(2, 1, seed=trial))
        pair = collision_search(d, 3, coloring, expansion)
        if pair is None:
            continue
        pi, sigma = pair
        hat_pi = ElementMap(d.base.domain, expansion.domain, lifted[pi].assignment)
        hat_sigma = ElementMap(d.base.domain, expansion.domain, lifted[sigma].assignment)
        assert pullback(hat_pi, expansion) == pullback(hat_sigma, expansion)
        assert coloring.of(pi) != coloring.of(sigma)


def test_collision_search_domain_mismatch():
    d = diagram_Fn(3)
    spots = canonical_embeddings(d.base, 2).members
    coloring = Coloring.from_encoding(spots, 0b1)
    with pytest.raises(StructureError):
        collision_search(d, 2, coloring, gen_Fn(3))


def test_homogenization_probe_basics():
    from finstruct.families import P_SIGNATURE

    single = Structure(P_SIGNATURE, ["a"], {"S": [("a",)]})
    assert homogenization_probe([single], seed=5)
    fragments = [
        Structure(
            P_SIGNATURE,
            ["a", "b", "c"],
            {"Ed": [("a", "b")], "S": [("a",)], "T": [("c",)]},
        ),
        Structure(P_SIGNATURE, ["u", "w"], {"Ed": [("u", "w")], "T": [("u",)]}),
    ]
    assert homogenization_probe(fragments, seed=17, trials=12)
    bad = Structure(
        P_SIGNATURE, ["a", "b"], {"Ed": [("a", "b")], "S": [("a",)], "T": [("b",)]}
    )
    with pytest.raises(StructureError):
        homogenization_probe([bad], seed=1)


def test_homogenization_probe_filters_label_mismatches():
    from finstruct.families import P_SIGNATURE

    # one expansion puts its element inside, the other outside; every trial
    # that tries to identify them is skipped by the embedding check
    inside = Structure(P_SIGNATURE, ["a"], {"S": [("a",)]})
    outside = Structure(P_SIGNATURE, ["a"], {"T": [("a",)]})
    assert homogenization_probe([inside, outside], seed=3, trials=24)
