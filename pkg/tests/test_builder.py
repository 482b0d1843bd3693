import random

import pytest

from cpn.builder import (
    BuildPolicy,
    CpnArc,
    DanglingReferenceError,
    Provenance,
    UnresolvedCorequisiteError,
    build_cpn,
    resolve_cross_listings,
)
from cpn.model import Catalog, CoreqDecl, CourseCode, CourseRecord, RequirementClause

from conftest import arc_map

SAMPLE_ARCS = {
    ("CHEM 100", "BIOL 110"): 1.0,
    ("BIOL 110", "BIOL 111"): 1.0,
    ("BIOL 110", "BIOL 200"): 1.0,
    ("BIOL 200", "BIOL 201"): 1.0,
    ("CHEM 100", "CHEM 200"): 0.5,
    ("CHEM 102", "CHEM 200"): 0.5,
    ("CHEM 200", "BIOL 310/CHEM 310"): 1.0,
    ("BIOL 200", "BIOL 320"): 1.0,
    ("BIOL 310/CHEM 310", "BIOL 320"): 1.0,
}


def rec(code, title="", prereqs=(), coreqs=(), xl=()):
    return CourseRecord(code, title, RequirementClause.of(*prereqs), tuple(CoreqDecl(*c) if isinstance(c, tuple) else CoreqDecl(c) for c in coreqs), xl)


def test_cross_listing_sample(sample_catalog):
    merged, mapping = resolve_cross_listings(sample_catalog)
    group = (CourseCode("BIOL", "310"), CourseCode("CHEM", "310"))
    assert mapping == {group[0]: group, group[1]: group}
    assert len(merged) == 10
    m = merged.by_code()[group[0]]
    assert m.cross_listings == (group[1],)
    assert [[str(c) for c in g] for g in m.prerequisites.conjuncts] == [["CHEM 200"]]


def test_cross_listing_identity():
    cat = Catalog((rec("A 1"), rec("B 1", prereqs=[["A 1"]])))
    merged, mapping = resolve_cross_listings(cat)
    assert merged == cat and mapping == {}


def test_cross_listing_transitive_chain():
    cat = Catalog((rec("A 1", xl=("B 1",)), rec("B 1", xl=("C 1",)), rec("C 1"), rec("D 1", prereqs=[["C 1"]])))
    merged, mapping = resolve_cross_listings(cat)
    group = tuple(CourseCode(s, "1") for s in "ABC")
    assert set(mapping.values()) == {group}
    assert [str(r.code) for r in merged.records] == ["A 1", "D 1"]
    cpn, diags = build_cpn(cat)
    assert diags.merged_groups == (group,)
    assert arc_map(cpn) == {("A 1/B 1/C 1", "D 1"): 1.0}


def test_cross_listing_union_of_bindings():
    cat = Catalog((
        rec("P 1"), rec("P 2"),
        rec("A 1", prereqs=[["P 1"]], xl=("B 1",)),
        rec("B 1", prereqs=[["P 2"], ["P 1"]]),
    ))
    merged, _ = resolve_cross_listings(cat)
    (m,) = [r for r in merged.records if r.code == CourseCode("A", "1")]
    assert [[str(c) for c in g] for g in m.prerequisites.conjuncts] == [["P 1"], ["P 2"]]


def test_build_sample(sample_catalog):
    cpn, diags = build_cpn(sample_catalog, BuildPolicy("directed"))
    assert len(cpn.nodes) == 10
    assert len(cpn.arcs) == 9
    assert arc_map(cpn) == SAMPLE_ARCS
    assert cpn.node_for("CHEM 310").label == "BIOL 310/CHEM 310"
    assert diags.dangling_codes == () and diags.stub_nodes == ()
    assert [n.label for n in cpn.nodes][:3] == ["BIOL 100", "BIOL 110", "BIOL 111"]


def test_build_single_course():
    cpn, _ = build_cpn(Catalog((rec("A 1"),)))
    assert len(cpn.nodes) == 1 and cpn.arcs == ()


def test_three_way_or():
    cat = Catalog((rec("A 1"), rec("B 1"), rec("D 1"), rec("C 1", prereqs=[["A 1", "B 1", "D 1"]])))
    cpn, _ = build_cpn(cat)
    weights = arc_map(cpn)
    assert weights == {("A 1", "C 1"): 1 / 3, ("B 1", "C 1"): 1 / 3, ("D 1", "C 1"): 1 / 3}
    assert sum(weights.values()) == 1.0


def test_collisions_sum_then_clamp():
    # both cross-listed members name P 1, and an OR collapses onto one node
    cat = Catalog((
        rec("P 1"),
        rec("A 1", prereqs=[["P 1"]], xl=("B 1",)),
        rec("B 1", prereqs=[["P 1"], ["P 1", "Q 1"]]),
        rec("Q 1"),
    ))
    cpn, _ = build_cpn(cat)
    assert arc_map(cpn)[("P 1", "A 1/B 1")] == 1.0


def test_dangling_modes():
    cat = Catalog((rec("BIOL 110", prereqs=[["CHEM 999"]]),))
    cpn, diags = build_cpn(cat, BuildPolicy(dangling_mode="create_stub"))
    assert len(cpn.nodes) == 2 and cpn.node_by_id[1].stub
    assert diags.dangling_codes == (CourseCode("CHEM", "999"),) and diags.stub_nodes == (1,)
    cpn, diags = build_cpn(cat, BuildPolicy(dangling_mode="drop"))
    assert len(cpn.nodes) == 1 and cpn.arcs == () and diags.dangling_codes == (CourseCode("CHEM", "999"),)
    with pytest.raises(DanglingReferenceError, match="CHEM 999"):
        build_cpn(cat, BuildPolicy(dangling_mode="error"))


def test_self_loop_from_merge_is_diagnostic():
    cat = Catalog((rec("A 1", xl=("B 1",)), rec("B 1", prereqs=[["A 1"]])))
    cpn, diags = build_cpn(cat)
    assert cpn.arcs == ()
    assert diags.self_loops == ((CourseCode("A", "1"), CourseCode("A", "1")),)


def test_corequisites_directed(lecture_lab_catalog):
    cpn, _ = build_cpn(lecture_lab_catalog, BuildPolicy("directed"))
    arcs = {(cpn.label(a.source), cpn.label(a.target)): a for a in cpn.arcs}
    assert set(arcs) == {("CHEM 113", "CHEM 114"), ("CHEM 113", "CHEM 123"), ("CHEM 123", "CHEM 124"), ("CHEM 114", "CHEM 124")}
    assert arcs[("CHEM 113", "CHEM 114")].provenance is Provenance.COREQUISITE
    assert arcs[("CHEM 113", "CHEM 123")].provenance is Provenance.PREREQUISITE
    assert all(a.weight == 1.0 for a in arcs.values())


def test_corequisites_bidirectional(lecture_lab_catalog):
    cpn, _ = build_cpn(lecture_lab_catalog, BuildPolicy("bidirectional"))
    pairs = {(cpn.label(a.source), cpn.label(a.target)) for a in cpn.arcs}
    assert {("CHEM 113", "CHEM 114"), ("CHEM 114", "CHEM 113"), ("CHEM 123", "CHEM 124"), ("CHEM 124", "CHEM 123")} <= pairs


@pytest.mark.parametrize("titles", [("Intro", "Survey"), ("Lab A", "Lab B")])
def test_unresolvable_corequisite(titles):
    cat = Catalog((rec("A 1", titles[0], coreqs=["B 1"]), rec("B 1", titles[1])))
    with pytest.raises(UnresolvedCorequisiteError) as exc:
        build_cpn(cat, BuildPolicy("directed"))
    assert exc.value.pair == (CourseCode("A", "1"), CourseCode("B", "1"))


def test_custom_lab_markers():
    cat = Catalog((rec("A 1", "Theory", coreqs=["B 1"]), rec("B 1", "Practicum")))
    cpn, _ = build_cpn(cat, BuildPolicy("directed", lab_title_markers=("practicum",)))
    assert arc_map(cpn) == {("A 1", "B 1"): 1.0}
    with pytest.raises(ValueError):
        BuildPolicy("directed", lab_title_markers=())


def test_cpn_invariants_enforced():
    from oracles import make_cpn

    with pytest.raises(ValueError):
        CpnArc(1, 1)
    with pytest.raises(ValueError):
        CpnArc(0, 1, 1.5)
    with pytest.raises(ValueError):
        make_cpn(2, [(0, 1), (0, 1)])
    with pytest.raises(ValueError):
        make_cpn(2, [(0, 5)])


def random_catalog(rng):
    n = rng.randint(1, 15)
    codes = [f"C {i}" for i in range(n)]
    records = []
    for i, code in enumerate(codes):
        pool = codes[:i]
        rng.shuffle(pool)
        conj = []
        while pool and rng.random() < 0.6:
            m = rng.randint(1, 4)
            conj.append(pool[:m])
            pool = pool[m:]
        records.append(rec(code, prereqs=conj))
    return Catalog(tuple(records))


def test_node_and_arc_counts():
    rng = random.Random(7)
    for _ in range(50):
        cat = random_catalog(rng)
        cpn, _ = build_cpn(cat)
        assert len(cpn.nodes) == len(cat)
        pairs = sum(len(g) for r in cat.records for g in r.prerequisites.conjuncts)
        assert len(cpn.arcs) <= pairs
