import json

import pytest
from hypothesis import given, settings, strategies as st

from cpn.model import Catalog, CoreqDecl, CoreqMode, CourseCode, CourseRecord, RequirementClause, Severity
from cpn.parser import (
    CatalogParseError,
    ClauseSyntaxError,
    SchemaError,
    load_catalog,
    parse_catalog_structured,
    parse_catalog_text,
    parse_clause,
    serialize_catalog_structured,
)


def groups(clause):
    return [[str(c) for c in g] for g in clause.conjuncts]


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("CHEM 100 or CHEM 102", [["CHEM 100", "CHEM 102"]]),
        ("BIOL 200 and either BIOL 310 or CHEM 310", [["BIOL 200"], ["BIOL 310", "CHEM 310"]]),
        ("BIOL 200 Genetics", [["BIOL 200"]]),
        ("BIOL 200 Genetics and CHEM 100 General Chemistry", [["BIOL 200"], ["CHEM 100"]]),
        ("A 1 or B 2 or C 3", [["A 1", "B 2", "C 3"]]),
        ("either a 1 or b 2 or c 3 and D 4", [["A 1", "B 2", "C 3"], ["D 4"]]),
        ("BIOL 200.", [["BIOL 200"]]),
    ],
)
def test_parse_clause(raw, expected):
    assert groups(parse_clause(raw)) == expected


@pytest.mark.parametrize(
    "raw",
    [
        "either BIOL 110 or either CHEM 100 or CHEM 102",
        "BIOL 110 and",
        "and BIOL 110",
        "BIOL 110 or",
        "either BIOL 110",
        "Junior standing",
        "",
        "BIOL 110 CHEM 100",
        "BIOL 110 or BIOL 110",
    ],
)
def test_parse_clause_errors(raw):
    with pytest.raises(ClauseSyntaxError):
        parse_clause(raw)


@given(st.lists(st.lists(st.integers(100, 999), min_size=1, max_size=4, unique=True), min_size=1, max_size=4))
def test_clause_order_preserved(spec):
    raw = " and ".join(
        ("either " if len(g) > 1 else "") + " or ".join(f"BIOL {n} Some Title" for n in g) for g in spec
    )
    clause = parse_clause(raw)
    assert [c.number for c in clause.codes()] == [str(n) for g in spec for n in g]


def test_sample_text(sample_text):
    catalog, diags = parse_catalog_text(sample_text)
    assert len(catalog) == 11
    subjects = [r.code.subject for r in catalog.records]
    assert subjects.count("BIOL") == 7 and subjects.count("CHEM") == 4
    rec = catalog.by_code()[CourseCode("BIOL", "320")]
    assert groups(rec.prerequisites) == [["BIOL 200"], ["BIOL 310", "CHEM 310"]]
    assert not [d for d in diags if d.severity is Severity.ERROR]
    assert [s[0] for s in catalog.sections] == ["Course Catalog", "Biology", "Chemistry"]
    assert catalog.by_code()[CourseCode("CHEM", "310")].cross_listings == (CourseCode("BIOL", "310"),)


def test_empty_text():
    catalog, diags = parse_catalog_text("")
    assert len(catalog) == 0 and diags == []


def test_single_heading():
    catalog, diags = parse_catalog_text("BIOL 100 Non-majors Biology")
    (rec,) = catalog.records
    assert rec.title == "Non-majors Biology"
    assert not rec.prerequisites and rec.corequisites == ()
    assert diags == []


def test_attribute_before_heading_is_fatal():
    with pytest.raises(CatalogParseError) as exc:
        parse_catalog_text("# comment\nPrerequisites: BIOL 110\nBIOL 200 Genetics")
    assert exc.value.line == 2


def test_duplicate_heading_is_fatal():
    with pytest.raises(CatalogParseError, match="duplicate"):
        parse_catalog_text("BIOL 110 A\nbiol 110 B")


def test_soft_rules_recorded_with_warning():
    text = "BIOL 400 Seminar\n  Prerequisites: Junior or Senior standing and BIOL 200\n"
    catalog, diags = parse_catalog_text(text)
    (rec,) = catalog.records
    assert rec.soft_rules == ("Junior or Senior standing",)
    assert groups(rec.prerequisites) == [["BIOL 200"]]
    assert [d.severity for d in diags] == [Severity.WARNING]
    assert diags[0].line == 2


def test_corequisite_modes():
    text = (
        "CHEM 123 General Chemistry II\n"
        "  Corequisites: coregistration in CHEM 124\n"
        "CHEM 124 General Chemistry II Lab\n"
        "  Corequisites: credit or coregistration in CHEM 123\n"
        "CHEM 125 Other\n"
        "  Corequisites: CHEM 124\n"
    )
    catalog, _ = parse_catalog_text(text)
    modes = [r.corequisites[0].mode for r in catalog.records]
    assert modes == [CoreqMode.HARD, CoreqMode.SOFT, CoreqMode.HARD]


def test_unrecognized_line_warns():
    catalog, diags = parse_catalog_text("BIOL 110 General Biology\n  Lorem ipsum 42 dolor.\n")
    assert len(catalog) == 1
    assert diags[0].line == 2 and diags[0].severity is Severity.WARNING


def test_parse_deterministic(sample_text):
    assert parse_catalog_text(sample_text) == parse_catalog_text(sample_text)


# ---------------------------------------------------------------- structured

def test_structured_matches_text(sample_catalog):
    doc = {
        "source_label": "",
        "records": [
            {"code": "BIOL 100", "title": "Non-majors Biology"},
            {"code": "BIOL 110", "title": "General Biology", "prerequisites": [["CHEM 100"]]},
            {"code": "BIOL 111", "title": "General Biology Laboratory", "prerequisites": [["BIOL 110"]]},
            {"code": "BIOL 200", "title": "Genetics", "prerequisites": [["BIOL 110"]]},
            {"code": "BIOL 201", "title": "Genetics Laboratory", "prerequisites": [["BIOL 200"]]},
            {"code": "BIOL 310", "title": "Biochemistry", "prerequisites": [["CHEM 200"]], "cross_listings": ["CHEM 310"]},
            {"code": "BIOL 320", "title": "Cell Biology", "prerequisites": [["BIOL 200"], ["BIOL 310", "CHEM 310"]]},
            {"code": "CHEM 100", "title": "General Chemistry"},
            {"code": "CHEM 102", "title": "Honors General Chemistry"},
            {"code": "CHEM 200", "title": "Organic Chemistry", "prerequisites": [["CHEM 100", "CHEM 102"]]},
            {"code": "CHEM 310", "title": "Biochemistry", "prerequisites": [["CHEM 200"]], "cross_listings": ["BIOL 310"]},
        ],
    }
    catalog, diags = parse_catalog_structured(json.dumps(doc).encode())
    assert diags == []
    assert catalog == sample_catalog
    for a, b in zip(catalog.records, sample_catalog.records):
        assert a == b


def test_structured_missing_code():
    with pytest.raises(SchemaError, match=r"records\[1\]\.code"):
        parse_catalog_structured(b'{"records": [{"code": "A 1"}, {"title": "x"}]}')


@pytest.mark.parametrize(
    "doc, where",
    [
        ({"records": [{"code": "A 1", "prerequisites": "A 2"}]}, "prerequisites"),
        ({"records": [{"code": "A 1", "prerequisites": [[]]}]}, "prerequisites[0]"),
        ({"records": [{"code": "A 1", "corequisites": [{"target": "B 1", "mode": "x"}]}]}, "mode"),
        ({"records": [{"code": "A 1"}, {"code": "a 1"}]}, "duplicate"),
        ({"records": [{"code": "nonsense"}]}, "code"),
        ({}, "records"),
    ],
)
def test_structured_schema_errors(doc, where):
    with pytest.raises(SchemaError, match=where.replace("[", r"\[").replace("]", r"\]")):
        parse_catalog_structured(json.dumps(doc).encode())


def test_structured_empty():
    catalog, diags = parse_catalog_structured(b'{"source_label": "2009-2010", "records": []}')
    assert len(catalog) == 0 and catalog.source_label == "2009-2010"
    assert json.loads(serialize_catalog_structured(Catalog())) == {"source_label": "", "records": []}


def test_structured_field_names_are_exact():
    rec = CourseRecord("BIOL 400", "Seminar", RequirementClause.of(["BIOL 200"]),
                       (CoreqDecl("BIOL 401", "soft"),), ("HON 400",), ("Junior or Senior standing",))
    doc = json.loads(serialize_catalog_structured(Catalog((rec,), "2009-2010")))
    assert list(doc) == ["source_label", "records"]
    assert doc["records"][0] == {
        "code": "BIOL 400",
        "title": "Seminar",
        "prerequisites": [["BIOL 200"]],
        "corequisites": [{"target": "BIOL 401", "mode": "soft"}],
        "cross_listings": ["HON 400"],
        "soft_rules": ["Junior or Senior standing"],
    }


def test_round_trip_sample(sample_catalog):
    again, _ = parse_catalog_structured(serialize_catalog_structured(sample_catalog))
    assert again == sample_catalog


codes = st.builds(lambda s, n: CourseCode(s, str(n)), st.sampled_from(["BIOL", "CHEM", "MATH", "CIS"]), st.integers(100, 130))


@st.composite
def catalogs(draw):
    own = draw(st.lists(codes, unique=True, max_size=8))
    pool = own + [CourseCode("EXT", "1")]
    records = []
    for code in own:
        nconj = draw(st.integers(0, 3))
        conj = [tuple(draw(st.lists(st.sampled_from(pool), min_size=1, max_size=4, unique=True))) for _ in range(nconj)]
        coreqs = tuple(CoreqDecl(t, m) for t, m in draw(st.lists(st.tuples(st.sampled_from(pool), st.sampled_from(["hard", "soft"])), max_size=2)))
        xl = tuple(draw(st.lists(st.sampled_from([c for c in pool if c != code]), unique=True, max_size=2))) if len(pool) > 1 else ()
        records.append(CourseRecord(code, draw(st.text(max_size=20)), RequirementClause(tuple(conj)), coreqs, xl,
                                    tuple(draw(st.lists(st.text(max_size=15), max_size=2)))))
    return Catalog(tuple(records), draw(st.text(max_size=10)))


@settings(max_examples=100, deadline=None)
@given(catalogs())
def test_round_trip_random(catalog):
    data = serialize_catalog_structured(catalog)
    again, _ = parse_catalog_structured(data)
    assert again == catalog
    assert serialize_catalog_structured(again) == data


def test_load_catalog_auto(sample_text, sample_catalog):
    assert load_catalog(sample_text.encode())[0] == sample_catalog
    data = serialize_catalog_structured(sample_catalog)
    assert load_catalog(data)[0] == sample_catalog
    with pytest.raises(SchemaError):
        load_catalog(b"{}", "structured")
