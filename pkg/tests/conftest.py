import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cpn import sample_catalog_text  # noqa: E402
from cpn.builder import BuildPolicy, build_cpn  # noqa: E402
from cpn.parser import parse_catalog_text  # noqa: E402

DASHED_EXTRA = {
    "BIOL 100 Non-majors Biology": "BIOL 100 Non-majors Biology\n    Prerequisites: BIOL 110",
    "CHEM 100 General Chemistry": "CHEM 100 General Chemistry\n    Prerequisites: BIOL 100",
}

LECTURE_LAB = """\
Chemistry
CHEM 113 General Chemistry I
  Corequisites: CHEM 114
CHEM 114 General Chemistry I Laboratory
  Corequisites: CHEM 113
CHEM 123 General Chemistry II
  Prerequisites: CHEM 113
  Corequisites: coregistration in CHEM 124
CHEM 124 General Chemistry II Lab
  Prerequisites: CHEM 114
  Corequisites: credit or coregistration in CHEM 123
"""


def dashed_text():
    text = sample_catalog_text()
    for old, new in DASHED_EXTRA.items():
        text = text.replace(old, new)
    return text


@pytest.fixture
def sample_text():
    return sample_catalog_text()


@pytest.fixture
def sample_catalog(sample_text):
    catalog, diags = parse_catalog_text(sample_text)
    return catalog


@pytest.fixture
def sample_cpn(sample_catalog):
    cpn, _ = build_cpn(sample_catalog, BuildPolicy("directed"))
    return cpn


@pytest.fixture
def dashed_cpn():
    cpn, _ = build_cpn(parse_catalog_text(dashed_text())[0], BuildPolicy("directed"))
    return cpn


@pytest.fixture
def lecture_lab_catalog():
    return parse_catalog_text(LECTURE_LAB)[0]


def by_label(cpn, values):
    return {cpn.label(v): x for v, x in values.items()}


def arc_map(cpn):
    return {(cpn.label(a.source), cpn.label(a.target)): a.weight for a in cpn.arcs}
