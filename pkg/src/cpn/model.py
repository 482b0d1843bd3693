"""Catalogue domain types and referential-integrity checks."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

_CODE_RE = re.compile(r"^([A-Za-z]+)\s+(\S+)$")


class MalformedCodeError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class CourseCode:
    subject: str
    number: str

    def __post_init__(self):
        if not self.subject or not re.fullmatch(r"[A-Z]+", self.subject):
            raise MalformedCodeError(f"bad subject {self.subject!r}")
        if not self.number or re.search(r"\s", self.number):
            raise MalformedCodeError(f"bad course number {self.number!r}")

    def __str__(self):
        return f"{self.subject} {self.number}"


def normalize_code(raw: str) -> CourseCode:
    """Parse ``"biol  110"`` style text into a :class:`CourseCode`.

    The subject is uppercased; the number token is kept verbatim so codes
    such as ``200L`` survive.
    """
    text = " ".join(str(raw).split())
    m = _CODE_RE.match(text)
    if not m:
        raise MalformedCodeError(f"malformed course code: {raw!r}")
    return CourseCode(m.group(1).upper(), m.group(2))


def as_code(value) -> CourseCode:
    return value if isinstance(value, CourseCode) else normalize_code(value)


@dataclass(frozen=True)
class OrGroup:
    alternatives: tuple[CourseCode, ...]

    def __post_init__(self):
        alts = tuple(as_code(a) for a in self.alternatives)
        if not alts:
            raise ValueError("an OR group needs at least one course")
        if len(set(alts)) != len(alts):
            raise ValueError(f"duplicate course in OR group: {', '.join(map(str, alts))}")
        object.__setattr__(self, "alternatives", alts)

    def __len__(self):
        return len(self.alternatives)

    def __iter__(self):
        return iter(self.alternatives)


@dataclass(frozen=True)
class RequirementClause:
    """AND over OR groups. An empty clause means no prerequisites."""

    conjuncts: tuple[OrGroup, ...] = ()

    def __post_init__(self):
        groups = tuple(g if isinstance(g, OrGroup) else OrGroup(tuple(g)) for g in self.conjuncts)
        object.__setattr__(self, "conjuncts", groups)

    @classmethod
    def of(cls, *groups) -> RequirementClause:
        return cls(tuple(OrGroup(tuple(as_code(c) for c in g)) for g in groups))

    def codes(self) -> list[CourseCode]:
        return [c for g in self.conjuncts for c in g.alternatives]

    def __bool__(self):
        return bool(self.conjuncts)


class CoreqMode(str, enum.Enum):
    HARD = "hard"
    SOFT = "soft"


@dataclass(frozen=True)
class CoreqDecl:
    target: CourseCode
    mode: CoreqMode = CoreqMode.HARD

    def __post_init__(self):
        object.__setattr__(self, "target", as_code(self.target))
        object.__setattr__(self, "mode", CoreqMode(self.mode))


@dataclass(frozen=True)
class CourseRecord:
    # Self-references and duplicates are allowed to exist here so that
    # validate_catalog can report them as findings.
    code: CourseCode
    title: str = ""
    prerequisites: RequirementClause = field(default_factory=RequirementClause)
    corequisites: tuple[CoreqDecl, ...] = ()
    cross_listings: tuple[CourseCode, ...] = ()
    soft_rules: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "code", as_code(self.code))
        object.__setattr__(self, "corequisites", tuple(self.corequisites))
        object.__setattr__(self, "cross_listings", tuple(as_code(c) for c in self.cross_listings))
        object.__setattr__(self, "soft_rules", tuple(self.soft_rules))


@dataclass(frozen=True)
class Catalog:
    records: tuple[CourseRecord, ...] = ()
    source_label: str = ""
    # department headings seen by the text parser: (label, codes under it)
    sections: tuple[tuple[str, tuple[CourseCode, ...]], ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))

    def __len__(self):
        return len(self.records)

    def codes(self) -> list[CourseCode]:
        return [r.code for r in self.records]

    def by_code(self) -> dict[CourseCode, CourseRecord]:
        out = {}
        for r in self.records:
            out.setdefault(r.code, r)
        return out


class Severity(str, enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Finding:
    severity: Severity
    code: CourseCode
    message: str

    def __str__(self):
        return f"{self.severity.value}: {self.code}: {self.message}"


def validate_catalog(catalog: Catalog) -> list[Finding]:
    """Check a catalogue for duplicate codes, self references and dangling references.

    Findings are returned in record order. A clean catalogue yields ``[]``.
    """
    findings = []
    seen = set()
    known = {r.code for r in catalog.records}
    for rec in catalog.records:
        if rec.code in seen:
            findings.append(Finding(Severity.ERROR, rec.code, "duplicate course code"))
        seen.add(rec.code)

        refs = [("prerequisite", c) for c in rec.prerequisites.codes()]
        refs += [("corequisite", d.target) for d in rec.corequisites]
        refs += [("cross-listing", c) for c in rec.cross_listings]
        if len(set(rec.cross_listings)) != len(rec.cross_listings):
            findings.append(Finding(Severity.ERROR, rec.code, "duplicate cross-listing"))
        for kind, ref in refs:
            if ref == rec.code:
                findings.append(Finding(Severity.ERROR, rec.code, f"course names itself as {kind}"))
            elif ref not in known:
                findings.append(
                    Finding(Severity.WARNING, rec.code, f"dangling {kind} reference {ref}")
                )
    return findings


def has_errors(findings) -> bool:
    return any(f.severity == Severity.ERROR for f in findings)
