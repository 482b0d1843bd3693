"""Readers and writers for catalogue documents.

Two formats are supported. The text format is line oriented::

    Biology
    BIOL 110 General Biology
      Prerequisites: CHEM 100
    BIOL 320 Cell Biology
      Prerequisites: BIOL 200 and either
      BIOL 310 or CHEM 310

A heading line is ``SUBJ NUM Title``. Attribute lines start with
``Prerequisites:``, ``Corequisites:`` or ``Cross-listings:`` and attach to the
most recent heading. An attribute value that ends in a connective (``and``,
``or``, ``either``) continues on the next line. ``#`` starts a comment line.

The structured format is a JSON document::

    {"source_label": "...", "records": [{"code": ..., "title": ...,
      "prerequisites": [["A 1", "B 2"], ...],
      "corequisites": [{"target": ..., "mode": "hard"|"soft"}],
      "cross_listings": [...], "soft_rules": [...]}]}
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .model import (
    Catalog,
    CoreqDecl,
    CoreqMode,
    CourseRecord,
    MalformedCodeError,
    OrGroup,
    RequirementClause,
    Severity,
    normalize_code,
)

__all__ = [
    "CatalogParseError",
    "ClauseSyntaxError",
    "ParseDiagnostic",
    "SchemaError",
    "load_catalog",
    "parse_catalog_structured",
    "parse_catalog_text",
    "parse_clause",
    "serialize_catalog_structured",
]


class CatalogParseError(ValueError):
    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ClauseSyntaxError(ValueError):
    pass


class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class ParseDiagnostic:
    line: int
    severity: Severity
    message: str

    def __str__(self):
        return f"line {self.line}: {self.severity.value}: {self.message}"


# ---------------------------------------------------------------- clauses

_TOKEN_RE = re.compile(
    r"(?P<code>\b(?!(?i:and|or|either)\b)[A-Za-z]+\s+\d[0-9A-Za-z]*\b)"
    r"|(?P<word>[A-Za-z0-9][\w'&-]*)"
    r"|(?P<punct>[^\s\w])"
)
_CONNECTIVES = {"and", "or", "either"}


def _tokens(raw):
    for m in _TOKEN_RE.finditer(raw):
        kind = m.lastgroup
        text = m.group(kind)
        if kind == "word" and text.lower() in _CONNECTIVES:
            yield text.lower(), text, m.start()
        else:
            yield kind, text, m.start()


def _split_conjuncts(raw):
    """Split on top-level ``and``; yields (tokens, alternative token lists, has_either)."""
    conjuncts = [[]]
    for tok in _tokens(raw):
        if tok[0] == "and":
            conjuncts.append([])
        else:
            conjuncts[-1].append(tok)
    for toks in conjuncts:
        either = False
        if toks and toks[0][0] == "either":
            either = True
            toks = toks[1:]
        alts = [[]]
        for tok in toks:
            if tok[0] == "or":
                alts.append([])
            else:
                alts[-1].append(tok)
        yield toks, alts, either


def _conjunct_text(raw, toks):
    if not toks:
        return ""
    start = toks[0][2]
    last = toks[-1]
    return raw[start:last[2] + len(last[1])].strip()


def _parse_clause(raw, *, tolerate_soft):
    """Shared clause grammar. Returns (clause, soft fragments)."""
    groups = []
    soft = []
    split = list(_split_conjuncts(raw))
    if len(split) > 1 and any(not toks for toks, _, _ in split):
        raise ClauseSyntaxError(f"dangling 'and' in {raw!r}")
    for toks, alts, either in split:
        if not toks:
            if either:
                raise ClauseSyntaxError(f"'either' without alternatives in {raw!r}")
            continue
        if any(t[0] == "either" for t in toks):
            raise ClauseSyntaxError(f"nested 'either' in {raw!r}")
        if either and len(alts) < 2:
            raise ClauseSyntaxError(f"'either' needs an 'or' in {raw!r}")
        codes = []
        loose = []
        for alt in alts:
            alt_codes = [t for t in alt if t[0] == "code"]
            if len(alt_codes) > 1:
                raise ClauseSyntaxError(
                    f"missing connective between {alt_codes[0][1]!r} and {alt_codes[1][1]!r}"
                )
            if not alt_codes:
                if not alt:
                    raise ClauseSyntaxError(f"empty alternative around 'or' in {raw!r}")
                loose.append(_conjunct_text(raw, alt))
                continue
            # title words after the code are ignored; words before it are not a code
            if alt[0][0] != "code" and not tolerate_soft:
                raise ClauseSyntaxError(f"unexpected text before {alt_codes[0][1]!r} in {raw!r}")
            codes.append(normalize_code(alt_codes[0][1]))
        if loose and not tolerate_soft:
            raise ClauseSyntaxError(f"no course code in {loose[0]!r}")
        if loose:
            soft.append(_conjunct_text(raw, toks))
        if codes:
            try:
                groups.append(OrGroup(tuple(codes)))
            except ValueError as exc:
                raise ClauseSyntaxError(str(exc)) from None
    if not groups and not tolerate_soft:
        raise ClauseSyntaxError(f"no course codes in {raw!r}")
    return RequirementClause(tuple(groups)), soft


def parse_clause(raw: str) -> RequirementClause:
    """Parse ``"BIOL 200 and either BIOL 310 or CHEM 310"`` into AND-of-OR groups.

    Text following a code up to the next connective is treated as a course
    title and dropped. Raises :class:`ClauseSyntaxError` on nested
    ``either``, dangling connectives, or a clause without any course code.
    """
    clause, _ = _parse_clause(raw, tolerate_soft=False)
    return clause


# ------------------------------------------------------------- text format

_HEADING_RE = re.compile(r"^([A-Za-z]+)\s+(\d[0-9A-Za-z]*)(?:\s+(.*))?$")
_ATTR_RE = re.compile(
    r"^(prerequisites?|corequisites?|cross[- ]?listings?)\s*:\s*(.*)$", re.IGNORECASE
)
_SECTION_RE = re.compile(r"^[A-Za-z][A-Za-z &,'-]*$")
_CODE_IN_TEXT_RE = re.compile(r"\b(?!(?:and|or|in)\b)[A-Za-z]+\s+\d[0-9A-Za-z]*\b", re.IGNORECASE)
_SOFT_COREQ_RE = re.compile(r"credit\s+or\s+co-?registration", re.IGNORECASE)
_HARD_COREQ_RE = re.compile(r"co-?registration", re.IGNORECASE)
_NONE_VALUES = {"", "none", "none.", "n/a"}


class _Entry:
    def __init__(self, code, title, line):
        self.code = code
        self.title = title
        self.line = line
        self.groups = []
        self.coreqs = []
        self.xlist = []
        self.soft = []

    def record(self):
        return CourseRecord(
            code=self.code,
            title=self.title,
            prerequisites=RequirementClause(tuple(self.groups)),
            corequisites=tuple(self.coreqs),
            cross_listings=tuple(self.xlist),
            soft_rules=tuple(self.soft),
        )


def _ends_with_connective(value):
    words = value.rstrip(" ,;").split()
    return bool(words) and words[-1].lower() in _CONNECTIVES


def _logical_lines(text):
    """Yield (line number, stripped text, is_attribute), joining continuations."""
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        lineno = i + 1
        stripped = lines[i].strip()
        i += 1
        if not stripped or stripped.startswith("#"):
            continue
        if _ATTR_RE.match(stripped):
            while _ends_with_connective(stripped) and i < len(lines):
                nxt = lines[i].strip()
                if not nxt or nxt.startswith("#") or _ATTR_RE.match(nxt):
                    break
                stripped = f"{stripped} {nxt}"
                i += 1
            yield lineno, stripped, True
        else:
            yield lineno, stripped, False


def _parse_coreqs(value, entry, lineno, diags):
    matches = list(_CODE_IN_TEXT_RE.finditer(value))
    if not matches:
        entry.soft.append(value)
        diags.append(ParseDiagnostic(lineno, Severity.WARNING, f"corequisite without course code kept as soft rule: {value!r}"))
        return
    mode = CoreqMode.HARD
    prev_end = 0
    for m in matches:
        lead = value[prev_end:m.start()]
        if _SOFT_COREQ_RE.search(lead):
            mode = CoreqMode.SOFT
        elif _HARD_COREQ_RE.search(lead):
            mode = CoreqMode.HARD
        prev_end = m.end()
        code = normalize_code(m.group(0))
        if any(d.target == code for d in entry.coreqs):
            diags.append(ParseDiagnostic(lineno, Severity.WARNING, f"repeated corequisite {code}"))
            continue
        entry.coreqs.append(CoreqDecl(code, mode))


def _parse_xlist(value, entry, lineno, diags):
    codes = [normalize_code(m.group(0)) for m in _CODE_IN_TEXT_RE.finditer(value)]
    if not codes:
        diags.append(ParseDiagnostic(lineno, Severity.WARNING, f"cross-listing without course code: {value!r}"))
    for code in codes:
        if code == entry.code or code in entry.xlist:
            diags.append(ParseDiagnostic(lineno, Severity.WARNING, f"ignored cross-listing {code}"))
            continue
        entry.xlist.append(code)


def _parse_prereqs(value, entry, lineno, diags):
    try:
        clause, soft = _parse_clause(value, tolerate_soft=True)
    except (ClauseSyntaxError, MalformedCodeError) as exc:
        raise CatalogParseError(lineno, str(exc)) from None
    for fragment in soft:
        entry.soft.append(fragment)
        diags.append(ParseDiagnostic(lineno, Severity.WARNING, f"soft rule recorded, not graphed: {fragment!r}"))
    for group in clause.conjuncts:
        if group not in entry.groups:
            entry.groups.append(group)


def parse_catalog_text(text: str, source_label: str = ""):
    """Parse the line-oriented catalogue format.

    Returns ``(Catalog, diagnostics)``. Raises :class:`CatalogParseError` when
    an attribute line precedes every course heading, when a course code is
    repeated, or when a prerequisite clause is malformed.
    """
    entries = []
    seen = {}
    diags = []
    sections = []
    current = None
    for lineno, line, is_attr in _logical_lines(text):
        if is_attr:
            if current is None:
                raise CatalogParseError(lineno, "attribute line before any course heading")
            key, value = _ATTR_RE.match(line).groups()
            key = key.lower()
            value = value.strip()
            if value.lower() in _NONE_VALUES:
                continue
            if key.startswith("pre"):
                _parse_prereqs(value, current, lineno, diags)
            elif key.startswith("co"):
                _parse_coreqs(value, current, lineno, diags)
            else:
                _parse_xlist(value, current, lineno, diags)
            continue

        m = _HEADING_RE.match(line)
        if m:
            code = normalize_code(f"{m.group(1)} {m.group(2)}")
            if code in seen:
                raise CatalogParseError(lineno, f"duplicate course {code} (first on line {seen[code]})")
            seen[code] = lineno
            current = _Entry(code, (m.group(3) or "").strip(), lineno)
            entries.append(current)
            if sections:
                sections[-1][1].append(code)
        elif _SECTION_RE.match(line) and len(line.split()) <= 6:
            sections.append((line, []))
        else:
            diags.append(ParseDiagnostic(lineno, Severity.WARNING, f"skipped unrecognized line: {line!r}"))

    catalog = Catalog(
        records=tuple(e.record() for e in entries),
        source_label=source_label,
        sections=tuple((label, tuple(codes)) for label, codes in sections),
    )
    return catalog, diags


# ------------------------------------------------------- structured format

_RECORD_FIELDS = ("code", "title", "prerequisites", "corequisites", "cross_listings", "soft_rules")


def _require(cond, where, msg):
    if not cond:
        raise SchemaError(f"{where}: {msg}")


def _code_field(value, where):
    _require(isinstance(value, str), where, "expected a course code string")
    try:
        return normalize_code(value)
    except MalformedCodeError as exc:
        raise SchemaError(f"{where}: {exc}") from None


def _str_list(rec, name, where):
    value = rec.get(name, [])
    _require(isinstance(value, list), f"{where}.{name}", "expected a list")
    for i, item in enumerate(value):
        _require(isinstance(item, str), f"{where}.{name}[{i}]", "expected a string")
    return value


def _record_from_json(rec, idx):
    where = f"records[{idx}]"
    _require(isinstance(rec, dict), where, "expected an object")
    _require("code" in rec, f"{where}.code", "missing required field")
    code = _code_field(rec["code"], f"{where}.code")
    where = f"{where} ({code})"
    title = rec.get("title", "")
    _require(isinstance(title, str), f"{where}.title", "expected a string")

    prereqs = rec.get("prerequisites", [])
    _require(isinstance(prereqs, list), f"{where}.prerequisites", "expected a list of lists")
    groups = []
    for gi, group in enumerate(prereqs):
        gwhere = f"{where}.prerequisites[{gi}]"
        _require(isinstance(group, list) and group, gwhere, "expected a nonempty list of codes")
        codes = tuple(_code_field(c, f"{gwhere}") for c in group)
        try:
            groups.append(OrGroup(codes))
        except ValueError as exc:
            raise SchemaError(f"{gwhere}: {exc}") from None

    coreqs = rec.get("corequisites", [])
    _require(isinstance(coreqs, list), f"{where}.corequisites", "expected a list")
    decls = []
    for ci, item in enumerate(coreqs):
        cwhere = f"{where}.corequisites[{ci}]"
        _require(isinstance(item, dict) and "target" in item, cwhere, "expected {target, mode}")
        mode = item.get("mode", "hard")
        _require(mode in ("hard", "soft"), f"{cwhere}.mode", f"invalid mode {mode!r}")
        decls.append(CoreqDecl(_code_field(item["target"], f"{cwhere}.target"), CoreqMode(mode)))

    xlist = [_code_field(c, f"{where}.cross_listings") for c in _str_list(rec, "cross_listings", where)]
    soft = _str_list(rec, "soft_rules", where)
    return CourseRecord(code, title, RequirementClause(tuple(groups)), tuple(decls), tuple(xlist), tuple(soft))


def parse_catalog_structured(data):
    """Read the JSON interchange document. Accepts bytes, str or an already-decoded dict."""
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not a JSON document: {exc}") from None
    _require(isinstance(data, dict), "document", "expected an object")
    _require("records" in data, "records", "missing required field")
    _require(isinstance(data["records"], list), "records", "expected a list")
    label = data.get("source_label", "")
    _require(isinstance(label, str), "source_label", "expected a string")

    diags = []
    records = []
    seen = set()
    for idx, rec in enumerate(data["records"]):
        record = _record_from_json(rec, idx)
        _require(record.code not in seen, f"records[{idx}].code", f"duplicate course {record.code}")
        seen.add(record.code)
        extra = sorted(set(rec) - set(_RECORD_FIELDS))
        if extra:
            # json has no line numbers; report the record position instead
            diags.append(ParseDiagnostic(idx + 1, Severity.WARNING, f"unknown fields ignored: {', '.join(extra)}"))
        records.append(record)
    return Catalog(tuple(records), label), diags


def catalog_to_dict(catalog: Catalog) -> dict:
    return {
        "source_label": catalog.source_label,
        "records": [
            {
                "code": str(r.code),
                "title": r.title,
                "prerequisites": [[str(c) for c in g] for g in r.prerequisites.conjuncts],
                "corequisites": [{"target": str(d.target), "mode": d.mode.value} for d in r.corequisites],
                "cross_listings": [str(c) for c in r.cross_listings],
                "soft_rules": list(r.soft_rules),
            }
            for r in catalog.records
        ],
    }


def serialize_catalog_structured(catalog: Catalog) -> bytes:
    return (json.dumps(catalog_to_dict(catalog), indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def load_catalog(data: bytes, fmt="auto", source_label=""):
    """Parse catalogue bytes as ``text``, ``structured`` or ``auto``-detected."""
    if fmt not in ("auto", "text", "structured"):
        raise ValueError(f"unknown catalogue format {fmt!r}")
    if fmt == "structured":
        return parse_catalog_structured(data)
    if fmt == "auto":
        try:
            doc = json.loads(data.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            doc = None
        if isinstance(doc, dict) and "records" in doc:
            return parse_catalog_structured(doc)
    return parse_catalog_text(data.decode("utf-8"), source_label=source_label)
