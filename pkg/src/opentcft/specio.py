"""Algebra-spec JSON documents: parsing into categories and serialization."""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from pathlib import Path

from .ainftycy import DEFAULT_MAX_ARITY, AInftyCategory, Basis, CYStructure
from .exactla import parse_rational

SCHEMA_PATH = Path(__file__).with_name("algebra_spec.schema.json")


class ParseError(ValueError):
    """Malformed document; carries line/column when known."""

    def __init__(self, msg, line=None, column=None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(msg + where)
        self.line, self.column = line, column


class ResolutionError(ValueError):
    pass


def _rat(s, where):
    if isinstance(s, bool):
        raise ParseError(f"{where}: expected a rational, got {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str):
        raise ParseError(f"{where}: rationals must be strings \"p/q\" or integers, got {s!r}")
    try:
        return parse_rational(s)
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(f"{where}: bad rational {s!r}: {e}") from None


def loads(text: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", e.lineno, e.colno) from None


def load_path(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}") from None
    return loads(text)


def validate_schema(doc: dict) -> None:
    import jsonschema

    schema = json.loads(SCHEMA_PATH.read_text())
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as e:
        loc = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ParseError(f"schema violation at {loc}: {e.message}") from None


def _vector(ref, names, where) -> dict:
    """A basis ref "x" or a list of {basis, coeff} terms."""
    if isinstance(ref, str):
        if ref not in names:
            raise ResolutionError(f"{where}: unknown basis element {ref!r}")
        return {ref: Fraction(1)}
    out: dict = {}
    for t in ref:
        b = t["basis"]
        if b not in names:
            raise ResolutionError(f"{where}: unknown basis element {b!r}")
        out[b] = out.get(b, 0) + _rat(t.get("coeff", "1"), where)
    return {k: v for k, v in out.items() if v}


def build(doc: dict) -> tuple[AInftyCategory, CYStructure | None]:
    """Turn a parsed spec into a category and optional CY structure."""
    validate_schema(doc)
    objects = list(doc["objects"])
    if len(set(objects)) != len(objects):
        raise ParseError("duplicate object labels")
    basis = []
    for h in doc["homs"]:
        for a in (h["source"], h["target"]):
            if a not in objects:
                raise ResolutionError(f"hom space refers to unknown object {a!r}")
        for b in h["basis"]:
            basis.append(Basis(b["name"], h["source"], h["target"], int(b["degree"])))
    names = {b.name for b in basis}
    if len(names) != len(basis):
        raise ParseError("duplicate basis names")
    mults: dict[int, dict] = {}

    def add(n, entry, where):
        ins = tuple(entry["inputs"])
        if len(ins) != n:
            raise ParseError(f"{where}: expected {n} inputs, got {len(ins)}")
        for x in ins + (entry["output"],):
            if x not in names:
                raise ResolutionError(f"{where}: unknown basis element {x!r}")
        c = _rat(entry.get("coeff", "1"), where)
        tbl = mults.setdefault(n, {}).setdefault(ins, {})
        tbl[entry["output"]] = tbl.get(entry["output"], 0) + c

    for i, e in enumerate(doc.get("m1", [])):
        add(1, e, f"m1[{i}]")
    for i, e in enumerate(doc.get("m2", [])):
        add(2, e, f"m2[{i}]")
    for i, e in enumerate(doc.get("higher", [])):
        add(int(e["arity"]), e, f"higher[{i}]")
    units = {}
    for a in objects:
        if a not in doc["units"]:
            raise ResolutionError(f"no unit given for object {a!r}")
        units[a] = _vector(doc["units"][a], names, f"units[{a}]")
    cat = AInftyCategory(objects, basis, mults, units, int(doc.get("maxArity", DEFAULT_MAX_ARITY)))
    cy = None
    if "pairing" in doc:
        if "dimension" not in doc:
            raise ParseError("a pairing requires 'dimension'")
        pairing = {}
        for i, e in enumerate(doc["pairing"]):
            for x in (e["left"], e["right"]):
                if x not in names:
                    raise ResolutionError(f"pairing[{i}]: unknown basis element {x!r}")
            pairing[(e["left"], e["right"])] = _rat(e["value"], f"pairing[{i}]")
        cy = CYStructure(cat, int(doc["dimension"]), pairing)
    return cat, cy


def digest(doc: dict) -> str:
    canon = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
