"""TOML descriptions of bases, elements, monoids and pairing tables.

Example::

    [base]
    name = "Q(sqrt-5)"
    pic = [2]
    unit_rank = 0
    unit_torsion = 2

    [[places]]
    name = "p2"
    pic_class = [1]

    [log]
    support = ["p2"]

    [[elements]]
    name = "2"
    valuation = { p2 = 2 }

    [[monoids]]
    name = "N2"
    generators = [[1, 0], [0, 1]]

    [[morphisms]]
    name = "square"
    source = "N2"
    target = "N2"
    matrix = [[2, 0], [0, 2]]

    [pairing]
    phi = [2]
    phi_prime = [2]
    table = [["1/2"]]
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .dedekind import DedekindLogBase, FactoredK, NotPrincipalError, validate_base
from .lattice import FiniteAbelianGroup, IntMatrix, QmodZ
from .monoid import AffineMonoid, MonoidMorphism
from .monodromy import MonodromyData, PairingError

CONFIG_DIR_ENV = "LOGKUMMER_CONFIG_DIR"


@dataclass
class ConfigIssue:
    field: str
    message: str
    line: int | None = None

    def __str__(self):
        loc = f"line {self.line}, " if self.line else ""
        return f"{loc}{self.field}: {self.message}"


class ConfigError(ValueError):
    def __init__(self, issues: list[ConfigIssue], path: str | None = None):
        self.issues = issues
        self.path = path
        prefix = f"{path}: " if path else ""
        super().__init__(prefix + "; ".join(str(i) for i in issues))


@dataclass
class ConfigDocument:
    path: str | None = None
    base: DedekindLogBase | None = None
    elements: dict[str, FactoredK] = field(default_factory=dict)
    monoids: dict[str, AffineMonoid] = field(default_factory=dict)
    morphisms: dict[str, MonoidMorphism] = field(default_factory=dict)
    pairing: MonodromyData | None = None


def resolve_path(path: str | os.PathLike) -> Path:
    p = Path(path)
    if p.exists() or p.is_absolute():
        return p
    default_dir = os.environ.get(CONFIG_DIR_ENV)
    if default_dir and (Path(default_dir) / p).exists():
        return Path(default_dir) / p
    return p


class _Locator:
    """Best-effort line numbers for table entries of a TOML file."""

    def __init__(self, text: str):
        self.lines = text.splitlines()

    def header(self, name: str, index: int | None = None) -> int | None:
        pat = re.compile(r"^\s*\[\[\s*" + re.escape(name) + r"\s*\]\]" if index is not None else r"^\s*\[\s*" + re.escape(name) + r"\s*\]")
        k = -1
        for i, line in enumerate(self.lines, start=1):
            if pat.match(line):
                k += 1
                if index is None or k == index:
                    return i
        return None

    def key(self, section: str, key: str, index: int | None = None) -> int | None:
        start = self.header(section, index)
        if start is None:
            return None
        pat = re.compile(r"^\s*" + re.escape(key) + r"\s*=")
        for i in range(start, len(self.lines)):
            line = self.lines[i]
            if re.match(r"^\s*\[", line):
                break
            if pat.match(line):
                return i + 1
        return start


def parse_config(path: str | os.PathLike) -> ConfigDocument:
    p = resolve_path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError([ConfigIssue("<file>", str(exc))], str(p)) from None
    return parse_config_text(text, str(p))


def _int_list(value: Any, where: str, issues: list[ConfigIssue], line: int | None) -> list[int] | None:
    if not isinstance(value, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in value):
        issues.append(ConfigIssue(where, f"expected a list of integers, got {value!r}", line))
        return None
    return value


def parse_config_text(text: str, path: str | None = None) -> ConfigDocument:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        line = int(m.group(1)) if m else max(1, len(text.splitlines()))  # "at end of document"
        raise ConfigError([ConfigIssue("<syntax>", str(exc), line)], path) from None
    loc = _Locator(text)
    issues: list[ConfigIssue] = []
    doc = ConfigDocument(path=path)

    if "base" in raw:
        doc.base = _parse_base(raw, loc, issues)
        if doc.base is not None:
            doc.elements = _parse_elements(raw, doc.base, loc, issues)
    elif "elements" in raw or "places" in raw:
        issues.append(ConfigIssue("base", "places/elements given without a [base] section", loc.header("places", 0)))

    doc.monoids = _parse_monoids(raw, loc, issues)
    doc.morphisms = _parse_morphisms(raw, doc.monoids, loc, issues)
    if "pairing" in raw:
        doc.pairing = _parse_pairing(raw["pairing"], loc, issues)

    if issues:
        raise ConfigError(issues, path)
    return doc


def _parse_base(raw, loc: _Locator, issues) -> DedekindLogBase | None:
    base = raw["base"]
    before = len(issues)
    pic = _int_list(base.get("pic", []), "base.pic", issues, loc.key("base", "pic"))
    unit_rank = base.get("unit_rank", 0)
    unit_torsion = base.get("unit_torsion", 1)
    for key, val in (("unit_rank", unit_rank), ("unit_torsion", unit_torsion)):
        if not isinstance(val, int):
            issues.append(ConfigIssue(f"base.{key}", f"expected an integer, got {val!r}", loc.key("base", key)))
    places, classes = [], []
    for i, rec in enumerate(raw.get("places", [])):
        line = loc.header("places", i)
        name = rec.get("name")
        if not isinstance(name, str):
            issues.append(ConfigIssue(f"places[{i}].name", "missing or not a string", line))
            continue
        c = _int_list(rec.get("pic_class", []), f"places[{i}].pic_class", issues, loc.key("places", "pic_class", i))
        places.append(str(name))
        classes.append(tuple(c or ()))
    support = raw.get("log", {}).get("support", [])
    if not isinstance(support, list):
        issues.append(ConfigIssue("log.support", "expected a list of place names", loc.key("log", "support")))
        support = []
    if len(issues) > before:
        return None
    b = DedekindLogBase(
        name=str(base.get("name", "base")),
        pic_factors=tuple(pic or ()),
        places=tuple(places),
        place_classes=tuple(classes),
        unit_rank=unit_rank,
        unit_torsion=unit_torsion,
        log_support=tuple(str(s) for s in support),
    )
    for err in validate_base(b):
        fld, _, msg = err.partition(": ")
        line = None
        m = re.match(r"places\.(.+?)\.", fld)
        if m and m.group(1) in places:
            idx = places.index(m.group(1))
            line = loc.key("places", "pic_class", idx)
            fld = f"places[{idx}].pic_class"
        elif fld.startswith("base."):
            line = loc.key("base", fld.split(".", 1)[1])
        elif fld == "pic":
            line = loc.key("base", "pic")
            fld = "base.pic"
        elif fld.startswith("log"):
            line = loc.key("log", "support")
        issues.append(ConfigIssue(fld, msg, line))
    return None if len(issues) > before else b


def _parse_elements(raw, b: DedekindLogBase, loc: _Locator, issues) -> dict[str, FactoredK]:
    out = {}
    for i, rec in enumerate(raw.get("elements", [])):
        line = loc.header("elements", i)
        name = rec.get("name")
        if not isinstance(name, str):
            issues.append(ConfigIssue(f"elements[{i}].name", "missing or not a string", line))
            continue
        val = rec.get("valuation", {})
        if not isinstance(val, dict) or not all(isinstance(v, int) for v in val.values()):
            issues.append(ConfigIssue(f"elements[{i}].valuation", "expected a table place = integer", line))
            continue
        unknown = [p for p in val if p not in b.places]
        if unknown:
            issues.append(ConfigIssue(f"elements[{i}].valuation", f"unknown places {unknown}", loc.key("elements", "valuation", i)))
            continue
        try:
            out[name] = b.element(val, rec.get("unit_torsion", 0), rec.get("unit_free", ()))
        except NotPrincipalError as exc:
            issues.append(ConfigIssue(f"elements[{i}].valuation", str(exc), loc.key("elements", "valuation", i)))
        except ValueError as exc:
            issues.append(ConfigIssue(f"elements[{i}]", str(exc), line))
    return out


def _parse_monoids(raw, loc: _Locator, issues) -> dict[str, AffineMonoid]:
    out = {}
    for i, rec in enumerate(raw.get("monoids", [])):
        line = loc.key("monoids", "generators", i)
        gens = rec.get("generators")
        ok = isinstance(gens, list) and gens and all(
            isinstance(g, list) and all(isinstance(x, int) for x in g) for g in gens
        )
        if not ok:
            issues.append(ConfigIssue(f"monoids[{i}].generators", "expected a nonempty list of integer vectors", line))
            continue
        try:
            out[str(rec.get("name", f"M{i}"))] = AffineMonoid(gens, rec.get("ambient_rank"))
        except ValueError as exc:
            issues.append(ConfigIssue(f"monoids[{i}].generators", str(exc), line))
    return out


def _parse_morphisms(raw, monoids, loc: _Locator, issues) -> dict[str, MonoidMorphism]:
    out = {}
    for i, rec in enumerate(raw.get("morphisms", [])):
        line = loc.header("morphisms", i)
        src, tgt = rec.get("source"), rec.get("target")
        missing = [k for k, v in (("source", src), ("target", tgt)) if v not in monoids]
        if missing:
            issues.append(ConfigIssue(f"morphisms[{i}]", f"unknown monoid for {missing}", line))
            continue
        mat = rec.get("matrix")
        try:
            out[str(rec.get("name", f"u{i}"))] = MonoidMorphism(monoids[src], monoids[tgt], IntMatrix(mat))
        except (ValueError, TypeError) as exc:
            issues.append(ConfigIssue(f"morphisms[{i}].matrix", str(exc), loc.key("morphisms", "matrix", i)))
    return out


def _parse_pairing(rec, loc: _Locator, issues) -> MonodromyData | None:
    try:
        phi = FiniteAbelianGroup(tuple(rec.get("phi", [])))
        phi_prime = FiniteAbelianGroup(tuple(rec.get("phi_prime", [])))
    except (ValueError, TypeError) as exc:
        issues.append(ConfigIssue("pairing.phi", str(exc), loc.key("pairing", "phi")))
        return None
    try:
        table = [[QmodZ(Fraction(str(q))) for q in row] for row in rec.get("table", [])]
        return MonodromyData(phi, phi_prime, tuple(tuple(r) for r in table))
    except (ValueError, ZeroDivisionError, PairingError, TypeError) as exc:
        issues.append(ConfigIssue("pairing.table", str(exc), loc.key("pairing", "table")))
        return None
