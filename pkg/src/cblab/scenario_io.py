"""JSON scenario files.

A scenario file is one JSON object::

    {
      "name": "...",                              (optional)
      "field": {"kind": "Q"} | {"kind": "Fp", "p": 101},
      "ambient_dim": n,
      "sections": [{"degree": d, "terms": [{"coeff": "3/2", "exponents": [..]}]}],
      "parametrization": {"dim": w, "degree": e, "equation_degree": k,
                          "components": [{"terms": [...]}, ...]},     (optional)
      "matrix": [[form, ...], ...],               (optional, a determinantal locus)
      "points": [["1", "0", "-1/2"], ...],
      "splits": [[0, 2], ...],                    (optional, Z1 index lists)
      "tasks": [{"kind": "cb" | "tv" | "det" | "koszul", ...}]
    }

Coefficients and coordinates are integers or ``"a/b"`` strings; floats are
rejected so that files stay exact.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Any, Sequence

from .algebra import QQ, ConfigurationError, Field, GF, FpElement, Scalar, scalar_to_str
from .cb import CIScenario, Split
from .detloci import DetScenario, FormMatrix
from .polyring import Form, Parametrization

_RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")
TASK_KINDS = ("cb", "tv", "det", "koszul")


class ScenarioFormatError(ValueError):
    """A scenario file that cannot be read; carries a location."""

    def __init__(self, message: str, where: str | None = None, line: int | None = None,
                 column: int | None = None, source: str | None = None):
        self.message = message
        self.where = where
        self.line = line
        self.column = column
        self.source = source
        super().__init__(str(self))

    def __str__(self) -> str:
        loc = self.source or "<scenario>"
        if self.line is not None:
            loc += f":{self.line}:{self.column}"
        if self.where:
            loc += f": field {self.where}"
        return f"{loc}: {self.message}"


@dataclass
class FileScenario:
    name: str
    field: Field
    n: int
    ci: CIScenario | None
    det: DetScenario | None
    splits: list[Split] = dc_field(default_factory=list)
    tasks: list[dict] = dc_field(default_factory=list)

    @property
    def size(self) -> int:
        return len((self.ci or self.det).points)


def parse_field(spec: Any, where: str = "field") -> Field:
    if isinstance(spec, str):
        return parse_field_name(spec, where)
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ScenarioFormatError('expected {"kind": "Q"} or {"kind": "Fp", "p": <prime>}', where)
    if spec["kind"] == "Q":
        return QQ
    if spec["kind"] == "Fp":
        p = spec.get("p")
        if not isinstance(p, int) or isinstance(p, bool):
            raise ScenarioFormatError("Fp needs an integer \"p\"", f"{where}.p")
        try:
            return GF(p)
        except (ValueError, ConfigurationError) as exc:
            raise ScenarioFormatError(str(exc), f"{where}.p") from None
    raise ScenarioFormatError(f"unknown field kind {spec['kind']!r}", f"{where}.kind")


def parse_field_name(name: str, where: str = "field") -> Field:
    """``"Q"`` or ``"Fp:<p>"``."""
    if name == "Q":
        return QQ
    if name.startswith("Fp:") and name[3:].isdigit():
        return parse_field({"kind": "Fp", "p": int(name[3:])}, where)
    raise ScenarioFormatError(f"bad field {name!r}; expected Q or Fp:<prime>", where)


def parse_scalar(x: Any, field: Field, where: str) -> Scalar:
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise ScenarioFormatError(f"expected an integer or \"a/b\" string, got {x!r}", where)
    if isinstance(x, int):
        q = Fraction(x)
    else:
        m = _RATIONAL.match(x)
        if not m:
            raise ScenarioFormatError(f"not an exact rational: {x!r}", where)
        den = int(m.group(2) or 1)
        if den == 0:
            raise ScenarioFormatError("zero denominator", where)
        q = Fraction(int(m.group(1)), den)
    if field is QQ or field == QQ:
        return q
    if q.denominator % field.p == 0:
        raise ScenarioFormatError(f"denominator of {x!r} vanishes mod {field.p}", where)
    return field(q.numerator) / field(q.denominator)


def _expect(obj: Any, kind: type, where: str):
    if not isinstance(obj, kind) or isinstance(obj, bool):
        raise ScenarioFormatError(f"expected {kind.__name__}", where)
    return obj


def parse_form(obj: Any, nvars: int, field: Field, where: str, degree: int | None = None) -> Form:
    _expect(obj, dict, where)
    if "degree" in obj:
        degree = _expect(obj["degree"], int, f"{where}.degree")
    if degree is None:
        raise ScenarioFormatError("missing \"degree\"", where)
    terms = {}
    for k, term in enumerate(_expect(obj.get("terms", []), list, f"{where}.terms")):
        tw = f"{where}.terms[{k}]"
        _expect(term, dict, tw)
        if "coeff" not in term or "exponents" not in term:
            raise ScenarioFormatError("a term needs \"coeff\" and \"exponents\"", tw)
        exps = _expect(term["exponents"], list, f"{tw}.exponents")
        if len(exps) != nvars or any(not isinstance(e, int) or isinstance(e, bool) or e < 0
                                     for e in exps):
            raise ScenarioFormatError(f"need {nvars} nonnegative integer exponents",
                                      f"{tw}.exponents")
        if sum(exps) != degree:
            raise ScenarioFormatError(f"exponents sum to {sum(exps)}, not {degree}",
                                      f"{tw}.exponents")
        mono = tuple(exps)
        if mono in terms:
            raise ScenarioFormatError(f"repeated monomial {list(mono)}", f"{tw}.exponents")
        terms[mono] = parse_scalar(term["coeff"], field, f"{tw}.coeff")
    return Form(nvars, degree, terms, field)


def parse_point(obj: Any, n: int, field: Field, where: str) -> tuple:
    coords = _expect(obj, list, where)
    if len(coords) != n + 1:
        raise ScenarioFormatError(f"need {n + 1} coordinates", where)
    pt = tuple(parse_scalar(x, field, f"{where}[{k}]") for k, x in enumerate(coords))
    if not any(pt):
        raise ScenarioFormatError("the zero vector is not a projective point", where)
    return pt


def parse_scenario_dict(doc: Any, field: Field | None = None, source: str | None = None
                        ) -> FileScenario:
    """Build (and validate) the scenario described by a decoded JSON document.

    ``field`` overrides the field named in the document.
    """
    try:
        return _parse(doc, field)
    except ScenarioFormatError as exc:
        exc.source = source
        raise


def _parse(doc: Any, override: Field | None) -> FileScenario:
    _expect(doc, dict, "<root>")
    for key in ("field", "ambient_dim", "points"):
        if key not in doc:
            raise ScenarioFormatError(f"missing required field \"{key}\"", key)
    if "sections" not in doc and "matrix" not in doc:
        raise ScenarioFormatError("need \"sections\" or \"matrix\"", "sections")
    field = parse_field(doc["field"])
    if override is not None:
        field = override
    n = _expect(doc["ambient_dim"], int, "ambient_dim")
    if n < 1:
        raise ScenarioFormatError("ambient_dim must be positive", "ambient_dim")
    points = [parse_point(p, n, field, f"points[{k}]")
              for k, p in enumerate(_expect(doc["points"], list, "points"))]
    excess = ()
    if doc.get("parametrization") is not None:
        excess = (_parse_parametrization(doc["parametrization"], field),)
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise ScenarioFormatError("expected a string", "name")
    ci = det = None
    if "sections" in doc:
        sections = [parse_form(f, n + 1, field, f"sections[{k}]")
                    for k, f in enumerate(_expect(doc["sections"], list, "sections"))]
        ci = CIScenario(n, tuple(sections), tuple(points), excess, name=name)
    if "matrix" in doc:
        rows = []
        for i, row in enumerate(_expect(doc["matrix"], list, "matrix")):
            rows.append([parse_form(f, n + 1, field, f"matrix[{i}][{j}]")
                         for j, f in enumerate(_expect(row, list, f"matrix[{i}]"))])
        try:
            matrix = FormMatrix(rows, n, [r[0].degree for r in rows] if rows and rows[0] else None)
        except ValueError as exc:
            raise ScenarioFormatError(str(exc), "matrix") from None
        det = DetScenario(matrix, tuple(points), name=name)
    splits = []
    for k, z1 in enumerate(_expect(doc.get("splits", []), list, "splits")):
        _expect(z1, list, f"splits[{k}]")
        try:
            splits.append(Split.from_z1(z1, len(points)))
        except (ValueError, IndexError, TypeError) as exc:
            raise ScenarioFormatError(str(exc), f"splits[{k}]") from None
    tasks = []
    for k, task in enumerate(_expect(doc.get("tasks", []), list, "tasks")):
        _expect(task, dict, f"tasks[{k}]")
        if task.get("kind") not in TASK_KINDS:
            raise ScenarioFormatError(f"task kind must be one of {list(TASK_KINDS)}",
                                      f"tasks[{k}].kind")
        tasks.append(dict(task))
    return FileScenario(name, field, n, ci, det, splits, tasks)


def _parse_parametrization(obj: Any, field: Field) -> Parametrization:
    where = "parametrization"
    _expect(obj, dict, where)
    for key in ("dim", "degree", "components"):
        if key not in obj:
            raise ScenarioFormatError(f"missing \"{key}\"", where)
    w = _expect(obj["dim"], int, f"{where}.dim")
    e = _expect(obj["degree"], int, f"{where}.degree")
    eq = obj.get("equation_degree")
    if eq is not None:
        _expect(eq, int, f"{where}.equation_degree")
    comps = [parse_form(c, w + 1, field, f"{where}.components[{k}]", degree=e)
             for k, c in enumerate(_expect(obj["components"], list, f"{where}.components"))]
    try:
        return Parametrization(comps, obj.get("name", "W"), equation_degree=eq)
    except ValueError as exc:
        raise ScenarioFormatError(str(exc), where) from None


def load_scenario(text: str, field: Field | None = None, source: str | None = None
                  ) -> FileScenario:
    """Parse scenario text; errors in a field also carry that field's line and column."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(exc.msg, line=exc.lineno, column=exc.colno,
                                  source=source) from None
    try:
        return parse_scenario_dict(doc, field, source)
    except ScenarioFormatError as exc:
        if exc.where and exc.line is None:
            found = locate(text, exc.where)
            if found:
                exc.line, exc.column = found
        raise


_PATH_TOKEN = re.compile(r"([A-Za-z_][A-Za-z_0-9]*)|\[(\d+)\]")
_WS = re.compile(r"\s*")


def locate(text: str, where: str) -> tuple[int, int] | None:
    """Line and column (1-based) of the value at a path like ``sections[0].terms[2]``."""
    tokens: list[str | int] = []
    for m in _PATH_TOKEN.finditer(where):
        tokens.append(m.group(1) if m.group(1) else int(m.group(2)))
    dec = json.JSONDecoder()

    def ws(pos: int) -> int:
        return _WS.match(text, pos).end()

    try:
        pos = ws(0)
        for tok in tokens:
            if isinstance(tok, int):
                if text[pos] != "[":
                    return None
                pos = ws(pos + 1)
                for _ in range(tok):
                    pos = ws(dec.raw_decode(text, pos)[1])
                    if text[pos] != ",":
                        return None
                    pos = ws(pos + 1)
                continue
            if text[pos] != "{":
                return None
            pos = ws(pos + 1)
            while True:
                key, pos = dec.raw_decode(text, pos)
                pos = ws(pos)
                if text[pos] != ":":
                    return None
                pos = ws(pos + 1)
                if key == tok:
                    break
                pos = ws(dec.raw_decode(text, pos)[1])
                if text[pos] != ",":
                    return None
                pos = ws(pos + 1)
    except (IndexError, json.JSONDecodeError):
        return None
    line = text.count("\n", 0, pos) + 1
    return line, pos - (text.rfind("\n", 0, pos) + 1) + 1


# --------------------------------------------------------------------------
# emission


def scalar_json(x: Scalar) -> str:
    return str(x.value) if isinstance(x, FpElement) else scalar_to_str(x)


def form_to_dict(f: Form, with_degree: bool = True) -> dict:
    terms = [{"coeff": scalar_json(c), "exponents": list(m)}
             for m, c in sorted(f.terms.items(), reverse=True)]
    return {"degree": f.degree, "terms": terms} if with_degree else {"terms": terms}


def scenario_to_dict(sc: CIScenario | DetScenario, tasks: Sequence[dict] = (),
                     splits: Sequence[Split] = ()) -> dict:
    """Inverse of :func:`parse_scenario_dict` (up to the validation it performs)."""
    doc: dict[str, Any] = {"name": sc.name, "field": sc.field.spec(), "ambient_dim": sc.n}
    if isinstance(sc, CIScenario):
        doc["sections"] = [form_to_dict(f) for f in sc.sections]
        if sc.excess:
            if len(sc.excess) > 1:
                raise ValueError("the file format holds a single parametrization")
            p = sc.excess[0]
            doc["parametrization"] = {
                "name": p.name, "dim": p.dim, "degree": p.degree,
                "equation_degree": p.equation_degree,
                "components": [form_to_dict(g, with_degree=False) for g in p.components]}
    else:
        doc["matrix"] = [[form_to_dict(f) for f in row] for row in sc.matrix.rows]
    doc["points"] = [[scalar_json(x) for x in p] for p in sc.points]
    if splits:
        doc["splits"] = [list(s.z1) for s in splits]
    doc["tasks"] = [dict(t) for t in tasks]
    return doc
