"""Reports and their JSON / CSV / LaTeX renderings.

Every cell is a string, so a report survives a JSON round trip unchanged.
Exact rationals are written ``p/q``; floats only appear in fields that also
carry an error bound.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

from . import __version__

TOOL = "qcoh"
FORMATS = ("json", "csv", "tex")


def frac(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def cell(x) -> str:
    if x is None:
        return "unknown"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, Fraction)):
        return frac(x)
    return str(x)


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[list[str]] = field(default_factory=list)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"table {self.name}: expected {len(self.columns)} cells")
        self.rows.append([cell(v) for v in values])

    def to_dict(self) -> dict:
        return {"name": self.name, "columns": list(self.columns), "rows": [list(r) for r in self.rows]}

    @classmethod
    def from_dict(cls, d: dict) -> "Table":
        return cls(d["name"], list(d["columns"]), [list(r) for r in d["rows"]])


@dataclass
class Report:
    command: dict
    metadata: dict
    tables: list[Table] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)
    status: str = "ok"                     # ok | verification-failure | inconclusive

    def table(self, name: str, columns: Sequence[str]) -> Table:
        t = Table(name, list(columns))
        self.tables.append(t)
        return t

    def to_dict(self) -> dict:
        return {
            "command": dict(self.command),
            "metadata": dict(self.metadata),
            "status": self.status,
            "tables": [t.to_dict() for t in self.tables],
            "diagnostics": list(self.diagnostics),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(dict(d["command"]), dict(d["metadata"]), [Table.from_dict(t) for t in d["tables"]],
                   list(d["diagnostics"]), d["status"])

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))


def input_digest(command: dict, blobs: Iterable[bytes]) -> str:
    h = hashlib.sha256()
    h.update(json.dumps(command, sort_keys=True).encode())
    for b in blobs:
        h.update(hashlib.sha256(b).digest())
    return h.hexdigest()


def new_report(command: dict, blobs: Iterable[bytes] = (), **extra: Any) -> Report:
    meta = {"tool": TOOL, "version": __version__, "input_digest": input_digest(command, blobs)}
    meta.update({k: cell(v) for k, v in extra.items()})
    return Report(dict(command), meta)


# -- rendering --------------------------------------------------------------------


def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        return render_json(report)
    if fmt == "csv":
        return render_csv(report)
    if fmt == "tex":
        return render_tex(report)
    raise ValueError(f"unknown format {fmt!r}")


def render_json(report: Report) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True, ensure_ascii=True) + "\n"


def _header_lines(report: Report) -> list[tuple[str, str]]:
    out = [(k, report.command[k]) for k in sorted(report.command)]
    out += [(k, report.metadata[k]) for k in sorted(report.metadata)]
    out.append(("status", report.status))
    return [(k, cell(v)) for k, v in out]


def render_csv(report: Report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for k, v in _header_lines(report):
        w.writerow([f"# {k}", v])
    for t in report.tables:
        w.writerow([f"# table", t.name])
        w.writerow(t.columns)
        w.writerows(t.rows)
    for d in report.diagnostics:
        w.writerow(["# diagnostic", d])
    return buf.getvalue()


_TOKEN = re.compile(r"(?P<num>-?\d+/\d+)|\^(?P<exp>-?\d+)|(?P<star>\*)|(?P<name>Delta|eta|xi|lam|mu|nu|Gamma)")


def tex_expr(text: str) -> str:
    """Plain expression syntax to LaTeX math: ``p/q`` to ``\\frac``, exponents braced, ``^1`` dropped."""
    def sub(m):
        if m.group("num"):
            p, q = m.group("num").split("/")
            sign = "-" if p.startswith("-") else ""
            return f"{sign}\\frac{{{p.lstrip('-')}}}{{{q}}}"
        if m.group("exp") is not None:
            e = m.group("exp")
            return "" if e == "1" else f"^{{{e}}}"
        if m.group("star"):
            return " "
        return {"lam": "\\lambda"}.get(m.group("name"), "\\" + m.group("name"))
    return _TOKEN.sub(sub, text)


def _tex_cell(c: str) -> str:
    if c in ("true", "false", "unknown") or re.fullmatch(r"[A-Za-z_\- ]+", c):
        return "\\text{" + c.replace("_", "\\_") + "}"
    return tex_expr(c)


def render_tex(report: Report) -> str:
    lines = ["% " + f"{k}: {v}" for k, v in _header_lines(report)]
    for t in report.tables:
        lines.append(f"% table: {t.name}")
        lines.append("\\begin{tabular}{" + "l" * len(t.columns) + "}")
        lines.append(" & ".join("\\text{" + c.replace("_", "\\_") + "}" for c in t.columns) + " \\\\")
        lines.append("\\hline")
        for r in t.rows:
            lines.append(" & ".join(f"${_tex_cell(c)}$" for c in r) + " \\\\")
        lines.append("\\end{tabular}")
    for d in report.diagnostics:
        lines.append(f"% diagnostic: {d}")
    return "\n".join(lines) + "\n"
