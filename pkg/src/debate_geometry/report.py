"""Run reports rendered as text or CSV with fixed float formatting."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INVARIANT = 2
EXIT_NONCONVERGENCE = 3


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    return str(value)


@dataclass
class Table:
    title: str
    columns: tuple
    rows: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([fmt(x) for x in row])
        return buf.getvalue()


@dataclass
class RunReport:
    command: str
    seed: int | None = None
    summary: list = field(default_factory=list)
    tables: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    exit_code: int = EXIT_OK

    def add(self, key: str, value) -> None:
        self.summary.append((key, value))

    def value(self, key: str):
        for k, v in self.summary:
            if k == key:
                return v
        raise KeyError(key)

    def table(self, title: str) -> Table:
        for t in self.tables:
            if t.title == title:
                return t
        raise KeyError(title)

    def render_text(self) -> str:
        out = [f"command: {self.command}", f"seed: {fmt(self.seed)}"]
        out += [f"{k} = {fmt(v)}" for k, v in self.summary]
        for t in self.tables:
            out.append(f"[{t.title}]")
            out.append(t.to_csv().rstrip("\n"))
        if self.warnings:
            out += [f"warning: {w}" for w in self.warnings]
        else:
            out.append("warnings: none")
        return "\n".join(out) + "\n"

    def render_csv(self) -> str:
        return "\n".join(t.to_csv() for t in self.tables)

    def render(self, fmt_name: str) -> str:
        return self.render_csv() if fmt_name == "csv" else self.render_text()
