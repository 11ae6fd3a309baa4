"""Result tables and their CSV form.

Layout: '#'-prefixed metadata lines, one header row, then data rows
(RFC-4180 style, '.' decimal separator, inf/nan literals). The body
(header plus data) is deterministic for a fixed config and seed; wall
time and other run facts live only in the metadata block.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

SCHEMA_VERSION = "1"


def format_number(x) -> str:
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    if isinstance(x, np.integer):
        return str(int(x))
    return str(x)


def parse_number(tok: str):
    tok = tok.strip()
    if tok == "inf":
        return math.inf
    if tok == "-inf":
        return -math.inf
    if tok == "nan":
        return math.nan
    try:
        return int(tok)
    except ValueError:
        pass
    try:
        return float(tok)
    except ValueError:
        return tok


@dataclass
class ResultTable:
    columns: list
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"row width {len(values)} != {len(self.columns)}")
        self.rows.append(tuple(values))

    def body(self) -> str:
        out = io.StringIO()
        out.write(",".join(self.columns) + "\n")
        for row in self.rows:
            out.write(",".join(format_number(v) for v in row) + "\n")
        return out.getvalue()

    def render(self) -> str:
        out = io.StringIO()
        meta = {"schema_version": SCHEMA_VERSION, **self.metadata}
        for key in meta:
            out.write(f"# {key}: {meta[key]}\n")
        out.write(self.body())
        return out.getvalue()

    def write(self, path: str | None):
        text = self.render()
        if path in (None, "-"):
            print(text, end="")
        else:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)


def read_table(path: str) -> ResultTable:
    """Round-trip reader for the harness's own CSV files."""
    metadata: dict = {}
    columns: list = []
    rows: list = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if ":" in body:
                    key, val = body.split(":", 1)
                    metadata[key.strip()] = val.strip()
                continue
            if not columns:
                columns = [tok.strip() for tok in line.split(",")]
                continue
            rows.append(tuple(parse_number(tok) for tok in line.split(",")))
    table = ResultTable(columns=columns, metadata=metadata)
    for row in rows:
        table.add(*row)
    return table
