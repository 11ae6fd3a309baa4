"""Reader for the harness CSV contract.

Files carry '#'-prefixed metadata lines, one header row, then data rows
with '.' decimals and inf/nan literals. This package depends only on that
file format, never on the simulation package itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


class PlotError(Exception):
    pass


class EmptyInput(PlotError):
    """CSV parsed but contains no data rows."""


class SchemaMismatch(PlotError):
    """CSV columns do not match what the figure kind needs."""


def _parse_token(tok: str):
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
class Table:
    columns: list
    rows: list
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        if name not in self.columns:
            raise SchemaMismatch(f"column {name!r} missing; have {self.columns}")
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def require(self, columns) -> None:
        missing = [c for c in columns if c not in self.columns]
        if missing:
            raise SchemaMismatch(
                f"missing column(s) {missing}; file has {self.columns}")

    def subset(self, key: str, value) -> "Table":
        i = self.columns.index(key)
        return Table(self.columns, [r for r in self.rows if r[i] == value],
                     self.metadata)


def read_csv(path: str) -> Table:
    metadata: dict = {}
    columns: list = []
    rows: list = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line.strip():
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
            rows.append(tuple(_parse_token(tok) for tok in line.split(",")))
    if not columns:
        raise EmptyInput(f"{path}: no header row")
    if not rows:
        raise EmptyInput(f"{path}: no data rows")
    return Table(columns=columns, rows=rows, metadata=metadata)
