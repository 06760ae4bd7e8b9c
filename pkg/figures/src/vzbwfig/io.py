"""Provenance-checked CSV loading.

A table is only accepted when the CSV file is accompanied by its
``<base>.meta.json`` sidecar and the sidecar's ``columns`` entry matches the
CSV header.  Anything else raises :class:`FigureInputError`, which the
command line turns into a nonzero exit.  Keeping the check here means every
render path goes through it.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass


class FigureInputError(Exception):
    """Raised for missing, unprovenanced, or schema-mismatched inputs."""


def sidecar_path(csv_path: str) -> str:
    """Path of the metadata sidecar belonging to ``csv_path``."""
    base, _ = os.path.splitext(csv_path)
    return base + ".meta.json"


@dataclass(frozen=True)
class Table:
    """One loaded CSV file plus its parsed sidecar."""

    path: str
    header: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]
    meta: dict

    def column(self, name: str) -> tuple[str, ...]:
        """Raw string values of one column."""
        try:
            i = self.header.index(name)
        except ValueError:
            raise FigureInputError(
                f"{self.path}: no column named {name!r}"
            ) from None
        return tuple(row[i] for row in self.rows)

    def floats(self, name: str) -> list[float]:
        """One column parsed as floats."""
        out = []
        for value in self.column(name):
            try:
                out.append(float(value))
            except ValueError:
                raise FigureInputError(
                    f"{self.path}: column {name!r} has non-numeric "
                    f"value {value!r}"
                ) from None
        return out


def load_table(csv_path: str) -> Table:
    """Load a CSV file, refusing it unless its sidecar vouches for it."""
    if not os.path.isfile(csv_path):
        raise FigureInputError(f"input not found: {csv_path}")
    meta_path = sidecar_path(csv_path)
    if not os.path.isfile(meta_path):
        raise FigureInputError(
            f"{csv_path}: missing provenance sidecar {meta_path}"
        )
    try:
        with open(meta_path, encoding="utf-8") as fh:
            meta = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FigureInputError(
            f"{meta_path}: unreadable sidecar ({exc})"
        ) from None
    if not isinstance(meta, dict):
        raise FigureInputError(f"{meta_path}: sidecar is not a JSON object")

    with open(csv_path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise FigureInputError(f"{csv_path}: empty file") from None
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise FigureInputError(
                    f"{csv_path}: line {lineno} has {len(row)} fields, "
                    f"header has {len(header)}"
                )
            rows.append(tuple(row))

    declared = meta.get("columns")
    if declared is None:
        raise FigureInputError(
            f"{meta_path}: sidecar lacks a 'columns' entry"
        )
    if tuple(declared) != header:
        raise FigureInputError(
            f"{csv_path}: header {list(header)} does not match sidecar "
            f"columns {declared}"
        )
    return Table(path=csv_path, header=header, rows=tuple(rows), meta=meta)


def expect_header(table: Table, expected: tuple[str, ...], kind: str) -> None:
    """Require an exact header, naming the plot kind in the error."""
    if table.header != expected:
        raise FigureInputError(
            f"{table.path}: header {list(table.header)} does not match the "
            f"{kind} schema {list(expected)}"
        )
