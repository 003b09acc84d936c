"""Family text format, the embedded catalog of published families, and
matrix export.

A family record is a block of ``key: value`` lines::

    id: v55-1
    v: 55
    pps: 27,25,25,21;43
    symbol: s**
    hgroup: 1,19,107
    X1: sym-half 5,6,7,9
    X2: explicit 0,1,2
    X3: same-as-X2
    X4: orbit-reps 0,2,4

``#`` starts a comment. Records in one file are separated by blank lines.
``id``, ``source`` and ``series`` are catalog metadata, ``hgroup`` and ``X3``
are optional, and ``X3`` defaults to ``X2``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Optional

import numpy as np

from propus.families import BlockEncoding, DiffFamily, PropusParamSet
from propus.residues import (
    ResidueSet,
    decode_skew,
    decode_symmetric,
    expand_orbits,
    half_set,
    is_h_invariant,
    is_skew_set,
    is_symmetric_set,
    orbit_representatives,
    unit_subgroup,
)

BLOCK_KINDS = ("sym-half", "skew-half", "explicit", "orbit-reps")
META_KEYS = ("id", "source", "series")
FAMILY_KEYS = ("v", "pps", "symbol", "hgroup", "X1", "X2", "X3", "X4")
SERIES_TAGS = ("turyn", "xxsw", "none")


class FormatError(ValueError):
    """Syntax error in a family or matrix file, with 1-based position."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    family: DiffFamily
    provenance: str
    series_tag: Optional[str] = None


_INT_LIST = re.compile(r"^\s*(\d+\s*(,\s*\d+\s*)*)?$")


def _int_list(text: str, line: int, column: int) -> tuple[int, ...]:
    text = text.strip().strip("{}")
    if not _INT_LIST.match(text):
        raise FormatError(f"expected a comma-separated list of integers, got {text!r}", line, column)
    return tuple(int(x) for x in text.split(",")) if text.strip() else ()


def _split_records(text: str) -> list[list[tuple[int, str]]]:
    records, current = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            if raw.strip().startswith("#"):
                continue
            if current:
                records.append(current)
                current = []
            continue
        current.append((lineno, line))
    if current:
        records.append(current)
    return records


def _parse_pps(value: str, line: int, column: int) -> tuple[Optional[int], tuple[int, ...], int]:
    m = re.fullmatch(r"\(?\s*(?:(\d+)\s*;)?\s*(\d+(?:\s*,\s*\d+){3})\s*;\s*(\d+)\s*\)?", value.strip())
    if not m:
        raise FormatError(f"malformed parameter set {value.strip()!r}", line, column)
    v = int(m.group(1)) if m.group(1) else None
    ks = tuple(int(x) for x in m.group(2).split(","))
    return v, ks, int(m.group(3))


def _parse_record(lines: list[tuple[int, str]]):
    fields: dict[str, tuple[int, int, str]] = {}
    for lineno, line in lines:
        if ":" not in line:
            raise FormatError("expected 'key: value'", lineno, 1)
        key, value = line.split(":", 1)
        key = key.strip()
        col = line.index(":") + 2
        if key not in META_KEYS + FAMILY_KEYS:
            raise FormatError(f"unknown key {key!r}", lineno, 1)
        if key in fields:
            raise FormatError(f"duplicate key {key!r}", lineno, 1)
        fields[key] = (lineno, col, value.strip())

    for required in ("v", "pps", "X1", "X2", "X4"):
        if required not in fields:
            last = lines[-1][0] if lines else 0
            raise FormatError(f"missing required key {required!r}", last, 1)

    lineno, col, value = fields["v"]
    if not value.isdigit():
        raise FormatError(f"modulus must be a positive integer, got {value!r}", lineno, col)
    v = int(value)
    if v < 3 or v % 2 == 0:
        raise FormatError(f"modulus must be odd and >= 3, got {v}", lineno, col)

    lineno, col, value = fields["pps"]
    pps_v, ks, lam = _parse_pps(value, lineno, col)
    if pps_v is not None and pps_v != v:
        raise FormatError(f"parameter set modulus {pps_v} differs from v={v}", lineno, col)
    params = PropusParamSet(v, ks, lam)

    symbol = "***"
    if "symbol" in fields:
        lineno, col, value = fields["symbol"]
        symbol = value.strip().strip("()").replace("{", "").replace("}", "")
        if len(symbol) != 3 or set(symbol) - set("sk*"):
            raise FormatError(f"malformed symmetry symbol {value!r}", lineno, col)

    group = None
    if "hgroup" in fields:
        lineno, col, value = fields["hgroup"]
        elems = _int_list(value, lineno, col)
        try:
            group = unit_subgroup(v, elems)
        except ValueError as exc:
            raise FormatError(str(exc), lineno, col) from None
        if set(group.elements) != {e % v for e in elems}:
            raise FormatError(f"{sorted(elems)} is not closed under multiplication", lineno, col)

    blocks: dict[str, ResidueSet] = {}
    encodings: dict[str, BlockEncoding] = {}
    for name, k in (("X1", ks[0]), ("X2", ks[1]), ("X4", ks[3]), ("X3", ks[2])):
        if name not in fields:
            continue
        lineno, col, value = fields[name]
        kind, _, rest = value.partition(" ")
        if name == "X3" and kind == "same-as-X2":
            if rest.strip():
                raise FormatError("same-as-X2 takes no values", lineno, col)
            continue
        if kind not in BLOCK_KINDS:
            raise FormatError(f"unknown block kind {kind!r}", lineno, col)
        values = _int_list(rest, lineno, col + len(kind) + 1)
        try:
            block = _decode_block(kind, values, v, k, group)
        except ValueError as exc:
            raise FormatError(f"{name}: {exc}", lineno, col) from None
        blocks[name] = block
        encodings[name] = BlockEncoding(kind, values)

    X3 = blocks.get("X3", blocks["X2"])
    family = DiffFamily(
        params=params,
        blocks=(blocks["X1"], blocks["X2"], X3, blocks["X4"]),
        symbol=symbol,
        orbit_group=group,
        encodings=tuple(encodings.get(n) for n in ("X1", "X2", "X3", "X4")),
    )
    meta = {key: fields[key][2] for key in META_KEYS if key in fields}
    return meta, family


def _decode_block(kind, values, v, k, group) -> ResidueSet:
    if any(x >= v for x in values):
        raise ValueError(f"values must be below v={v}")
    if len(set(values)) != len(values):
        raise ValueError("repeated value")
    listed = ResidueSet(v, tuple(sorted(values)))
    if kind == "explicit":
        return listed
    if kind == "sym-half":
        return decode_symmetric(listed, k)
    if kind == "skew-half":
        return decode_skew(listed)
    if group is None:
        raise ValueError("orbit-reps needs an hgroup line")
    return expand_orbits(group, listed)


def parse_families(text: str) -> list[tuple[dict, DiffFamily]]:
    """Parse every record of a family file into ``(metadata, family)``."""
    records = _split_records(text)
    if not records:
        raise FormatError("no family records found")
    return [_parse_record(r) for r in records]


def parse_family(text: str) -> DiffFamily:
    records = _split_records(text)
    if not records:
        raise FormatError("no family records found")
    if len(records) > 1:
        raise FormatError("expected a single family record", records[1][0][0], 1)
    return _parse_record(records[0])[1]


def _encoding_for(family: DiffFamily, index: int) -> BlockEncoding:
    block = family.blocks[index]
    v, k = family.v, len(block)
    group = family.orbit_group
    stored = family.encodings[index] if family.encodings else None
    if stored is not None:
        try:
            if _decode_block(stored.kind, stored.values, v, k, group) == block:
                return stored
        except ValueError:
            pass
    if index == 2:
        return BlockEncoding("explicit", block.members)
    if group is not None and len(group) > 1 and is_h_invariant(block, group):
        return BlockEncoding("orbit-reps", orbit_representatives(group, block).members)
    letter = family.symbol[{0: 0, 1: 1, 3: 2}[index]]
    if letter == "s" and is_symmetric_set(block):
        return BlockEncoding("sym-half", half_set(block).members)
    if letter == "k" and is_skew_set(block):
        return BlockEncoding("skew-half", half_set(block).members)
    return BlockEncoding("explicit", block.members)


def emit_family(family: DiffFamily, meta: Optional[dict] = None) -> str:
    """Serialize a family in the record format, LF line endings."""
    lines = []
    for key in META_KEYS:
        if meta and meta.get(key):
            lines.append(f"{key}: {meta[key]}")
    p = family.params
    lines.append(f"v: {p.v}")
    lines.append(f"pps: {','.join(map(str, p.k))};{p.lam}")
    lines.append(f"symbol: {family.symbol}")
    if family.orbit_group is not None:
        lines.append(f"hgroup: {','.join(map(str, family.orbit_group.elements))}")
    for name, index in (("X1", 0), ("X2", 1), ("X3", 2), ("X4", 3)):
        if index == 2 and family.blocks[2] == family.blocks[1]:
            continue
        enc = _encoding_for(family, index)
        lines.append(f"{name}: {enc.kind} {','.join(map(str, enc.values))}".rstrip())
    return "\n".join(lines) + "\n"


def emit_entry(entry: CatalogEntry) -> str:
    meta = {"id": entry.id, "source": entry.provenance}
    if entry.series_tag:
        meta["series"] = entry.series_tag
    return emit_family(entry.family, meta)


def _data_files():
    return sorted(
        (f for f in resources.files("propus").joinpath("data").iterdir() if f.name.endswith(".fam")),
        key=lambda f: f.name,
    )


@lru_cache(maxsize=None)
def builtin_catalog() -> tuple[CatalogEntry, ...]:
    """Every published family, in printed order (by v, then listing order)."""
    entries = []
    for path in _data_files():
        for meta, family in parse_families(path.read_text(encoding="ascii")):
            series = meta.get("series")
            if series is not None and series not in SERIES_TAGS:
                raise FormatError(f"{path.name}: unknown series {series!r}")
            entries.append(CatalogEntry(meta["id"], family, meta.get("source", ""), series))
    entries.sort(key=lambda e: (e.family.v, int(e.id.rsplit("-", 1)[1])))
    return tuple(entries)


def get_entry(entry_id: str) -> CatalogEntry:
    """Look up an entry by id, or by ``v{v}-{series}`` when that is unique."""
    entries = builtin_catalog()
    for e in entries:
        if e.id == entry_id:
            return e
    m = re.fullmatch(r"v(\d+)-([a-z]+)", entry_id)
    if m:
        hits = [e for e in entries if e.family.v == int(m.group(1)) and e.series_tag == m.group(2)]
        if len(hits) == 1:
            return hits[0]
    raise KeyError(entry_id)


def export_matrix(M, fmt: str = "pm") -> str:
    """``H <order>`` followed by one row of ``+``/``-`` characters per line."""
    if fmt != "pm":
        raise ValueError(f"unsupported matrix format {fmt!r}")
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    if not np.all(np.abs(M) == 1):
        raise ValueError("matrix has entries other than +1 and -1")
    rows = ["".join("+" if x > 0 else "-" for x in row) for row in M.tolist()]
    return f"H {M.shape[0]}\n" + "\n".join(rows) + "\n"


def import_matrix(text: str) -> np.ndarray:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    m = re.fullmatch(r"H (\d+)", lines[0]) if lines else None
    if not m:
        raise FormatError("expected header 'H <order>'", 1, 1)
    n = int(m.group(1))
    if len(lines) != n + 1:
        raise FormatError(f"expected {n} rows, found {len(lines) - 1}", len(lines), 1)
    out = np.empty((n, n), dtype=np.int64)
    for i, row in enumerate(lines[1:]):
        if len(row) != n:
            raise FormatError(f"row has {len(row)} characters, expected {n}", i + 2, 1)
        for j, ch in enumerate(row):
            if ch not in "+-":
                raise FormatError(f"unexpected character {ch!r}", i + 2, j + 1)
        out[i] = [1 if ch == "+" else -1 for ch in row]
    return out


__all__ = [
    "BLOCK_KINDS",
    "CatalogEntry",
    "FormatError",
    "builtin_catalog",
    "emit_entry",
    "emit_family",
    "export_matrix",
    "get_entry",
    "import_matrix",
    "parse_families",
    "parse_family",
]
