"""Reading and writing S-box files.

Text files hold integers separated by whitespace or commas, row-major, with
``#`` starting a comment. ``hex`` reads every token base 16 (a ``0x`` prefix is
optional); ``decimal`` reads base 10 but still honours an explicit ``0x``.
JSON files are either a bare list or an object with an ``entries`` list.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .boolfn import InvalidInput, SBoxTable

FORMATS = ("decimal", "hex", "json")

_TOKEN = re.compile(r"[^\s,]+")


class ParseError(InvalidInput):
    def __init__(self, message: str, line: int | None = None, column: int | None = None, path=None):
        where = ":".join(str(p) for p in (path, line, column) if p is not None)
        super().__init__(f"{where}: {message}" if where else message)
        self.line, self.column, self.path = line, column, path


class SizeError(InvalidInput):
    pass


@dataclass(frozen=True)
class SBoxFile:
    path: str | None
    format: str
    sbox: SBoxTable
    provenance: str


def guess_format(path: str | Path) -> str:
    p = str(path).lower()
    if p.endswith(".json"):
        return "json"
    if p.endswith((".hex", ".hx")):
        return "hex"
    return "decimal"


def _build(values: list[int], m: int | None) -> SBoxTable:
    count = len(values)
    if count < 2 or count & (count - 1):
        raise SizeError(f"entry count {count} is not a power of two >= 2")
    try:
        return SBoxTable.from_list(values, m=m)
    except InvalidInput as exc:
        raise SizeError(str(exc)) from exc


def parse_text(text: str, fmt: str = "decimal", m: int | None = None, path=None) -> SBoxTable:
    if fmt not in ("decimal", "hex"):
        raise InvalidInput(f"not a text format: {fmt!r}")
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        for tok in _TOKEN.finditer(body):
            s = tok.group()
            base = 16 if fmt == "hex" or s.lower().startswith("0x") else 10
            try:
                v = int(s, base)
            except ValueError:
                raise ParseError(f"bad {'hex' if base == 16 else 'decimal'} token {s!r}", lineno, tok.start() + 1, path) from None
            if v < 0:
                raise ParseError(f"negative entry {s!r}", lineno, tok.start() + 1, path)
            values.append(v)
    return _build(values, m)


def parse_json(text: str, m: int | None = None, path=None) -> SBoxTable:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno, path) from None
    if isinstance(doc, dict):
        m = doc.get("m", m)
        doc = doc.get("entries")
    if not isinstance(doc, list) or not all(isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in doc):
        raise ParseError("expected a list of non-negative integers", path=path)
    return _build(doc, m)


def parse(text: str, fmt: str, m: int | None = None, path=None) -> SBoxTable:
    if fmt == "json":
        return parse_json(text, m, path)
    return parse_text(text, fmt, m, path)


def serialize(S: SBoxTable, fmt: str = "decimal", per_line: int | None = None) -> str:
    if fmt == "json":
        return json.dumps({"n": S.n, "m": S.m, "entries": S.tolist()}) + "\n"
    if fmt not in ("decimal", "hex"):
        raise InvalidInput(f"unknown format {fmt!r}")
    per_line = per_line or min(16, 1 << S.n)
    width = (S.m + 3) // 4
    cells = [f"0x{v:0{width}x}" if fmt == "hex" else str(v) for v in S.tolist()]
    rows = [", ".join(cells[i : i + per_line]) for i in range(0, len(cells), per_line)]
    return "\n".join(rows) + "\n"


def read_sbox(path: str | Path, fmt: str | None = None, m: int | None = None) -> SBoxFile:
    fmt = fmt or guess_format(path)
    if fmt not in FORMATS:
        raise InvalidInput(f"unknown format {fmt!r}")
    text = Path(path).read_text()
    return SBoxFile(str(path), fmt, parse(text, fmt, m, path=str(path)), f"user file {path}")


def write_sbox(path: str | Path, S: SBoxTable, fmt: str = "decimal") -> None:
    Path(path).write_text(serialize(S, fmt))
