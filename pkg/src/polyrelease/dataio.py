"""Parsers for bit-matrix CSV files and the one-line decision-list syntax.

Decision-list grammar (one list per line)::

    list  := rule (";" rule)* ";" "default:" bit   |   "default:" bit
    rule  := ["!"] "x" index ":" bit

``index`` is 1-based and ``!`` negates the literal, e.g.
``x2:1;!x1:0;default:1``.
"""

from __future__ import annotations

import re

import numpy as np

from .errors import ParseError
from .families import DecisionList

_RULE = re.compile(r"(!?)x(\d+):([01])")
_DEFAULT = re.compile(r"default:([01])")


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def parse_bits_csv(text: str) -> np.ndarray:
    """Rows of 0/1 attributes, comma-separated (``1,0,1``) or compact (``101``)."""
    rows = []
    width = None
    for lineno, line in _content_lines(text):
        cells = [c.strip() for c in line.split(",")] if "," in line else list(line)
        for pos, cell in enumerate(cells, start=1):
            if cell not in ("0", "1"):
                raise ParseError(f"non-binary value {cell!r} in column {pos}", line=lineno)
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise ParseError(f"ragged row: {len(cells)} columns, expected {width}", line=lineno)
        rows.append([int(c) for c in cells])
    if not rows:
        raise ParseError("no data rows")
    return np.array(rows, dtype=np.int8)


def parse_declist(line: str, m: int | None = None, k: int | None = None) -> DecisionList:
    text = line.strip()
    tokens = text.split(";")
    rules = []
    offset = 0
    for i, token in enumerate(tokens):
        tok = token.strip()
        pos = offset + 1
        offset += len(token) + 1
        last = i == len(tokens) - 1
        if last:
            match = _DEFAULT.fullmatch(tok)
            if not match:
                if _RULE.fullmatch(tok) or tok.startswith(("x", "!x")):
                    raise ParseError(
                        f"expected 'default:<bit>' as the final token, got {tok!r}"
                        + ("" if _RULE.fullmatch(tok) else " (missing output bit?)"),
                        position=pos,
                    )
                raise ParseError(f"malformed token {tok!r}", position=pos)
            default = int(match.group(1))
            break
        match = _RULE.fullmatch(tok)
        if not match:
            hint = " (missing output bit)" if re.fullmatch(r"!?x\d+", tok) else ""
            raise ParseError(f"malformed rule {tok!r}{hint}", position=pos)
        index = int(match.group(2))
        if index < 1 or (m is not None and index > m):
            raise ParseError(f"variable index {index} outside 1..{m}", position=pos)
        rules.append((index - 1, match.group(1) == "!", int(match.group(3))))
    if k is not None and len(rules) > k:
        raise ParseError(f"too many rules: {len(rules)} > k={k}")
    return DecisionList(tuple(rules), default)


def parse_declists(text: str, m: int | None = None, k: int | None = None) -> list:
    out = []
    for lineno, line in _content_lines(text):
        try:
            out.append(parse_declist(line, m=m, k=k))
        except ParseError as exc:
            raise ParseError(str(exc), line=lineno) from None
    if not out:
        raise ParseError("no decision lists")
    return out
