"""Transcribed reference expressions, stored as text-grammar entries."""
from __future__ import annotations

import json
import re
from functools import lru_cache
from importlib import resources
from pathlib import Path

from gmpy2 import mpq

from .algebra import EXACT, Regime, State
from .textio import parse_state

__all__ = ["load_golden", "golden_expr", "golden_state", "golden_tags", "golden_linear_form",
           "set_golden_path"]

_OVERRIDE: str | None = None


def set_golden_path(path: str | None) -> None:
    """Make ``path`` the file read when no explicit path is given."""
    global _OVERRIDE
    _OVERRIDE = None if path is None else str(path)


def load_golden(path: str | None = None) -> dict[str, str]:
    return _load(path if path is not None else _OVERRIDE)


@lru_cache(maxsize=None)
def _load(path: str | None) -> dict[str, str]:
    if path is None:
        text = resources.files("affgaudin").joinpath("data/golden.json").read_text()
    else:
        text = Path(path).read_text()
    data = json.loads(text)
    out: dict[str, str] = {}
    for entry in data["entries"]:
        if entry["tag"] in out:
            raise ValueError(f"duplicate golden tag {entry['tag']!r}")
        out[entry["tag"]] = entry["expr"]
    return out


def golden_tags(prefix: str = "", path: str | None = None) -> list[str]:
    tags = [t for t in load_golden(path) if t.startswith(prefix)]

    def key(t: str):
        m = re.search(r"(\d+)$", t)
        return (t[: m.start()] if m else t, int(m.group(1)) if m else -1)

    return sorted(tags, key=key)


def golden_expr(tag: str, path: str | None = None, **subs) -> str:
    expr = load_golden(path)[tag]
    for k, v in subs.items():
        expr = expr.replace("{" + k + "}", str(v))
    return expr


def golden_state(tag: str, regime: Regime = EXACT, path: str | None = None, **subs) -> State:
    return parse_state(golden_expr(tag, path, **subs), regime)


_LIN_TERM = re.compile(r"\s*([+-])?\s*(?:(\d+(?:/\d+)?)\s*\*\s*)?x(\d+)\s*")


def golden_linear_form(tag: str, path: str | None = None) -> dict[int, mpq]:
    """Read an entry like ``20/3 * x1 - x4`` as {1: 20/3, 4: -1}."""
    text = golden_expr(tag, path)
    out: dict[int, mpq] = {}
    pos = 0
    while pos < len(text):
        m = _LIN_TERM.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"bad linear form {text!r} at {pos}")
        c = mpq(m.group(2) or 1)
        if m.group(1) == "-":
            c = -c
        i = int(m.group(3))
        out[i] = out.get(i, mpq(0)) + c
        pos = m.end()
    return out
