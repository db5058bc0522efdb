"""Text formats: location maps and trace files."""
from __future__ import annotations

import os
import re

_PAIR = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*([0-9]+)\s*$")


def parse_location_map(text: str) -> dict:
    """`L1=0,L2=1` (commas or newlines) to {'L1': 0, 'L2': 1}."""
    out = {}
    for raw in re.split(r"[,\n]", text):
        raw = raw.split("#", 1)[0]
        if not raw.strip():
            continue
        m = _PAIR.match(raw)
        if m is None:
            raise ValueError(f"bad location mapping {raw.strip()!r}; expected NAME=NODE")
        name, node = m.group(1), int(m.group(2))
        if name in out:
            raise ValueError(f"location {name} mapped twice")
        out[name] = node
    return out


def load_location_map(arg: str) -> dict:
    """Accept either inline pairs or the path of a file holding them."""
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            return parse_location_map(fh.read())
    return parse_location_map(arg)


def format_trace(events) -> str:
    return "".join(ev.format() + "\n" for ev in events)


def write_trace(path: str, events) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_trace(events))


_FIELD = re.compile(r"(\w+)=('(?:[^'\\]|\\.)*'|\S+)")


def parse_trace_line(line: str) -> dict:
    return {k: v for k, v in _FIELD.findall(line)}
