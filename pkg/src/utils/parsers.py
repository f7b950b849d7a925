"""Parsers for configuration values, graph kinds and frequency lists."""

import math
import re
from typing import Any, List, Optional, Tuple


_GRAPH_KINDS = {
    "complete",
    "cycle",
    "path",
    "zero",
    "kNeighbor",
    "erdosRenyiSigned",
    "twoBlockSigned",
    "blockDiagonal",
}

_PI_EXPR = re.compile(r"^\s*([+-]?\d*\.?\d*(?:[eE][+-]?\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d+)?))?\s*$")


def parse_graph_kind(s: str) -> Tuple[str, List[str]]:
    """Split a graph kind string into its family name and arguments.

    Supported formats:
    - complete, cycle, path, zero
    - kNeighbor:2
    - erdosRenyiSigned:0.3:0.1:7
    - twoBlockSigned:4
    - blockDiagonal:3,5

    Args:
        s: kind string

    Returns:
        tuple: family name and its colon separated arguments

    Raises:
        ValueError: if the family is unknown
    """
    if not s or not s.strip():
        raise ValueError("empty graph kind")
    parts = [p.strip() for p in s.strip().split(":")]
    name, args = parts[0], parts[1:]
    if name not in _GRAPH_KINDS:
        raise ValueError(f"unknown graph kind '{name}'; expected one of {sorted(_GRAPH_KINDS)}")
    return name, args


def parse_angle(value: Any) -> float:
    """Parse a float or a multiple of pi.

    Supported formats:
    - 0.785
    - pi/4
    - 0.9pi, 0.9*pi
    - 3pi/8

    Args:
        value: number or text

    Returns:
        float: the parsed value in radians
    """
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    text = str(value).strip().lower()
    m = _PI_EXPR.match(text)
    if m:
        coef = m.group(1)
        factor = float(coef) if coef not in ("", "+", "-") else (-1.0 if coef == "-" else 1.0)
        denom = float(m.group(2)) if m.group(2) else 1.0
        return factor * math.pi / denom
    return float(text)


def parse_float_list(value: Any) -> List[float]:
    """Parse a comma separated list of numbers (or an existing sequence).

    Args:
        value: e.g. "0.1, -0.2, 0.3" or [0.1, -0.2, 0.3]

    Returns:
        list: floats in input order (empty for an empty string)
    """
    if value is None:
        return []
    if isinstance(value, (list, tuple)):
        return [parse_angle(v) for v in value]
    text = str(value).strip().strip("[]")
    if not text:
        return []
    return [parse_angle(tok) for tok in text.split(",") if tok.strip()]


def parse_bool(value: Any) -> Optional[bool]:
    """Parse yes/no style flags; returns None when the text is not a flag."""
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    return None
