"""Finite binary strings, rendered everywhere as ASCII '0'/'1' text."""

from __future__ import annotations

from itertools import product
from typing import Iterator

__all__ = [
    "validate_bits",
    "is_prefix",
    "is_proper_prefix",
    "prefixes",
    "prefix_closure",
    "all_bitstrings",
]


def validate_bits(s: str, *, name: str = "bit string") -> str:
    if not isinstance(s, str) or any(c not in "01" for c in s):
        raise ValueError(f"{name} must consist of '0'/'1' characters, got {s!r}")
    return s


def is_prefix(a: str, b: str) -> bool:
    """a is a (not necessarily proper) prefix of b."""
    return b.startswith(a)


def is_proper_prefix(a: str, b: str) -> bool:
    return len(a) < len(b) and b.startswith(a)


def prefixes(s: str, *, include_empty: bool = False) -> Iterator[str]:
    """All prefixes of s, shortest first."""
    start = 0 if include_empty else 1
    for n in range(start, len(s) + 1):
        yield s[:n]


def prefix_closure(strings) -> frozenset[str]:
    """All nonempty prefixes of all given strings."""
    out: set[str] = set()
    for s in strings:
        validate_bits(s)
        for n in range(1, len(s) + 1):
            out.add(s[:n])
    return frozenset(out)


def all_bitstrings(length: int) -> Iterator[str]:
    for tup in product("01", repeat=length):
        yield "".join(tup)
