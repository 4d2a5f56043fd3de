"""DNA coding rules, complement, addition/subtraction, and the composite 2-bit S-boxes.

Symbols are carried as small integers in the order ``A=0, G=1, C=2, T=3``
(the header order of the addition table).  The tables below are literal
transcriptions; the Z4 arithmetic they happen to match is checked in the
tests, never used here.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

__all__ = [
    "DnaSymbol",
    "RULES",
    "encode",
    "decode",
    "complement",
    "uncomplement",
    "dna_add",
    "dna_sub",
    "composite_f",
    "composite_g",
    "f_map",
    "g_map",
    "MapPartition",
    "enumerate_distinct_maps",
    "xor_constant_partners",
    "tables_document",
]


class DnaSymbol(enum.IntEnum):
    A = 0
    G = 1
    C = 2
    T = 3

    def __str__(self):
        return self.name


def _sym(s: str) -> int:
    return int(DnaSymbol[s])


# Row r lists the symbols for 2-bit values 00, 01, 10, 11.
RULES = ("ACGT", "AGCT", "TGCA", "TCGA", "CATG", "CTAG", "GATC", "GTAC")

ENCODE_TABLE = np.array([[_sym(c) for c in row] for row in RULES], dtype=np.uint8)
DECODE_TABLE = np.argsort(ENCODE_TABLE, axis=1).astype(np.uint8)

_ADD_ROWS = {"A": "AGCT", "G": "GCTA", "C": "CTAG", "T": "TAGC"}
_SUB_ROWS = {"A": "ATCG", "G": "GATC", "C": "CGAT", "T": "TCGA"}
_COLS = "AGCT"


def _binary_table(rows):
    table = np.zeros((4, 4), dtype=np.uint8)
    for a, row in rows.items():
        for b, out in zip(_COLS, row):
            table[_sym(a), _sym(b)] = _sym(out)
    return table


#: ``ADD_TABLE[a, b]`` is ``a (+) b``.
ADD_TABLE = _binary_table(_ADD_ROWS)
#: ``SUB_TABLE[a, b]`` is ``a (-) b``.
SUB_TABLE = _binary_table(_SUB_ROWS)

_COMPLEMENT_PAIRS = {"A": "T", "T": "C", "C": "G", "G": "A"}
COMPLEMENT_TABLE = np.zeros(4, dtype=np.uint8)
for _a, _b in _COMPLEMENT_PAIRS.items():
    COMPLEMENT_TABLE[_sym(_a)] = _sym(_b)
UNCOMPLEMENT_TABLE = np.argsort(COMPLEMENT_TABLE).astype(np.uint8)
del _a, _b


def _rule(r) -> int:
    r = int(r)
    if not 0 <= r <= 7:
        raise ParameterError(f"rule index {r} outside 0..7")
    return r


def _quad(q) -> int:
    q = int(q)
    if not 0 <= q <= 3:
        raise ParameterError(f"2-bit value {q} outside 0..3")
    return q


def encode(rule: int, q: int) -> DnaSymbol:
    return DnaSymbol(int(ENCODE_TABLE[_rule(rule), _quad(q)]))


def decode(rule: int, d) -> int:
    return int(DECODE_TABLE[_rule(rule), DnaSymbol(d)])


def complement(d) -> DnaSymbol:
    return DnaSymbol(int(COMPLEMENT_TABLE[DnaSymbol(d)]))


def uncomplement(d) -> DnaSymbol:
    return DnaSymbol(int(UNCOMPLEMENT_TABLE[DnaSymbol(d)]))


def dna_add(a, b) -> DnaSymbol:
    return DnaSymbol(int(ADD_TABLE[DnaSymbol(a), DnaSymbol(b)]))


def dna_sub(a, b) -> DnaSymbol:
    return DnaSymbol(int(SUB_TABLE[DnaSymbol(a), DnaSymbol(b)]))


def composite_f(s: int, t: int, q: int) -> int:
    """Encode with rule ``s``, decode with rule ``t``."""
    return decode(t, encode(s, q))


def composite_g(s: int, t: int, q: int) -> int:
    """Encode with rule ``s``, complement, decode with rule ``t``."""
    return decode(t, complement(encode(s, q)))


def f_map(s: int, t: int) -> tuple[int, ...]:
    return tuple(composite_f(s, t, q) for q in range(4))


def g_map(s: int, t: int) -> tuple[int, ...]:
    return tuple(composite_g(s, t, q) for q in range(4))


_FAMILIES = {"F": f_map, "G": g_map}


@dataclass(frozen=True)
class MapPartition:
    """Grouping of the 64 rule pairs by the 2-bit map they induce."""

    f_classes: dict
    g_classes: dict

    @property
    def count_f(self) -> int:
        return len(self.f_classes)

    @property
    def count_g(self) -> int:
        return len(self.g_classes)

    def f_class_of(self, s, t):
        return self.f_classes[f_map(s, t)]

    def g_class_of(self, s, t):
        return self.g_classes[g_map(s, t)]


def enumerate_distinct_maps() -> MapPartition:
    f_classes, g_classes = {}, {}
    for s, t in itertools.product(range(8), repeat=2):
        f_classes.setdefault(f_map(s, t), []).append((s, t))
        g_classes.setdefault(g_map(s, t), []).append((s, t))
    return MapPartition(f_classes, g_classes)


def xor_constant_partners(s1: int, t1: int, family: str = "F") -> list[tuple[int, int, int]]:
    """All ``(s2, t2, lam)`` with ``map[s2,t2](q) == map[s1,t1](q) ^ lam`` for every q, lam != 0."""
    try:
        m = _FAMILIES[family]
    except KeyError:
        raise ParameterError(f"family must be 'F' or 'G', got {family!r}") from None
    ref = m(s1, t1)
    out = []
    for s2, t2 in itertools.product(range(8), repeat=2):
        diffs = {a ^ b for a, b in zip(ref, m(s2, t2))}
        if len(diffs) == 1 and 0 not in diffs:
            out.append((s2, t2, diffs.pop()))
    return out


def tables_document() -> dict:
    """Plain-data dump of the coding, complement, addition and subtraction tables and the map partition."""
    part = enumerate_distinct_maps()
    return {
        "symbol_order": [s.name for s in DnaSymbol],
        "coding_rules": {str(r): {format(q, "02b"): RULES[r][q] for q in range(4)} for r in range(8)},
        "complement": dict(_COMPLEMENT_PAIRS),
        "addition": {a: dict(zip(_COLS, row)) for a, row in _ADD_ROWS.items()},
        "subtraction": {a: dict(zip(_COLS, row)) for a, row in _SUB_ROWS.items()},
        "f_maps": [{"map": list(k), "pairs": [list(p) for p in v]} for k, v in part.f_classes.items()],
        "g_maps": [{"map": list(k), "pairs": [list(p) for p in v]} for k, v in part.g_classes.items()],
    }
