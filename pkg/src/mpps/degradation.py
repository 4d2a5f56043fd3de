"""Dynamics degradation of the digitized maps and key-space defects.

A map evaluated on ``n``-bit fixed-point states becomes a function on
``2**n`` nodes, so every orbit ends in a cycle.  :func:`build_graph` builds
that functional graph and :func:`summarize` measures it.  The remaining
helpers probe the weak and equivalent keys that come from the maps'
symmetry ``f(x) = f(1-x)``, their fixed points, and same-rule DNA coding.
"""
from __future__ import annotations

import enum
import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import chaos, dna
from .chaos import MapKind, SubKey
from .errors import ParameterError

__all__ = [
    "QuantMode",
    "FunctionalGraph",
    "GraphSummary",
    "parse_mu",
    "build_graph",
    "summarize",
    "export_dot",
    "check_symmetry",
    "symmetric_keystream_agreement",
    "WeakKeyReport",
    "find_weak_keys",
    "FIGURE_CONFIGS",
]

MIN_PRECISION, MAX_PRECISION = 2, 24


class QuantMode(enum.Enum):
    FLOOR = "floor"
    ROUND = "round"
    CEIL = "ceil"


#: (map, mu, precisions) for each captioned functional-graph figure.
FIGURE_CONFIGS = (
    (MapKind.CLS, Fraction(121, 2**5), (9,)),
    (MapKind.CLT, Fraction(123, 2**5), (8,)),
    (MapKind.CLS, Fraction(61, 2**4), (5, 6, 7, 8)),
    (MapKind.CLT, Fraction(63, 2**4), (4, 5, 6, 7)),
)

_MU_RE = re.compile(r"^\s*(\d+)\s*/\s*(\d+)\s*(?:\^|\*\*)\s*(\d+)\s*$")


def parse_mu(text) -> Fraction | float:
    """Accept ``"121/2^5"``, ``"121/32"``, a decimal string, or a number."""
    if isinstance(text, (Fraction, int)):
        return Fraction(text)
    if isinstance(text, float):
        return text
    m = _MU_RE.match(text)
    if m:
        num, base, exp = map(int, m.groups())
        return Fraction(num, base**exp)
    if "/" in text:
        return Fraction(text.replace(" ", ""))
    return float(text)


@dataclass(frozen=True, eq=False)
class FunctionalGraph:
    """Successor array over the ``2**precision`` states ``i / 2**precision``."""

    kind: MapKind
    mu: Fraction | float
    precision: int
    mode: QuantMode
    successor: np.ndarray

    @property
    def size(self) -> int:
        return self.successor.size


@dataclass
class GraphSummary:
    """Cycle/tail structure of a functional graph.

    ``cycle_lengths`` has one entry per weakly connected component, sorted by
    the smallest node on each cycle.
    """

    nodes: int
    components: int
    cycle_lengths: list
    cycle_nodes: int
    max_tail: int
    indegree_histogram: dict
    tail: np.ndarray = field(repr=False)
    component: np.ndarray = field(repr=False)

    def as_dict(self) -> dict:
        return {
            "nodes": self.nodes,
            "components": self.components,
            "cycle_lengths": list(self.cycle_lengths),
            "cycle_nodes": self.cycle_nodes,
            "max_tail": self.max_tail,
            "indegree_histogram": {str(k): v for k, v in sorted(self.indegree_histogram.items())},
        }


def _quantize(values: np.ndarray, mode: QuantMode) -> np.ndarray:
    if mode is QuantMode.FLOOR:
        q = np.floor(values)
    elif mode is QuantMode.CEIL:
        q = np.ceil(values)
    else:
        # half away from zero; values are non-negative
        q = np.floor(values + 0.5)
    return q.astype(np.int64)


def build_graph(kind, mu, precision: int, mode=QuantMode.ROUND) -> FunctionalGraph:
    """Functional graph of ``kind`` at ``precision`` bits.

    Each node ``i`` stands for ``x = i / 2**n``; the map is evaluated in
    double precision and only its output is quantized back to ``n`` bits,
    wrapping ``2**n`` to 0.
    """
    kind, mode = MapKind(kind), QuantMode(mode)
    if not (MIN_PRECISION <= precision <= MAX_PRECISION):
        raise ParameterError(f"precision must be in [{MIN_PRECISION}, {MAX_PRECISION}], got {precision}")
    mu = parse_mu(mu)
    f = chaos._MAPS[kind]
    mu_f = float(mu)
    chaos._check_mu(mu_f)
    size = 1 << precision
    y = np.fromiter((f(i / size, mu_f) for i in range(size)), dtype=np.float64, count=size)
    succ = _quantize(y * size, mode) % size
    return FunctionalGraph(kind, mu, precision, mode, succ)


def summarize(g: FunctionalGraph) -> GraphSummary:
    """Walk every node to its cycle; components are identified by the cycle they drain into."""
    succ = np.asarray(g.successor if isinstance(g, FunctionalGraph) else g, dtype=np.int64)
    n = succ.size
    tail = np.full(n, -1, dtype=np.int64)
    comp = np.full(n, -1, dtype=np.int64)
    cycles = []
    state = np.zeros(n, dtype=np.int8)  # 0 new, 1 on current path, 2 done
    for start in range(n):
        if state[start]:
            continue
        path = []
        v = start
        while state[v] == 0:
            state[v] = 1
            path.append(v)
            v = int(succ[v])
        if state[v] == 1:
            # closed a new cycle at v
            idx = path.index(v)
            cyc = path[idx:]
            cid = len(cycles)
            cycles.append(cyc)
            for u in cyc:
                tail[u] = 0
                comp[u] = cid
                state[u] = 2
            path = path[:idx]
        for u in reversed(path):
            w = int(succ[u])
            tail[u] = tail[w] + 1
            comp[u] = comp[w]
            state[u] = 2
    order = sorted(range(len(cycles)), key=lambda c: min(cycles[c]))
    remap = np.empty(len(cycles), dtype=np.int64)
    remap[order] = np.arange(len(cycles))
    indeg = np.bincount(succ, minlength=n)
    return GraphSummary(
        nodes=n,
        components=len(cycles),
        cycle_lengths=[len(cycles[c]) for c in order],
        cycle_nodes=sum(len(c) for c in cycles),
        max_tail=int(tail.max()) if n else 0,
        indegree_histogram=dict(Counter(indeg.tolist())),
        tail=tail,
        component=remap[comp],
    )


def export_dot(g: FunctionalGraph) -> str:
    lines = [
        "digraph functional_graph {",
        f"  // map={g.kind.value} mu={g.mu} precision={g.precision} mode={g.mode.value}",
        f"  // node i stands for the state i/2^{g.precision}",
    ]
    lines += [f'  {i} [label="{i}"];' for i in range(g.size)]
    lines += [f"  {i} -> {int(j)};" for i, j in enumerate(g.successor)]
    lines.append("}")
    return "\n".join(lines) + "\n"


def _circular(d):
    d = np.abs(d)
    return np.minimum(d, 1.0 - d)


def check_symmetry(kind, mu: float, samples: int = 100_000, rng=0, xs=None) -> float:
    """Largest ``|f(x) - f(1-x)|`` over sampled x, measured on the unit circle.

    States live modulo 1, so a pair straddling the 0/1 seam counts by its
    short-way distance.
    """
    kind = MapKind(kind)
    f = chaos._MAPS[kind]
    mu = float(mu)
    chaos._check_mu(mu)
    if xs is None:
        xs = np.random.default_rng(rng).uniform(0.0, 1.0, samples)
    worst = 0.0
    for x in np.asarray(xs, dtype=np.float64):
        x = float(x)
        worst = max(worst, float(_circular(f(x, mu) - f(1.0 - x, mu))))
    return worst


def symmetric_keystream_agreement(sub: SubKey, count: int, kind=MapKind.CLS, modulus: int = 256) -> float:
    """Fraction of positions where the keystreams from ``y0`` and ``1 - y0`` agree."""
    a = chaos.quantize_orbit(chaos.generate_orbit(kind, sub, count), modulus)
    mirror = SubKey(1.0 - sub.y0, sub.mu, sub.transient)
    b = chaos.quantize_orbit(chaos.generate_orbit(kind, mirror, count), modulus)
    return float(np.mean(a == b))


@dataclass
class WeakKeyReport:
    identity_rule_pairs: list
    per_channel_count: int
    joint_count: int
    claimed_joint_count: int
    fixed_point_orbits: dict

    @property
    def count_discrepancy(self) -> bool:
        return self.joint_count != self.claimed_joint_count

    def as_dict(self) -> dict:
        return {
            "identity_rule_pairs": [list(p) for p in self.identity_rule_pairs],
            "per_channel_count": self.per_channel_count,
            "joint_count": self.joint_count,
            "claimed_joint_count": self.claimed_joint_count,
            "count_discrepancy": self.count_discrepancy,
            "fixed_point_orbits": {k: list(v) for k, v in self.fixed_point_orbits.items()},
        }


def find_weak_keys(mu: float = 3.9, steps: int = 4) -> WeakKeyReport:
    """Same-rule DNA pairs that cancel out, and initial values that collapse to 0.

    The joint weak-key count is reported both as computed (8**3) and as the
    commonly quoted 64; ``count_discrepancy`` flags the mismatch.
    """
    pairs = [(s, t) for s in range(8) for t in range(8) if dna.f_map(s, t) == (0, 1, 2, 3)]
    orbits = {}
    for kind in MapKind:
        for y0 in (0.0, 0.5, 1.0):
            orbits[f"{kind.value}:{y0}"] = tuple(
                chaos.generate_orbit(kind, SubKey(y0, mu, 1), steps).tolist()
            )
    per = sum(1 for s, t in pairs if s == t)
    return WeakKeyReport(
        identity_rule_pairs=pairs,
        per_channel_count=per,
        joint_count=per**3,
        claimed_joint_count=64,
        fixed_point_orbits=orbits,
    )
