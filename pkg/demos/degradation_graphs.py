"""Functional graphs of the two maps computed in n-bit fixed point.

For each configuration we print components, cycle lengths and the longest
tail, and write a DOT file for the smallest precision so it can be rendered
with ``dot -Tpng``.

    python demos/degradation_graphs.py [outdir]
"""
import sys
from pathlib import Path

from mpps import degradation as deg
from mpps.chaos import MapKind

out = Path(sys.argv[1] if len(sys.argv) > 1 else "graphs")
out.mkdir(exist_ok=True)

for kind, mu, ns in deg.FIGURE_CONFIGS:
    for n in ns:
        g = deg.build_graph(kind, mu, n, deg.QuantMode.ROUND)
        s = deg.summarize(g)
        print(f"{kind.value} mu={mu} n={n:2d}: {s.components:3d} components, "
              f"cycles {sorted(s.cycle_lengths, reverse=True)[:6]}, max tail {s.max_tail}")
        if n == min(ns):
            (out / f"{kind.value}_{n}.dot").write_text(deg.export_dot(g))

print()
for kind in MapKind:
    print(f"{kind.value}: worst mirror-symmetry error {deg.check_symmetry(kind, 3.9):.2e}")

rep = deg.find_weak_keys()
print(f"weak rule pairs per channel: {rep.per_channel_count}, joint: {rep.joint_count}")
print(f"DOT files written to {out}/")
