"""The composite 2-bit maps built from DNA encode/decode rule pairs.

Encoding with rule s and decoding with rule t gives a permutation of
{0, 1, 2, 3}.  Only 8 distinct permutations arise for F (plain encode then
decode) and 16 for G (with a complement in between), which is why the key
search collapses so quickly.
"""
from mpps import dna

part = dna.enumerate_distinct_maps()
print(f"F: {part.count_f} distinct maps over 64 rule pairs")
for perm, pairs in sorted(part.f_classes.items()):
    print(f"  {perm}: {len(pairs)} pairs, e.g. {pairs[:3]}")

print(f"\nG: {part.count_g} distinct maps over 64 rule pairs")
for perm, pairs in sorted(part.g_classes.items()):
    print(f"  {perm}: {len(pairs)} pairs")

s, t = 0, 4
print(f"\nF_({s},{t}) = {dna.f_map(s, t)}")
print("rule pairs whose F map differs from it by a constant XOR:")
for s2, t2, lam in dna.xor_constant_partners(s, t, "F"):
    print(f"  ({s2},{t2}) xor {lam} -> {dna.f_map(s2, t2)}")
