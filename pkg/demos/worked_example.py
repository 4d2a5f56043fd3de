"""Encrypt a 2x2 image with a fixed key and print every intermediate.

Run with ``python demos/worked_example.py``.  The numbers printed here are the
same ones pinned by ``tests/test_cipher.py``.
"""
import numpy as np

from mpps import RgbImage, SecretKey, decrypt, derive_equivalent_key, encrypt

PAIRS = [(0.11, 3.91), (0.12, 3.92), (0.13, 3.93), (0.14, 3.94), (0.15, 3.95), (0.16, 3.96)]

key = SecretKey.from_pairs(PAIRS, transient=500)
ek = derive_equivalent_key(key, 2, 2)

print("S1 (pixel permutation, 1-based):", ek.s1.tolist())
print("encoding rules E:", ek.e, " decoding rules D:", ek.d)
print("S3 (complement mask):", ek.s3.tolist())
for name in ("ks4", "ks5", "ks6"):
    print(f"{name}:", getattr(ek, name).tolist())

ramp = RgbImage.from_flat(np.arange(12), 2, 2)
cipher = encrypt(ramp, key)
print("\nplain  :", ramp.flat().tolist())
print("cipher :", cipher.flat().tolist())
print("back   :", decrypt(cipher, key).flat().tolist())

# an equivalent key in attack form decrypts just as well
print("attack-form key agrees:", decrypt(cipher, ek.to_attack_form()) == ramp)
