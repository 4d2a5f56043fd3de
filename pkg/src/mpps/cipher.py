"""The MPPS colour-image cipher: permutation, DNA coding, and XOR diffusion.

Data flow for one image of ``L = M*N`` pixels per channel::

    stack r/g/b -> permute by S1 -> encode (E1, E2, E3) -> complement R by S3
      -> R** = R*, G** = G (+) R*, B** = B (+) G -> decode (D1, D2, D3)
      -> chained XOR with S4, S5, S6

Every stage has an inverse here, so :func:`decrypt` walks the chain
backwards.  Keys come in two shapes: the real-valued :class:`SecretKey` and
the :class:`EquivalentKey` of integer sequences it expands into.  An
equivalent key is either *native* (raw S4, S5, S6) or *attack* form
(S4, S4^S5^S6, S4^S6), which is what a keyless unchaining of the diffusion
naturally exposes.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import chaos, dna
from .chaos import MapKind, SubKey
from .errors import ParameterError, ShapeError

__all__ = [
    "RgbImage",
    "SecretKey",
    "EquivalentKey",
    "derive_equivalent_key",
    "permute",
    "unpermute",
    "encode_plane",
    "decode_plane",
    "decode_planes",
    "complement_plane",
    "uncomplement_plane",
    "dna_diffuse",
    "dna_undiffuse",
    "pixel_diffuse",
    "pixel_undiffuse",
    "unchain",
    "rechain",
    "encrypt",
    "decrypt",
]


class RgbImage:
    """An ``M x N`` colour image held as a ``(3, M, N)`` uint8 array.

    Channel order is r, g, b and each plane flattens in raster order.
    """

    __slots__ = ("planes",)

    def __init__(self, planes):
        planes = np.asarray(planes)
        if planes.ndim != 3 or planes.shape[0] != 3 or 0 in planes.shape:
            raise ShapeError(f"expected a (3, M, N) array, got shape {planes.shape}")
        if planes.dtype != np.uint8:
            if planes.size and (planes.min() < 0 or planes.max() > 255):
                raise ParameterError("pixel values must lie in 0..255")
            planes = planes.astype(np.uint8)
        self.planes = np.ascontiguousarray(planes)

    @classmethod
    def from_flat(cls, values, height: int, width: int) -> "RgbImage":
        """Build from the stacked sequence r-plane, g-plane, b-plane (length ``3*M*N``)."""
        values = np.asarray(values)
        if values.size != 3 * height * width:
            raise ShapeError(f"{values.size} values cannot fill a 3x{height}x{width} image")
        return cls(values.reshape(3, height, width))

    @classmethod
    def from_channels(cls, r, g, b, height: int, width: int) -> "RgbImage":
        return cls.from_flat(np.concatenate([np.ravel(r), np.ravel(g), np.ravel(b)]), height, width)

    @classmethod
    def from_hwc(cls, array) -> "RgbImage":
        array = np.asarray(array)
        if array.ndim != 3 or array.shape[2] != 3:
            raise ShapeError(f"expected an (M, N, 3) array, got shape {array.shape}")
        return cls(np.moveaxis(array, 2, 0))

    @classmethod
    def constant(cls, value: int, height: int, width: int) -> "RgbImage":
        return cls(np.full((3, height, width), value, dtype=np.uint8))

    @classmethod
    def random(cls, height: int, width: int, rng=None) -> "RgbImage":
        rng = np.random.default_rng(rng)
        return cls(rng.integers(0, 256, size=(3, height, width), dtype=np.uint8))

    @property
    def height(self) -> int:
        return self.planes.shape[1]

    @property
    def width(self) -> int:
        return self.planes.shape[2]

    @property
    def shape(self) -> tuple[int, int]:
        return self.planes.shape[1:]

    @property
    def pixels(self) -> int:
        """Pixels per channel, ``L = M*N``."""
        return self.height * self.width

    @property
    def r(self) -> np.ndarray:
        return self.planes[0].ravel()

    @property
    def g(self) -> np.ndarray:
        return self.planes[1].ravel()

    @property
    def b(self) -> np.ndarray:
        return self.planes[2].ravel()

    def flat(self) -> np.ndarray:
        """The stacked ``3M x N`` image in raster order."""
        return self.planes.ravel()

    def to_hwc(self) -> np.ndarray:
        return np.ascontiguousarray(np.moveaxis(self.planes, 0, 2))

    def __xor__(self, other: "RgbImage") -> "RgbImage":
        _same_shape(self, other)
        return RgbImage(self.planes ^ other.planes)

    def __eq__(self, other):
        if not isinstance(other, RgbImage):
            return NotImplemented
        return self.planes.shape == other.planes.shape and bool(np.array_equal(self.planes, other.planes))

    def __hash__(self):
        return hash((self.planes.shape, self.planes.tobytes()))

    def __repr__(self):
        return f"RgbImage({self.height}x{self.width})"


def _same_shape(a: RgbImage, b: RgbImage):
    if a.shape != b.shape:
        raise ShapeError(f"image sizes differ: {a.shape} vs {b.shape}")


@dataclass(frozen=True)
class SecretKey:
    """Six sub-keys; k1, k4, k5, k6 drive CLS and k2, k3 drive CLT.

    ``s3_quantizer`` picks how the k3 orbit becomes complement bits:
    ``"parity"`` (``floor(x*1e14) mod 2``) reproduces the reference worked
    example, ``"threshold"`` is the plain 0.5 cut.
    """

    k1: SubKey
    k2: SubKey
    k3: SubKey
    k4: SubKey
    k5: SubKey
    k6: SubKey
    s3_quantizer: str = "parity"

    def __post_init__(self):
        if self.s3_quantizer not in ("parity", "threshold"):
            raise ParameterError(f"unknown s3 quantizer {self.s3_quantizer!r}")

    @property
    def subkeys(self) -> tuple[SubKey, ...]:
        return (self.k1, self.k2, self.k3, self.k4, self.k5, self.k6)

    @classmethod
    def from_pairs(cls, pairs, transient: int = chaos.DEFAULT_TRANSIENT, **kw) -> "SecretKey":
        """``SecretKey.from_pairs([(0.11, 3.91), ...])`` with one shared transient length."""
        subs = [SubKey(float(y0), float(mu), transient) for y0, mu in pairs]
        if len(subs) != 6:
            raise ParameterError(f"need six (y0, mu) pairs, got {len(subs)}")
        return cls(*subs, **kw)

    @classmethod
    def random(cls, rng=None, transient: int = chaos.DEFAULT_TRANSIENT, **kw) -> "SecretKey":
        """Initial values in (0.01, 0.99), control parameters in (3.5, 4); avoids the fixed points."""
        rng = np.random.default_rng(rng)
        pairs = zip(rng.uniform(0.01, 0.99, 6), rng.uniform(3.5, 4.0, 6))
        return cls.from_pairs(pairs, transient, **kw)


@dataclass(frozen=True, eq=False)
class EquivalentKey:
    """Integer sequences that encrypt and decrypt exactly like a :class:`SecretKey`.

    ``s1`` is 1-based.  ``form`` says how to read ``ks4, ks5, ks6``:
    ``"native"`` holds S4, S5, S6 and ``"attack"`` holds S4, S4^S5^S6, S4^S6.
    """

    height: int
    width: int
    s1: np.ndarray
    s3: np.ndarray
    e: tuple[int, int, int]
    d: tuple[int, int, int]
    ks4: np.ndarray
    ks5: np.ndarray
    ks6: np.ndarray
    form: str = "native"

    def __post_init__(self):
        L = self.height * self.width
        if L <= 0:
            raise ShapeError("image dimensions must be positive")
        object.__setattr__(self, "s1", np.asarray(self.s1, dtype=np.int64).ravel())
        object.__setattr__(self, "s3", np.asarray(self.s3, dtype=np.uint8).ravel())
        for name in ("ks4", "ks5", "ks6"):
            object.__setattr__(self, name, _bytes(getattr(self, name)))
        object.__setattr__(self, "e", tuple(int(v) for v in self.e))
        object.__setattr__(self, "d", tuple(int(v) for v in self.d))
        if self.form not in ("native", "attack"):
            raise ParameterError(f"unknown keystream form {self.form!r}")
        if len(self.e) != 3 or len(self.d) != 3 or not all(0 <= v <= 7 for v in self.e + self.d):
            raise ParameterError(f"rule indices must be three values in 0..7, got e={self.e} d={self.d}")
        if self.s1.size != 3 * L or not np.array_equal(np.sort(self.s1), np.arange(1, 3 * L + 1)):
            raise ShapeError(f"s1 must be a permutation of 1..{3 * L}")
        if self.s3.size != 4 * L or self.s3.max(initial=0) > 1:
            raise ShapeError(f"s3 must be {4 * L} bits")
        for name in ("ks4", "ks5", "ks6"):
            if getattr(self, name).size != L:
                raise ShapeError(f"{name} must have {L} entries")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    def hat_streams(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Keystreams in attack form: (S4, S4^S5^S6, S4^S6)."""
        if self.form == "attack":
            return self.ks4, self.ks5, self.ks6
        return self.ks4, self.ks4 ^ self.ks5 ^ self.ks6, self.ks4 ^ self.ks6

    def to_attack_form(self) -> "EquivalentKey":
        if self.form == "attack":
            return self
        h4, h5, h6 = self.hat_streams()
        return replace(self, ks4=h4, ks5=h5, ks6=h6, form="attack")

    def __eq__(self, other):
        if not isinstance(other, EquivalentKey):
            return NotImplemented
        return (
            self.shape == other.shape
            and self.form == other.form
            and self.e == other.e
            and self.d == other.d
            and all(
                np.array_equal(getattr(self, n), getattr(other, n))
                for n in ("s1", "s3", "ks4", "ks5", "ks6")
            )
        )

    __hash__ = None


def _bytes(a) -> np.ndarray:
    a = np.asarray(a).ravel()
    if a.dtype != np.uint8:
        if a.size and (a.min() < 0 or a.max() > 255):
            raise ParameterError("byte arrays must hold values in 0..255")
        a = a.astype(np.uint8)
    return a


def derive_equivalent_key(key: SecretKey, height: int, width: int) -> EquivalentKey:
    """Run the initialization phase: expand the real-valued key into integer sequences."""
    if height <= 0 or width <= 0:
        raise ShapeError("image dimensions must be positive")
    L = height * width
    s1 = chaos.sort_index(chaos.generate_orbit(MapKind.CLS, key.k1, 3 * L))
    s2 = chaos.quantize_orbit(chaos.generate_orbit(MapKind.CLT, key.k2, 6), 8)
    s3 = chaos.binarize_orbit(chaos.generate_orbit(MapKind.CLT, key.k3, 4 * L), key.s3_quantizer)
    ks = [
        chaos.quantize_orbit(chaos.generate_orbit(MapKind.CLS, k, L), 256).astype(np.uint8)
        for k in (key.k4, key.k5, key.k6)
    ]
    return EquivalentKey(
        height, width, s1, s3, tuple(s2[:3]), tuple(s2[3:]), *ks, form="native"
    )


# ---------------------------------------------------------------- permutation


def _check_perm(s1, n):
    s1 = np.asarray(s1, dtype=np.int64).ravel()
    if s1.size != n:
        raise ShapeError(f"permutation has {s1.size} entries, image has {n} stacked pixels")
    return s1


def permute(img: RgbImage, s1) -> RgbImage:
    """``P*(k) = P(S1(k))`` on the stacked image, 1-based."""
    flat = img.flat()
    s1 = _check_perm(s1, flat.size)
    return RgbImage.from_flat(flat[s1 - 1], img.height, img.width)


def unpermute(img: RgbImage, s1) -> RgbImage:
    flat = img.flat()
    s1 = _check_perm(s1, flat.size)
    out = np.empty_like(flat)
    out[s1 - 1] = flat
    return RgbImage.from_flat(out, img.height, img.width)


# ---------------------------------------------------------------- DNA stage

_SHIFTS = np.array([6, 4, 2, 0], dtype=np.uint8)


def split_quads(plane) -> np.ndarray:
    """Bytes to 2-bit values, most significant pair first."""
    plane = _bytes(plane)
    return ((plane[:, None] >> _SHIFTS) & 3).ravel()


def join_quads(quads) -> np.ndarray:
    quads = np.asarray(quads, dtype=np.uint8)
    if quads.size % 4:
        raise ShapeError("2-bit sequence length must be a multiple of 4")
    return (quads.reshape(-1, 4) << _SHIFTS).sum(axis=1, dtype=np.uint16).astype(np.uint8)


def encode_plane(plane, rule: int) -> np.ndarray:
    """Bytes to DNA symbols (length ``4L``) with coding rule ``rule``."""
    return dna.ENCODE_TABLE[dna._rule(rule)][split_quads(plane)]


def decode_plane(symbols, rule: int) -> np.ndarray:
    return join_quads(dna.DECODE_TABLE[dna._rule(rule)][np.asarray(symbols, dtype=np.uint8)])


def decode_planes(r, g, b, d1: int, d2: int, d3: int):
    return decode_plane(r, d1), decode_plane(g, d2), decode_plane(b, d3)


def _check_bits(plane, s3):
    s3 = np.asarray(s3, dtype=np.uint8).ravel()
    if s3.size != np.size(plane):
        raise ShapeError(f"{s3.size} complement bits for {np.size(plane)} symbols")
    return s3.astype(bool)


def complement_plane(plane, s3) -> np.ndarray:
    plane = np.asarray(plane, dtype=np.uint8)
    return np.where(_check_bits(plane, s3), dna.COMPLEMENT_TABLE[plane], plane)


def uncomplement_plane(plane, s3) -> np.ndarray:
    plane = np.asarray(plane, dtype=np.uint8)
    return np.where(_check_bits(plane, s3), dna.UNCOMPLEMENT_TABLE[plane], plane)


def _check_same(*arrays):
    n = {np.size(a) for a in arrays}
    if len(n) != 1:
        raise ShapeError(f"length mismatch: {[np.size(a) for a in arrays]}")


def dna_diffuse(r, g, b, s3):
    """Complement R by ``s3`` then ``R** = R*``, ``G** = G (+) R*``, ``B** = B (+) G``."""
    _check_same(r, g, b, s3)
    r_star = complement_plane(r, s3)
    g = np.asarray(g, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8)
    return r_star, dna.ADD_TABLE[g, r_star], dna.ADD_TABLE[b, g]


def dna_undiffuse(rss, gss, bss, s3):
    _check_same(rss, gss, bss, s3)
    r_star = np.asarray(rss, dtype=np.uint8)
    g = dna.SUB_TABLE[np.asarray(gss, dtype=np.uint8), r_star]
    b = dna.SUB_TABLE[np.asarray(bss, dtype=np.uint8), g]
    return uncomplement_plane(r_star, s3), g, b


# ---------------------------------------------------------------- XOR diffusion


def _cumxor(a):
    return np.bitwise_xor.accumulate(a) if a.size else a


def _delta(a):
    # a(i) ^ a(i-1) with a(0) = 0
    out = a.copy()
    out[1:] ^= a[:-1]
    return out


def pixel_diffuse(rss, gss, bss, ks4, ks5, ks6):
    rss, gss, bss, ks4, ks5, ks6 = map(_bytes, (rss, gss, bss, ks4, ks5, ks6))
    _check_same(rss, gss, bss, ks4, ks5, ks6)
    return (
        _cumxor(rss ^ ks4),
        _cumxor(gss ^ bss ^ ks5),
        _cumxor(bss ^ rss ^ ks6),
    )


def pixel_undiffuse(cr, cg, cb, ks4, ks5, ks6):
    cr, cg, cb, ks4, ks5, ks6 = map(_bytes, (cr, cg, cb, ks4, ks5, ks6))
    _check_same(cr, cg, cb, ks4, ks5, ks6)
    rss = _delta(cr) ^ ks4
    bss = _delta(cb) ^ rss ^ ks6
    gss = _delta(cg) ^ bss ^ ks5
    return rss, gss, bss


def unchain(cr, cg, cb):
    """Keyless unchaining of the XOR diffusion.

    Returns ``(I**_r ^ S4, I**_g ^ S4^S5^S6, I**_b ^ S4^S6)``: everything the
    diffusion layer hides except the keystreams themselves.
    """
    cr, cg, cb = map(_bytes, (cr, cg, cb))
    _check_same(cr, cg, cb)
    ur = _delta(cr)
    ub = _delta(cb) ^ ur
    ug = _delta(cg) ^ ub
    return ur, ug, ub


def rechain(ur, ug, ub):
    """Inverse of :func:`unchain`."""
    ur, ug, ub = map(_bytes, (ur, ug, ub))
    _check_same(ur, ug, ub)
    return _cumxor(ur), _cumxor(ug ^ ub), _cumxor(ub ^ ur)


# ---------------------------------------------------------------- full cipher


def _equivalent(key, img: RgbImage) -> EquivalentKey:
    if isinstance(key, SecretKey):
        return derive_equivalent_key(key, img.height, img.width)
    if isinstance(key, EquivalentKey):
        if key.shape != img.shape:
            raise ShapeError(f"key is bound to {key.shape} images, got {img.shape}")
        return key
    raise TypeError(f"expected SecretKey or EquivalentKey, got {type(key).__name__}")


def dna_stage(pstar: RgbImage, ek: EquivalentKey):
    """Permuted image to the intermediate ``I**`` byte planes."""
    e1, e2, e3 = ek.e
    R = encode_plane(pstar.r, e1)
    G = encode_plane(pstar.g, e2)
    B = encode_plane(pstar.b, e3)
    return decode_planes(*dna_diffuse(R, G, B, ek.s3), *ek.d)


def dna_unstage(rss, gss, bss, ek: EquivalentKey, height: int, width: int) -> RgbImage:
    d1, d2, d3 = ek.d
    R, G, B = dna_undiffuse(encode_plane(rss, d1), encode_plane(gss, d2), encode_plane(bss, d3), ek.s3)
    e1, e2, e3 = ek.e
    return RgbImage.from_channels(decode_plane(R, e1), decode_plane(G, e2), decode_plane(B, e3), height, width)


def encrypt(img: RgbImage, key) -> RgbImage:
    ek = _equivalent(key, img)
    rss, gss, bss = dna_stage(permute(img, ek.s1), ek)
    if ek.form == "native":
        cr, cg, cb = pixel_diffuse(rss, gss, bss, ek.ks4, ek.ks5, ek.ks6)
    else:
        h4, h5, h6 = ek.hat_streams()
        cr, cg, cb = rechain(rss ^ h4, gss ^ h5, bss ^ h6)
    return RgbImage.from_channels(cr, cg, cb, img.height, img.width)


def decrypt(img: RgbImage, key) -> RgbImage:
    ek = _equivalent(key, img)
    if ek.form == "native":
        rss, gss, bss = pixel_undiffuse(img.r, img.g, img.b, ek.ks4, ek.ks5, ek.ks6)
    else:
        h4, h5, h6 = ek.hat_streams()
        ur, ug, ub = unchain(img.r, img.g, img.b)
        rss, gss, bss = ur ^ h4, ug ^ h5, ub ^ h6
    pstar = dna_unstage(rss, gss, bss, ek, img.height, img.width)
    return unpermute(pstar, ek.s1)
