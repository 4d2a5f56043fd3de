"""Chosen-plaintext recovery of an MPPS equivalent key.

The attack needs ``ceil(log256(3*M*N)) + 4`` chosen images:

1. The constant images 0, 85, 170 and 255.  Constant images are fixed by
   any permutation, so their ciphertexts depend only on the DNA and XOR
   stages.  XORing the keyless unchaining of the 0 and 255 ciphertexts
   cancels every keystream and exposes the complement bits S3 directly.
2. With S3 known, each colour channel is searched exhaustively over its
   DNA rule indices (64 hypotheses for red, 512 each for green and blue).
   A hypothesis survives when all four constant images imply the same
   keystream.
3. Red/green and green/blue candidates share rule indices; candidates whose
   shared index has no partner in the neighbouring channel are dropped.
4. What remains is a permutation-only cipher.  Images that write the
   base-256 digits of each stacked position recover S1.  Because those
   images are not constant, they also rule out the rule combinations that
   only agreed with the constant images (see :func:`select_key`).

Each digit is written through the byte bijection :data:`DIGIT_CODE` rather
than as the raw value.  Raw digits of a small image are all below 16, so
their two high 2-bit groups are always zero and some wrong green/blue rule
combinations go untested; the spread-out code probes them without costing
a query.  Pass ``code=IDENTITY_CODE`` to send the plain digits instead.
"""
from __future__ import annotations

import itertools
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import numpy as np

from . import dna
from .cipher import (
    EquivalentKey,
    RgbImage,
    decrypt,
    encrypt,
    join_quads,
    split_quads,
    unchain,
)
from .errors import ProtocolError, ShapeError

log = logging.getLogger(__name__)

__all__ = [
    "CONSTANTS",
    "ChosenPlaintextOracle",
    "CipherOracle",
    "RecordingOracle",
    "TranscriptOracle",
    "ChannelCandidate",
    "CandidateSet",
    "FilterResult",
    "AttackResult",
    "permutation_image_count",
    "query_budget",
    "partial_decrypt",
    "query_constants",
    "s3_from_ciphers",
    "recover_s3",
    "search_red",
    "search_green",
    "search_blue",
    "filter_consistent",
    "IDENTITY_CODE",
    "DIGIT_CODE",
    "permutation_images",
    "recover_permutation",
    "select_key",
    "fragment_key",
    "run_attack",
    "full_attack",
]

#: Constant plaintexts used by the channel searches; together they feed all
#: four 2-bit values into every rule.
CONSTANTS = (0, 85, 170, 255)

IDENTITY_CODE = np.arange(256, dtype=np.uint8)
#: Byte written for each base-256 digit of a position: ``(167 * d + 17) mod 256``.
DIGIT_CODE = ((167 * np.arange(256) + 17) % 256).astype(np.uint8)


# ---------------------------------------------------------------- oracles


class ChosenPlaintextOracle(Protocol):
    query_count: int

    def submit(self, plain: RgbImage) -> RgbImage: ...


class CipherOracle:
    """Encrypts under a hidden key held in process."""

    def __init__(self, key):
        self._key = key
        self.query_count = 0

    def submit(self, plain: RgbImage) -> RgbImage:
        self.query_count += 1
        return encrypt(plain, self._key)


class RecordingOracle:
    """Wraps another oracle and writes each exchange as ``query_%03d_{plain,cipher}.ppm``."""

    def __init__(self, inner, directory):
        from . import io

        self._inner = inner
        self._io = io
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    @property
    def query_count(self) -> int:
        return self._inner.query_count

    def submit(self, plain: RgbImage) -> RgbImage:
        cipher = self._inner.submit(plain)
        n = self._inner.query_count
        self._io.write_ppm(self.directory / f"query_{n:03d}_plain.ppm", plain)
        self._io.write_ppm(self.directory / f"query_{n:03d}_cipher.ppm", cipher)
        return cipher


class TranscriptOracle:
    """Answers from a directory of recorded plain/cipher PPM pairs.

    Submitting a plaintext that was never recorded raises
    :class:`ProtocolError`; the transcript cannot encrypt new images.
    """

    def __init__(self, directory):
        from . import io

        self.directory = Path(directory)
        self._table = {}
        for plain_path in sorted(self.directory.glob("query_*_plain.ppm")):
            cipher_path = plain_path.with_name(plain_path.name.replace("_plain", "_cipher"))
            if not cipher_path.exists():
                raise ProtocolError(f"{plain_path.name} has no matching cipher file")
            self._table[io.read_ppm(plain_path)] = io.read_ppm(cipher_path)
        self.query_count = 0

    def __len__(self):
        return len(self._table)

    def submit(self, plain: RgbImage) -> RgbImage:
        self.query_count += 1
        try:
            return self._table[plain]
        except KeyError:
            raise ProtocolError("plaintext not present in transcript") from None


# ---------------------------------------------------------------- data types


@dataclass(frozen=True, eq=False)
class ChannelCandidate:
    """Rule indices plus the keystream they imply.

    ``rules`` is (E1, D1) for red, (E1, E2, D2) for green, (E2, E3, D3) for blue.
    """

    rules: tuple
    keystream: np.ndarray

    def __repr__(self):
        return f"ChannelCandidate{self.rules}"


@dataclass
class CandidateSet:
    channel: str
    candidates: list

    def __len__(self):
        return len(self.candidates)

    def __iter__(self):
        return iter(self.candidates)

    def rules(self) -> list:
        return [c.rules for c in self.candidates]

    def keystream_groups(self) -> dict:
        """Candidates grouped by keystream bytes."""
        groups = {}
        for c in self.candidates:
            groups.setdefault(c.keystream.tobytes(), []).append(c.rules)
        return groups


@dataclass
class FilterResult:
    red: CandidateSet
    green: CandidateSet
    blue: CandidateSet
    e: tuple
    d: tuple
    ks: tuple

    def joint_keys(self):
        """Every consistent (red, green, blue) choice: green's E1 matches red, green's E2 matches blue."""
        for r in self.red:
            for g in self.green:
                if g.rules[0] != r.rules[0]:
                    continue
                for b in self.blue:
                    if b.rules[0] == g.rules[1]:
                        yield r, g, b

    def joint_count(self) -> int:
        return sum(1 for _ in self.joint_keys())


@dataclass
class AttackResult:
    key: EquivalentKey
    queries: int
    s3: np.ndarray
    raw: tuple  # (red, green, blue) before filtering
    filtered: FilterResult
    verified: bool


# ---------------------------------------------------------------- helpers


def permutation_image_count(stacked: int) -> int:
    """Smallest k with 256**k >= stacked, i.e. ceil(log256(stacked))."""
    k, span = 0, 1
    while span < stacked:
        k += 1
        span *= 256
    return k


def query_budget(height: int, width: int) -> int:
    return permutation_image_count(3 * height * width) + len(CONSTANTS)


def partial_decrypt(cipher: RgbImage):
    """``(I**_r ^ S4, I**_g ^ S4^S5^S6, I**_b ^ S4^S6)`` from a ciphertext, no key needed."""
    return unchain(cipher.r, cipher.g, cipher.b)


def query_constants(oracle, height: int, width: int, values=CONSTANTS) -> dict:
    return {v: oracle.submit(RgbImage.constant(v, height, width)) for v in values}


def s3_from_ciphers(cipher_a: RgbImage, cipher_b: RgbImage) -> np.ndarray:
    """Complement bits from ciphertexts of two constant images whose values XOR to 255."""
    delta = partial_decrypt(cipher_a)[0] ^ partial_decrypt(cipher_b)[0]
    quads = split_quads(delta)
    if np.any(quads == 0):
        raise ProtocolError("zero 2-bit difference in the red channel; not an MPPS oracle")
    return (quads != 3).astype(np.uint8)


def recover_s3(oracle, height: int, width: int, pair=(0, 255)) -> np.ndarray:
    a, b = pair
    if a ^ b != 255:
        raise ValueError(f"pair values must XOR to 255, got {pair}")
    return s3_from_ciphers(
        oracle.submit(RgbImage.constant(a, height, width)),
        oracle.submit(RgbImage.constant(b, height, width)),
    )


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("MPPS_THREADS", "1")))
    except ValueError:
        return 1


def _encoded_constants(alphas, L):
    # enc[rule, a] = DNA symbols of the constant plane alphas[a] under rule
    quads = split_quads(np.asarray(alphas, dtype=np.uint8))  # (4 * len(alphas),)
    per_alpha = np.tile(quads.reshape(len(alphas), 4), (1, L))  # (A, 4L)
    return dna.ENCODE_TABLE[:, per_alpha]  # (8, A, 4L)


def _targets(ciphers: dict, channel: int):
    alphas = sorted(ciphers)
    if len(alphas) < 2:
        raise ValueError("need at least two constant ciphertexts")
    shapes = {ciphers[a].shape for a in alphas}
    if len(shapes) != 1:
        raise ShapeError("constant ciphertexts differ in size")
    (shape,) = shapes
    U = np.stack([partial_decrypt(ciphers[a])[channel] for a in alphas])
    return alphas, U, shape


def _decode_all(symbols):
    """Decode symbols (..., 4L) with all eight rules -> bytes (8, ..., L)."""
    return join_quads(dna.DECODE_TABLE[:, symbols].reshape(-1)).reshape(
        (8,) + symbols.shape[:-1] + (symbols.shape[-1] // 4,)
    )


def _consistent(hyp, U):
    """Indices over the leading rule axis whose implied keystream agrees across all constants."""
    ks = hyp ^ U  # (8, A, L)
    ok = np.all(ks == ks[:, :1, :], axis=(1, 2))
    return [(int(t), ks[t, 0].copy()) for t in np.flatnonzero(ok)]


def _search(prefixes, make_symbols, U, channel):
    def one(prefix):
        return [
            ChannelCandidate(prefix + (t,), ks)
            for t, ks in _consistent(_decode_all(make_symbols(*prefix)), U)
        ]

    n = _threads()
    if n > 1:
        with ThreadPoolExecutor(n) as pool:
            parts = list(pool.map(one, prefixes))
    else:
        parts = [one(p) for p in prefixes]
    found = [c for part in parts for c in part]
    if not found:
        raise ProtocolError(f"no consistent {channel} hypothesis; oracle is not MPPS-conformant")
    return CandidateSet(channel, found)


def _complemented(enc, s3):
    comp = dna.COMPLEMENT_TABLE[enc]
    return np.where(np.asarray(s3, dtype=bool), comp, enc)


def search_red(ciphers: dict, s3) -> CandidateSet:
    """Exhaust (E1, D1); candidates carry S4."""
    alphas, U, (h, w) = _targets(ciphers, 0)
    enc = _encoded_constants(alphas, h * w)
    r_star = _complemented(enc, s3)
    return _search([(s,) for s in range(8)], lambda s: r_star[s], U, "R")


def search_green(ciphers: dict, s3) -> CandidateSet:
    """Exhaust (E1, E2, D2); candidates carry S4^S5^S6."""
    alphas, U, (h, w) = _targets(ciphers, 1)
    enc = _encoded_constants(alphas, h * w)
    r_star = _complemented(enc, s3)
    prefixes = list(itertools.product(range(8), repeat=2))
    return _search(prefixes, lambda e1, e2: dna.ADD_TABLE[enc[e2], r_star[e1]], U, "G")


def search_blue(ciphers: dict, s3=None) -> CandidateSet:
    """Exhaust (E2, E3, D3); candidates carry S4^S6.  The blue channel never sees S3."""
    alphas, U, (h, w) = _targets(ciphers, 2)
    enc = _encoded_constants(alphas, h * w)
    prefixes = list(itertools.product(range(8), repeat=2))
    return _search(prefixes, lambda e2, e3: dna.ADD_TABLE[enc[e3], enc[e2]], U, "B")


def filter_consistent(red: CandidateSet, green: CandidateSet, blue: CandidateSet) -> FilterResult:
    """Drop candidates whose shared rule index has no partner in the neighbouring channel."""
    r, g, b = list(red), list(green), list(blue)
    while True:
        e1_g = {c.rules[0] for c in g}
        e2_g = {c.rules[1] for c in g}
        r2 = [c for c in r if c.rules[0] in e1_g]
        b2 = [c for c in b if c.rules[0] in e2_g]
        e1_r = {c.rules[0] for c in r2}
        e2_b = {c.rules[0] for c in b2}
        g2 = [c for c in g if c.rules[0] in e1_r and c.rules[1] in e2_b]
        if (len(r2), len(g2), len(b2)) == (len(r), len(g), len(b)):
            break
        r, g, b = r2, g2, b2
    if not (r and g and b):
        raise ProtocolError("channel candidates share no rule indices")
    result = FilterResult(CandidateSet("R", r), CandidateSet("G", g), CandidateSet("B", b), (), (), ())
    best = min(
        result.joint_keys(),
        key=lambda rgb: (rgb[0].rules[0], rgb[0].rules[1], rgb[1].rules[1], rgb[1].rules[2], rgb[2].rules[1], rgb[2].rules[2]),
    )
    cr, cg, cb = best
    result.e = (cr.rules[0], cg.rules[1], cb.rules[1])
    result.d = (cr.rules[1], cg.rules[2], cb.rules[2])
    result.ks = (cr.keystream, cg.keystream, cb.keystream)
    return result


def fragment_key(height, width, s3, e, d, ks, s1=None) -> EquivalentKey:
    """Assemble an attack-form key; identity permutation unless ``s1`` is given."""
    if s1 is None:
        s1 = np.arange(1, 3 * height * width + 1)
    return EquivalentKey(height, width, s1, s3, e, d, *ks, form="attack")


def _check_code(code) -> np.ndarray:
    code = np.asarray(code, dtype=np.uint8)
    if code.shape != (256,) or np.unique(code).size != 256:
        raise ValueError("digit code must be a permutation of 0..255")
    return code


def permutation_images(height: int, width: int, code=DIGIT_CODE) -> list:
    """Image k carries ``code[digit_k(p)]`` at each 0-based stacked position p."""
    code = _check_code(code)
    n = 3 * height * width
    pos = np.arange(n, dtype=np.int64)
    return [
        RgbImage.from_flat(code[(pos // 256**k) % 256], height, width)
        for k in range(permutation_image_count(n))
    ]


def _positions(planes, code=DIGIT_CODE) -> np.ndarray:
    # planes: (K, ...) coded digit planes of K permutation images -> 0-based source positions
    digits = np.argsort(code)[np.asarray(planes, dtype=np.int64)]
    weights = 256 ** np.arange(digits.shape[0], dtype=np.int64)
    return np.tensordot(weights, digits, axes=1)


def _s1_from_permuted(permuted: list, code=DIGIT_CODE) -> np.ndarray:
    src = _positions([img.flat() for img in permuted], code)
    if not np.array_equal(np.sort(src), np.arange(src.size)):
        raise ProtocolError("recovered positions do not form a permutation")
    return src + 1


def recover_permutation(oracle, fragment: EquivalentKey, plains=None, ciphers=None, code=DIGIT_CODE) -> np.ndarray:
    """Recover S1 given every other part of the equivalent key.

    ``fragment.s1`` is ignored.  Pass ``plains``/``ciphers`` to reuse
    already-obtained responses instead of querying; they must have been
    built with the same ``code``.
    """
    code = _check_code(code)
    h, w = fragment.shape
    if plains is None:
        plains = permutation_images(h, w, code)
    if ciphers is None:
        ciphers = [oracle.submit(p) for p in plains]
    ident = fragment_key(h, w, fragment.s3, fragment.e, fragment.d, fragment.hat_streams())
    # decrypting under the identity permutation stops at the permuted image
    return _s1_from_permuted([decrypt(c, ident) for c in ciphers], code)


def _plausible(pos, n) -> bool:
    return bool(pos.max() < n and np.unique(pos).size == pos.size)


def select_key(filt: FilterResult, s3, ciphers: list, height: int, width: int, code=DIGIT_CODE):
    """First joint candidate, in (E1, D1, E2, D2, E3, D3) order, that explains the permutation images.

    The constant images only probe r = g = b pixels, so some surviving
    green/blue hypotheses are wrong off that diagonal.  Under a wrong
    hypothesis the permutation-image ciphertexts decrypt to something that
    is not a rearrangement of the positions, which rules it out without any
    extra query.  Channels are checked one at a time so a bad red or green
    choice prunes everything beneath it.

    Returns ``(e, d, keystreams, s1)``.
    """
    code = _check_code(code)
    n = 3 * height * width
    U = [np.stack(p) for p in zip(*(partial_decrypt(c) for c in ciphers))]  # 3 x (K, L)
    s3 = np.asarray(s3, dtype=bool)
    sub, dec, enc = dna.SUB_TABLE, dna.DECODE_TABLE, dna.ENCODE_TABLE

    def dna_in(u, cand, rule):
        return enc[rule][np.stack([split_quads(row) for row in u ^ cand.keystream])]

    def to_bytes(symbols, rule):
        return np.stack([join_quads(row) for row in dec[rule][symbols]])

    reds = sorted(filt.red, key=lambda c: c.rules)
    greens = sorted(filt.green, key=lambda c: (c.rules[1], c.rules[2]))
    blues = sorted(filt.blue, key=lambda c: (c.rules[1], c.rules[2]))
    for r in reds:
        e1, d1 = r.rules
        r_star = dna_in(U[0], r, d1)
        R = np.where(s3, dna.UNCOMPLEMENT_TABLE[r_star], r_star)
        pos_r = _positions(to_bytes(R, e1), code)
        if not _plausible(pos_r, n):
            continue
        for g in greens:
            if g.rules[0] != e1:
                continue
            _, e2, d2 = g.rules
            G = sub[dna_in(U[1], g, d2), r_star]
            pos_g = _positions(to_bytes(G, e2), code)
            if not _plausible(np.concatenate([pos_r.ravel(), pos_g.ravel()]), n):
                continue
            for b in blues:
                if b.rules[0] != e2:
                    continue
                _, e3, d3 = b.rules
                B = sub[dna_in(U[2], b, d3), G]
                pos = np.concatenate([pos_r.ravel(), pos_g.ravel(), _positions(to_bytes(B, e3), code).ravel()])
                if _plausible(pos, n):
                    return (e1, e2, e3), (d1, d2, d3), (r.keystream, g.keystream, b.keystream), pos + 1
    raise ProtocolError("no candidate key explains the permutation-image ciphertexts")


def run_attack(oracle, height: int, width: int, code=DIGIT_CODE) -> AttackResult:
    """Full attack with intermediate products retained."""
    if height <= 0 or width <= 0:
        raise ShapeError("image dimensions must be positive")
    start = oracle.query_count
    consts = query_constants(oracle, height, width)
    s3 = s3_from_ciphers(consts[0], consts[255])
    red = search_red(consts, s3)
    green = search_green(consts, s3)
    blue = search_blue(consts, s3)
    log.debug("candidates: R=%d G=%d B=%d", len(red), len(green), len(blue))
    filt = filter_consistent(red, green, blue)

    plains = permutation_images(height, width, code)
    ciphers = [oracle.submit(p) for p in plains]
    e, d, ks, s1 = select_key(filt, s3, ciphers, height, width, code)
    key = fragment_key(height, width, s3, e, d, ks, s1=s1)

    verified = all(decrypt(c, key) == p for p, c in zip(plains, ciphers)) and all(
        decrypt(c, key) == RgbImage.constant(v, height, width) for v, c in consts.items()
    )
    return AttackResult(key, oracle.query_count - start, s3, (red, green, blue), filt, verified)


def full_attack(oracle, height: int, width: int, code=DIGIT_CODE) -> EquivalentKey:
    """Recover an attack-form :class:`EquivalentKey` from ``ceil(log256(3MN)) + 4`` queries."""
    res = run_attack(oracle, height, width, code)
    if not res.verified:
        raise ProtocolError("recovered key does not reproduce the oracle's responses")
    return res.key
