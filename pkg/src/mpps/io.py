"""Binary PPM images and JSON key documents.

PPM files are P6 with maxval 255.  Key documents::

    secret key:      {"type": "mpps-secret-key", "s3_quantizer": "parity",
                      "subkeys": [{"y0": .., "mu": .., "transient": ..}, x6],
                      "seed": optional int}
    equivalent key:  {"type": "mpps-equivalent-key", "height": M, "width": N,
                      "form": "native" | "attack", "s1": [...], "s3": [...],
                      "e": [E1, E2, E3], "d": [D1, D2, D3],
                      "ks4": [...], "ks5": [...], "ks6": [...]}

Floats are written with ``repr`` semantics by the json module, so secret
keys round-trip bit-exactly.
"""
from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from .chaos import SubKey
from .cipher import EquivalentKey, RgbImage, SecretKey
from .errors import ParameterError, ShapeError

__all__ = [
    "FormatError",
    "read_ppm",
    "write_ppm",
    "ppm_bytes",
    "parse_ppm",
    "read_raw",
    "write_raw",
    "secret_key_to_dict",
    "secret_key_from_dict",
    "equivalent_key_to_dict",
    "equivalent_key_from_dict",
    "load_key",
    "save_key",
]


class FormatError(ValueError):
    """Malformed PPM or key document."""


_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n)*(\d+)")


def parse_ppm(data: bytes) -> RgbImage:
    if data[:2] != b"P6":
        raise FormatError("not a binary PPM (missing P6 magic)")
    pos = 2
    fields = []
    for _ in range(3):
        m = _TOKEN.match(data, pos)
        if not m:
            raise FormatError("truncated PPM header")
        fields.append(int(m.group(1)))
        pos = m.end()
    width, height, maxval = fields
    if maxval != 255:
        raise FormatError(f"only maxval 255 is supported, got {maxval}")
    if width <= 0 or height <= 0:
        raise FormatError("PPM dimensions must be positive")
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise FormatError("missing whitespace after PPM header")
    pos += 1
    n = width * height * 3
    body = data[pos : pos + n]
    if len(body) != n:
        raise FormatError(f"PPM body has {len(body)} bytes, expected {n}")
    return RgbImage.from_hwc(np.frombuffer(body, dtype=np.uint8).reshape(height, width, 3))


def ppm_bytes(img: RgbImage) -> bytes:
    return b"P6\n%d %d\n255\n" % (img.width, img.height) + img.to_hwc().tobytes()


def read_ppm(path) -> RgbImage:
    return parse_ppm(Path(path).read_bytes())


def write_ppm(path, img: RgbImage) -> None:
    Path(path).write_bytes(ppm_bytes(img))


def read_raw(path, height: int, width: int) -> RgbImage:
    """Headerless interleaved RGB bytes."""
    data = Path(path).read_bytes()
    if len(data) != height * width * 3:
        raise ShapeError(f"raw file has {len(data)} bytes, a {height}x{width} image needs {height * width * 3}")
    return RgbImage.from_hwc(np.frombuffer(data, dtype=np.uint8).reshape(height, width, 3))


def write_raw(path, img: RgbImage) -> None:
    Path(path).write_bytes(img.to_hwc().tobytes())


def secret_key_to_dict(key: SecretKey, seed=None) -> dict:
    doc = {
        "type": "mpps-secret-key",
        "s3_quantizer": key.s3_quantizer,
        "subkeys": [{"y0": k.y0, "mu": k.mu, "transient": k.transient} for k in key.subkeys],
    }
    if seed is not None:
        doc["seed"] = seed
    return doc


def secret_key_from_dict(doc: dict) -> SecretKey:
    try:
        subs = [SubKey(float(s["y0"]), float(s["mu"]), int(s["transient"])) for s in doc["subkeys"]]
        if len(subs) != 6:
            raise FormatError(f"secret key needs six subkeys, got {len(subs)}")
        return SecretKey(*subs, s3_quantizer=doc.get("s3_quantizer", "parity"))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed secret key document: {exc}") from exc
    except ParameterError as exc:
        raise FormatError(str(exc)) from exc


def equivalent_key_to_dict(key: EquivalentKey) -> dict:
    return {
        "type": "mpps-equivalent-key",
        "height": key.height,
        "width": key.width,
        "form": key.form,
        "s1": key.s1.tolist(),
        "s3": key.s3.tolist(),
        "e": list(key.e),
        "d": list(key.d),
        "ks4": key.ks4.tolist(),
        "ks5": key.ks5.tolist(),
        "ks6": key.ks6.tolist(),
    }


def equivalent_key_from_dict(doc: dict) -> EquivalentKey:
    try:
        return EquivalentKey(
            int(doc["height"]),
            int(doc["width"]),
            np.asarray(doc["s1"], dtype=np.int64),
            np.asarray(doc["s3"], dtype=np.uint8),
            tuple(doc["e"]),
            tuple(doc["d"]),
            doc["ks4"],
            doc["ks5"],
            doc["ks6"],
            form=doc.get("form", "native"),
        )
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed equivalent key document: {exc}") from exc
    except (ParameterError, ShapeError) as exc:
        raise FormatError(str(exc)) from exc


def load_key(path):
    """Read either key type; dispatches on the ``type`` field."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise FormatError(f"{path}: key document must be a JSON object")
    kind = doc.get("type")
    if kind == "mpps-secret-key":
        return secret_key_from_dict(doc)
    if kind == "mpps-equivalent-key":
        return equivalent_key_from_dict(doc)
    raise FormatError(f"{path}: unknown key type {kind!r}")


def save_key(path, key, seed=None) -> None:
    if isinstance(key, SecretKey):
        doc = secret_key_to_dict(key, seed)
    elif isinstance(key, EquivalentKey):
        doc = equivalent_key_to_dict(key)
    else:
        raise TypeError(f"cannot serialise {type(key).__name__}")
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")
