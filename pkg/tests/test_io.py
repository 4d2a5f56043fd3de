import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpps import RgbImage, SecretKey, derive_equivalent_key, io
from mpps.errors import ShapeError


@given(st.integers(0, 2**32 - 1), st.integers(1, 7), st.integers(1, 7))
def test_ppm_roundtrip(seed, h, w):
    img = RgbImage.random(h, w, seed)
    assert io.parse_ppm(io.ppm_bytes(img)) == img


def test_ppm_layout():
    img = RgbImage.from_hwc(np.arange(12, dtype=np.uint8).reshape(2, 2, 3))
    data = io.ppm_bytes(img)
    assert data.startswith(b"P6\n2 2\n255\n")
    assert data.endswith(bytes(range(12)))


def test_ppm_header_comments():
    data = b"P6\n# made by hand\n1 1\n255\n\x01\x02\x03"
    assert io.parse_ppm(data).flat().tolist() == [1, 2, 3]


@pytest.mark.parametrize(
    "data",
    [b"P3\n1 1\n255\n1 2 3", b"P6\n1 1\n", b"P6\n1 1\n65535\n\x00" * 2, b"P6\n2 1\n255\n\x00\x00\x00", b"P6\n0 1\n255\n"],
)
def test_bad_ppm(data):
    with pytest.raises(io.FormatError):
        io.parse_ppm(data)


def test_raw_files(tmp_path):
    img = RgbImage.random(3, 2, 5)
    io.write_raw(tmp_path / "x.rgb", img)
    assert io.read_raw(tmp_path / "x.rgb", 3, 2) == img
    with pytest.raises(ShapeError):
        io.read_raw(tmp_path / "x.rgb", 4, 2)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_secret_key_roundtrip(seed):
    key = SecretKey.random(seed)
    assert io.secret_key_from_dict(json.loads(json.dumps(io.secret_key_to_dict(key)))) == key


def test_key_files(tmp_path):
    key = SecretKey.random(3)
    io.save_key(tmp_path / "k.json", key, seed=3)
    assert io.load_key(tmp_path / "k.json") == key
    assert json.loads((tmp_path / "k.json").read_text())["seed"] == 3

    ek = derive_equivalent_key(key, 2, 3).to_attack_form()
    io.save_key(tmp_path / "e.json", ek)
    assert io.load_key(tmp_path / "e.json") == ek


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        "[1, 2]",
        '{"type": "other"}',
        '{"type": "mpps-secret-key", "subkeys": []}',
        '{"type": "mpps-secret-key", "subkeys": [{"y0": 2, "mu": 3, "transient": 1}]}',
        '{"type": "mpps-equivalent-key", "height": 1, "width": 1, "s1": [1, 2, 3]}',
        '{"type": "mpps-equivalent-key", "height": 1, "width": 1, "s1": [1, 1, 3], "s3": [0, 0, 0, 0],'
        ' "e": [0, 0, 0], "d": [0, 0, 0], "ks4": [0], "ks5": [0], "ks6": [0]}',
    ],
)
def test_bad_key_documents(tmp_path, text):
    path = tmp_path / "k.json"
    path.write_text(text)
    with pytest.raises(io.FormatError):
        io.load_key(path)
