import json
import os

import mpmath
from hypothesis import given, strategies as st

from subspace_approx.serialization import atomic_write, canonical_json, content_hash, hex_to_mpf, mpf_to_hex


def test_hex_examples():
    assert mpf_to_hex(mpmath.mpf(0)) == "0x0p+0"
    assert mpf_to_hex(mpmath.mpf(-3.25)) == "-0xdp-2"
    assert mpf_to_hex(1) == "0x1p+0"
    assert float(hex_to_mpf("0x1.8p+1")) == 3.0


def test_high_precision_values_survive_the_ambient_precision():
    with mpmath.workprec(512):
        x = mpmath.sqrt(2)
    # serialized outside the workprec block, where the default is 53 bits
    back = hex_to_mpf(mpf_to_hex(x))
    assert back == x
    assert int(back._mpf_[1]).bit_length() > 500


def test_large_integers_are_exact():
    n = 3**200 + 1
    assert int(hex_to_mpf(mpf_to_hex(n))) == n


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_round_trip(x):
    assert float(hex_to_mpf(mpf_to_hex(x))) == x


def test_canonical_json_and_hash_ignore_key_order():
    a = {"b": 1, "a": [1, 2]}
    b = {"a": [1, 2], "b": 1}
    assert canonical_json(a) == canonical_json(b) == '{"a":[1,2],"b":1}'
    assert content_hash(a) == content_hash(b)
    assert content_hash(a) != content_hash({"a": [2, 1], "b": 1})


def test_atomic_write_replaces_and_leaves_no_temp(tmp_path):
    path = tmp_path / "sub" / "out.json"
    atomic_write(path, json.dumps({"x": 1}))
    atomic_write(path, "second\n")
    assert path.read_text() == "second\n"
    assert os.listdir(path.parent) == ["out.json"]
