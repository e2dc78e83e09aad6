"""Bit-exact number formats, canonical JSON and atomic file writes."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path

import mpmath


def mpf_to_hex(x) -> str:
    """Exact hexadecimal float text for an mpf (or float), e.g. '-0x1ap-3'."""
    if not isinstance(x, mpmath.mpf):
        # converting an mpf would round it to the ambient precision
        bits = x.bit_length() if isinstance(x, int) else 0
        with mpmath.workprec(max(64, bits)):
            x = mpmath.mpf(x)
    if x == 0:
        return "0x0p+0"
    if not mpmath.isfinite(x):
        return str(x)
    sign, man, exp, _ = x._mpf_
    text = f"0x{int(man):x}p{int(exp):+d}"
    return "-" + text if sign else text


def hex_to_mpf(text: str, prec: int | None = None):
    """Parse the output of mpf_to_hex without rounding (unless prec is given)."""
    text = text.strip()
    negative = text.startswith("-")
    body = text.lstrip("+-")
    mantissa, _, exponent = body.lower().partition("p")
    if not mantissa.startswith("0x"):
        raise ValueError(f"not a hex float: {text!r}")
    digits = mantissa[2:]
    if "." in digits:
        whole, frac = digits.split(".")
        man = int(whole + frac or "0", 16)
        exp = int(exponent or "0") - 4 * len(frac)
    else:
        man = int(digits, 16)
        exp = int(exponent or "0")
    bits = max(man.bit_length(), 1)
    with mpmath.workprec(max(bits, prec or bits)):
        value = mpmath.ldexp(mpmath.mpf(-man if negative else man), exp)
    return value


def to_mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def content_hash(data) -> str:
    return hashlib.sha256(canonical_json(data).encode()).hexdigest()


def atomic_write(path, text: str) -> None:
    """Write text next to the destination, then rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
