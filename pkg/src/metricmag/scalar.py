"""Scalar backends: exact rationals (``Fraction``) and 64-bit floats.

A matrix is *exact* when every entry is an ``int`` or ``Fraction``; a single
float entry switches the whole computation to float mode.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Union

Scalar = Union[Fraction, float]

DEFAULT_TOL = 1e-10


def is_exact(x) -> bool:
    return isinstance(x, Rational) and not isinstance(x, bool)


def all_exact(values: Iterable) -> bool:
    return all(is_exact(v) for v in values)


def as_exact(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError(f"float {x!r} cannot enter exact mode")
    return Fraction(x)


def is_zero(x, tol: float = DEFAULT_TOL) -> bool:
    if is_exact(x):
        return x == 0
    return abs(x) <= tol


def close(x, y, tol: float = DEFAULT_TOL) -> bool:
    """Equality test: exact when both sides are rational, else absolute ``tol``."""
    if is_exact(x) and is_exact(y):
        return x == y
    return abs(float(x) - float(y)) <= tol


def leq(x, y, tol: float = DEFAULT_TOL) -> bool:
    if is_exact(x) and is_exact(y):
        return x <= y
    return float(x) <= float(y) + tol


def parse_scalar(token) -> Scalar:
    """Parse ``"p/q"``, an integer literal, or a JSON number.

    Strings always parse to ``Fraction``; JSON floats stay floats.
    """
    if isinstance(token, bool):
        raise ValueError(f"not a number: {token!r}")
    if isinstance(token, int):
        return Fraction(token)
    if isinstance(token, float):
        return token
    if isinstance(token, str):
        return Fraction(token.strip())
    raise ValueError(f"not a number: {token!r}")


def format_scalar(x) -> Union[str, float]:
    """Rationals serialize as ``"p/q"`` (or ``"p"``) strings, floats as JSON numbers."""
    if is_exact(x):
        x = Fraction(x)
        return str(x)
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return repr(x)
    return x
