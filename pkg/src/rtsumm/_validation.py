"""Small argument checkers shared by the estimators and config types."""

from __future__ import annotations

import numbers
import random


def check_positive(value, name: str, *, integer: bool = False, strict: bool = True):
    if integer:
        if isinstance(value, bool) or not isinstance(value, numbers.Integral):
            raise TypeError(f"{name} must be an integer, got {value!r}")
    elif isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise TypeError(f"{name} must be a number, got {value!r}")
    if value != value:  # NaN
        raise ValueError(f"{name} must not be NaN")
    if strict and value <= 0:
        raise ValueError(f"{name} must be > 0, got {value!r}")
    if not strict and value < 0:
        raise ValueError(f"{name} must be >= 0, got {value!r}")
    return value


def check_probability(value, name: str) -> float:
    check_positive(value, name, strict=False)
    if value > 1:
        raise ValueError(f"{name} must be in [0, 1], got {value!r}")
    return float(value)


def check_choice(value, name: str, choices) -> str:
    if value not in choices:
        raise ValueError(f"{name} must be one of {sorted(choices)}, got {value!r}")
    return value


def check_text_list(X, name: str = "X") -> list[str]:
    """Coerce an iterable of documents to a list of ``str``.

    A bare string is rejected: it would otherwise be iterated per character.
    """
    if isinstance(X, (str, bytes)):
        raise TypeError(f"{name} must be an iterable of strings, not a single string")
    docs = list(X)
    for i, doc in enumerate(docs):
        if not isinstance(doc, str):
            raise TypeError(f"{name}[{i}] must be str, got {type(doc).__name__}")
    return docs


def check_rng(seed) -> random.Random:
    """Turn None, an int seed, or an existing ``random.Random`` into a generator."""
    if isinstance(seed, random.Random):
        return seed
    if seed is None or (isinstance(seed, numbers.Integral) and not isinstance(seed, bool)):
        return random.Random(seed)
    raise TypeError(f"seed must be None, an int or random.Random, got {seed!r}")
