"""Exact coding primitives: entropy, iterated-log identifier bounds, Kraft
sums, Shannon-Fano codebooks, and Elias-omega universal integer codes.

All functions are pure and operate on immutable values; they are safe to
call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import ValidationError

PROB_TOLERANCE = 1e-9


@dataclass(frozen=True)
class FiniteDistribution:
    """A probability distribution on a finite, indexed set of outcomes.

    Weights must be nonnegative and sum to 1 within ``PROB_TOLERANCE``.
    """

    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.weights) < 1:
            raise ValidationError("distribution needs at least one outcome")
        for i, w in enumerate(self.weights):
            if w < 0.0 or not math.isfinite(w):
                raise ValidationError(f"weight {i} is {w}, must be >= 0 and finite")
        total = math.fsum(self.weights)
        if abs(total - 1.0) > PROB_TOLERANCE:
            raise ValidationError(f"weights sum to {total!r}, not 1")
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))

    @classmethod
    def uniform(cls, k: int) -> "FiniteDistribution":
        if k < 1:
            raise ValidationError("uniform distribution needs k >= 1")
        return cls(tuple([1.0 / k] * k))

    @classmethod
    def point_mass(cls, k: int, index: int = 0) -> "FiniteDistribution":
        if not 0 <= index < k:
            raise ValidationError("point-mass index out of range")
        w = [0.0] * k
        w[index] = 1.0
        return cls(tuple(w))

    @property
    def support_size(self) -> int:
        return sum(1 for w in self.weights if w > 0.0)


def entropy(d: FiniteDistribution) -> float:
    """Shannon entropy of ``d`` in bits, with 0*log(0) taken as 0."""
    return -math.fsum(w * math.log2(w) for w in d.weights if w > 0.0)


def log_plus(n: int) -> float:
    """Iterated-logarithm sum log2(n) + log2(log2(n)) + ... over positive terms.

    This is the unique-decodability lower bound on identifier length for the
    n-th item of a countable, rank-ordered set.  log_plus(1) == 0.
    """
    if n < 1:
        raise ValidationError(f"log_plus requires n >= 1, got {n}")
    total = 0.0
    x = float(n)
    while True:
        x = math.log2(x)
        if x <= 0.0:
            return total
        total += x


def kraft_sum(lengths: Iterable[int]) -> float:
    """Sum of 2**(-l) over codeword lengths; <= 1 is necessary for unique decodability."""
    total = 0.0
    for l in lengths:
        if l < 1:
            raise ValidationError(f"codeword length {l} < 1")
        total += 2.0 ** (-l)
    return total


@dataclass(frozen=True)
class Codeword:
    """A finite bit string used as a component identifier."""

    bits: str

    def __post_init__(self):
        if len(self.bits) < 1 or any(b not in "01" for b in self.bits):
            raise ValidationError(f"codeword must be a nonempty 0/1 string, got {self.bits!r}")

    def __len__(self) -> int:
        return len(self.bits)

    @property
    def length(self) -> int:
        return len(self.bits)


@dataclass(frozen=True)
class Codebook:
    """An indexed assignment of codewords; entries may be None for outcomes
    that were given no codeword (zero-probability outcomes)."""

    entries: tuple[Optional[Codeword], ...]

    def codeword(self, index: int) -> Codeword:
        cw = self.entries[index]
        if cw is None:
            raise ValidationError(f"outcome {index} has no codeword (zero probability)")
        return cw

    def lengths(self) -> list[int]:
        return [len(cw) for cw in self.entries if cw is not None]

    def kraft_sum(self) -> float:
        return kraft_sum(self.lengths())

    def is_prefix_free(self) -> bool:
        words = sorted(cw.bits for cw in self.entries if cw is not None)
        for a, b in zip(words, words[1:]):
            if b.startswith(a):
                return False
        return True

    def lengths_nondecreasing(self) -> bool:
        ls = self.lengths()
        return all(a <= b for a, b in zip(ls, ls[1:]))

    def expected_length(self, d: FiniteDistribution) -> float:
        if len(d.weights) != len(self.entries):
            raise ValidationError("distribution and codebook sizes differ")
        total = 0.0
        for w, cw in zip(d.weights, self.entries):
            if w > 0.0:
                total += w * len(self.codeword_checked(cw))
        return total

    @staticmethod
    def codeword_checked(cw: Optional[Codeword]) -> Codeword:
        if cw is None:
            raise ValidationError("positive-probability outcome lacks a codeword")
        return cw


def _shannon_length(p: float) -> int:
    # ceil(-log2 p), snapped when p is an exact power of two; minimum 1 so
    # every codeword is addressable.
    x = -math.log2(p)
    r = round(x)
    if abs(x - r) < 1e-9:
        x = r
    return max(1, math.ceil(x))


def shannon_fano_codebook(d: FiniteDistribution) -> Codebook:
    """Prefix-free codebook with lengths max(1, ceil(-log2 p)) per outcome.

    Expected codeword length is at most entropy(d) + 1.  Zero-probability
    outcomes receive no codeword.  Ties in length are broken by index, the
    lower index getting the lexicographically smaller codeword.
    """
    lengths: list[Optional[int]] = [
        _shannon_length(w) if w > 0.0 else None for w in d.weights
    ]
    order = sorted((l, i) for i, l in enumerate(lengths) if l is not None)
    entries: list[Optional[Codeword]] = [None] * len(d.weights)
    code = 0
    prev_len = order[0][0] if order else 0
    for l, i in order:
        code <<= l - prev_len
        if code >> l:
            raise ValidationError("codeword space exhausted; Kraft sum exceeds 1")
        entries[i] = Codeword(format(code, f"0{l}b"))
        code += 1
        prev_len = l
    return Codebook(tuple(entries))


def omega_codeword(n: int) -> Codeword:
    """Elias-omega code for n >= 1.  The family is prefix-free and the length
    tracks the iterated-log bound log_plus(n) up to small additive terms."""
    if n < 1:
        raise ValidationError(f"omega code requires n >= 1, got {n}")
    parts = ["0"]
    while n > 1:
        b = format(n, "b")
        parts.append(b)
        n = len(b) - 1
    return Codeword("".join(reversed(parts)))


def omega_decode(bits: str, start: int = 0) -> tuple[int, int]:
    """Decode one omega codeword from ``bits`` starting at ``start``.

    Returns (value, position just past the codeword).  Raises on truncated
    or malformed input.
    """
    n = 1
    i = start
    while True:
        if i >= len(bits):
            raise ValidationError("truncated omega codeword")
        if bits[i] == "0":
            return n, i + 1
        width = n + 1
        if i + width > len(bits):
            raise ValidationError("truncated omega codeword")
        n = int(bits[i : i + width], 2)
        i += width


def omega_decode_stream(bits: str) -> list[int]:
    """Decode a concatenation of omega codewords back to the integer sequence."""
    out = []
    pos = 0
    while pos < len(bits):
        value, pos = omega_decode(bits, pos)
        out.append(value)
    return out
