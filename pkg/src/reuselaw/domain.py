"""Synthetic problem domains with a tunable entropy parameter.

A domain is a mixture source over fixed-size tokens: with probability
``target_h`` the next token is a block of fresh uniform random bits
("custom code"); otherwise it is the body of a ranked library component
drawn by Zipf weight.  This makes the entropy parameter a plantable,
recoverable ground truth: the expected fraction of program bits that is
fresh randomness equals ``target_h``.

Everything here is deterministic for a fixed spec and seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .codes import Codebook, Codeword, omega_codeword
from .errors import ConfigError, ValidationError

_MAX_BODY_DRAW_ATTEMPTS = 1000

CUSTOM = "custom"
COMPONENT = "component"


@dataclass(frozen=True)
class DomainSpec:
    """Parameters of a synthetic problem domain.

    target_h:        entropy parameter in [0, 1]; fraction of fresh-random tokens.
    alphabet_size:   number of library components.
    zipf_exponent:   component weights are rank**(-zipf_exponent).
    body_size_bits:  one size for all components, or a per-rank schedule.
    seed:            64-bit seed; all derived randomness is spawned from it.
    """

    target_h: float
    alphabet_size: int
    zipf_exponent: float
    body_size_bits: Union[int, tuple[int, ...]] = 64
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.target_h <= 1.0:
            raise ValidationError(f"target_h must be in [0,1], got {self.target_h}")
        if self.alphabet_size < 1:
            raise ValidationError("alphabet_size must be >= 1")
        if not self.zipf_exponent > 0.0:
            raise ValidationError("zipf_exponent must be > 0")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValidationError("seed must fit in 64 unsigned bits")
        sizes = self.body_sizes()
        if len(sizes) != self.alphabet_size:
            raise ValidationError(
                f"body size schedule has {len(sizes)} entries for alphabet_size {self.alphabet_size}"
            )
        if any(b < 1 for b in sizes):
            raise ValidationError("body sizes must be >= 1")

    def body_sizes(self) -> tuple[int, ...]:
        if isinstance(self.body_size_bits, int):
            return tuple([self.body_size_bits] * self.alphabet_size)
        return tuple(int(b) for b in self.body_size_bits)

    def zipf_weights(self) -> np.ndarray:
        w = np.arange(1, self.alphabet_size + 1, dtype=np.float64) ** (-self.zipf_exponent)
        return w / w.sum()


@dataclass(frozen=True)
class LibraryComponent:
    rank: int
    body: np.ndarray          # uint8 array of 0/1 values, one per bit
    codeword: Codeword
    body_size_bits: int


@dataclass(frozen=True)
class Library:
    """Rank-ordered components with distinct bodies and prefix-free codewords."""

    components: tuple[LibraryComponent, ...]

    def __len__(self) -> int:
        return len(self.components)

    def codebook(self) -> Codebook:
        return Codebook(tuple(c.codeword for c in self.components))

    def prefix(self, m: int) -> "Library":
        """The first ``m`` components, as a library in its own right."""
        if not 0 <= m <= len(self.components):
            raise ValidationError(f"prefix size {m} out of range")
        return Library(self.components[:m])

    def max_body_size(self) -> int:
        return max((c.body_size_bits for c in self.components), default=0)


def _rng_for(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=key))


def library_rng(spec: DomainSpec) -> np.random.Generator:
    return _rng_for(spec.seed, 0)


def trial_seed(spec: DomainSpec, trial: int) -> np.random.SeedSequence:
    """Per-trial seed stream, stable across runs and independent across trials."""
    return np.random.SeedSequence(entropy=int(spec.seed), spawn_key=(1, int(trial)))


def build_library(spec: DomainSpec) -> Library:
    """Construct the domain's component library.

    Bodies are pseudorandom, distinct within each size class, and assigned
    Elias-omega codewords by rank.  Deterministic for a fixed spec.
    """
    sizes = spec.body_sizes()
    # Distinctness is impossible when a size class is larger than its bit space.
    by_size: dict[int, int] = {}
    for b in sizes:
        by_size[b] = by_size.get(b, 0) + 1
    for b, count in by_size.items():
        if b < 63 and count > 2 ** b:
            raise ConfigError(
                f"cannot draw {count} distinct bodies of {b} bits (only {2 ** b} exist)"
            )

    rng = library_rng(spec)
    seen: dict[int, set[bytes]] = {b: set() for b in by_size}
    components = []
    for rank, b in enumerate(sizes, start=1):
        for attempt in range(_MAX_BODY_DRAW_ATTEMPTS):
            body = rng.integers(0, 2, size=b, dtype=np.uint8)
            key = body.tobytes()
            if key not in seen[b]:
                seen[b].add(key)
                break
        else:
            raise ConfigError(
                f"could not draw a distinct {b}-bit body for rank {rank} "
                f"after {_MAX_BODY_DRAW_ATTEMPTS} attempts; increase body_size_bits"
            )
        body.setflags(write=False)
        components.append(
            LibraryComponent(rank=rank, body=body, codeword=omega_codeword(rank),
                             body_size_bits=b)
        )
    return Library(tuple(components))


@dataclass(frozen=True)
class Token:
    """Ground-truth record of one generated token."""

    kind: str                 # CUSTOM or COMPONENT
    rank: Optional[int]       # component rank, None for custom tokens
    offset: int               # bit offset in the program
    size_bits: int


@dataclass
class SimProgram:
    """A simulated program: uncompressed bits plus, after compression,
    the accounting of the compressed form."""

    uncompressed_bits: int
    bits: Optional[np.ndarray] = None            # uint8 0/1 per bit
    tokens: Optional[tuple[Token, ...]] = None   # generation ground truth
    compressed_bits: Optional[int] = None
    refs: Optional[dict[int, int]] = None        # rank -> reference count
    custom_bits: Optional[int] = None            # literal (non-library) content bits


def generate_program(
    spec: DomainSpec,
    lib: Library,
    s: int,
    seed: Union[int, np.random.SeedSequence, np.random.Generator],
) -> SimProgram:
    """Draw one uncompressed program of about ``s`` bits from the domain.

    The program is an i.i.d. token stream: custom tokens with probability
    ``target_h`` (fresh uniform bits, sized at the mean body size) and
    component bodies otherwise, drawn by Zipf weight.  Token boundaries are
    recorded as ground truth.
    """
    if len(lib) == 0:
        raise ValidationError("cannot generate from an empty library")
    max_body = lib.max_body_size()
    if s < max_body:
        raise ValidationError(f"program size {s} is below the largest body ({max_body} bits)")

    if isinstance(seed, np.random.Generator):
        rng = seed
    else:
        rng = np.random.default_rng(seed)

    sizes = spec.body_sizes()
    custom_size = max(1, int(round(sum(sizes) / len(sizes))))
    mean_size = custom_size * spec.target_h + (1.0 - spec.target_h) * (sum(sizes) / len(sizes))
    n_tokens = max(1, int(round(s / mean_size)))

    is_custom = rng.random(n_tokens) < spec.target_h
    n_custom = int(is_custom.sum())
    n_comp = n_tokens - n_custom
    ranks = np.empty(0, dtype=np.int64)
    if n_comp:
        ranks = rng.choice(spec.alphabet_size, size=n_comp, p=spec.zipf_weights()) + 1
    payload = rng.integers(0, 2, size=n_custom * custom_size, dtype=np.uint8)

    pieces: list[np.ndarray] = []
    tokens: list[Token] = []
    offset = 0
    ci = 0
    ri = 0
    for t in range(n_tokens):
        if is_custom[t]:
            piece = payload[ci * custom_size : (ci + 1) * custom_size]
            ci += 1
            tokens.append(Token(CUSTOM, None, offset, custom_size))
        else:
            rank = int(ranks[ri])
            ri += 1
            piece = lib.components[rank - 1].body
            tokens.append(Token(COMPONENT, rank, offset, len(piece)))
        pieces.append(piece)
        offset += len(piece)

    bits = np.concatenate(pieces) if pieces else np.empty(0, dtype=np.uint8)
    return SimProgram(uncompressed_bits=int(bits.size), bits=bits, tokens=tuple(tokens))


def planted_fraction(prog: SimProgram) -> float:
    """Fraction of program bits covered by planted component bodies (ground truth)."""
    if prog.tokens is None or prog.uncompressed_bits == 0:
        raise ValidationError("program carries no token log")
    planted = sum(t.size_bits for t in prog.tokens if t.kind == COMPONENT)
    return planted / prog.uncompressed_bits


def estimate_entropy_parameter(
    source: Union[DomainSpec, Sequence[Token]],
    s0_schedule: Sequence[int],
) -> float:
    """Estimate the domain entropy parameter from a token stream.

    At each schedule point s0 the estimate is the plug-in entropy of the
    token stream prefix of at most s0 bits, normalized by s0: component
    tokens contribute through the empirical distribution over identities,
    and custom tokens additionally contribute their payload size (they are
    fresh uniform bits by construction, one bit of entropy each).  The
    running maximum over the schedule is returned, echoing the limit-superior
    character of the parameter.
    """
    if len(s0_schedule) == 0:
        raise ValidationError("empty s0 schedule")
    sched = [int(x) for x in s0_schedule]
    if any(b <= a for a, b in zip(sched, sched[1:])) or sched[0] < 1:
        raise ValidationError("s0 schedule must be positive and strictly increasing")

    if isinstance(source, DomainSpec):
        lib = build_library(source)
        prog = generate_program(source, lib, max(sched), trial_seed(source, 0))
        tokens: Sequence[Token] = prog.tokens or ()
    else:
        tokens = source
    if len(tokens) == 0:
        raise ValidationError("empty token stream")
    total_bits = sum(t.size_bits for t in tokens)

    best = 0.0
    for s0 in sched:
        cum = 0
        counts: dict[object, int] = {}
        custom_payload = 0
        n = 0
        for tok in tokens:
            if cum + tok.size_bits > s0:
                break
            cum += tok.size_bits
            n += 1
            key = tok.rank if tok.kind == COMPONENT else CUSTOM
            counts[key] = counts.get(key, 0) + 1
            if tok.kind == CUSTOM:
                custom_payload += tok.size_bits
        if n == 0:
            continue
        ident_entropy = -sum(
            (c / n) * math.log2(c / n) for c in counts.values()
        )
        est = (n * ident_entropy + custom_payload) / min(s0, total_bits)
        best = max(best, est)
    return min(best, 1.0)
