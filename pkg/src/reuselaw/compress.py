"""Greedy library compression of simulated programs, with reuse accounting.

Wire format (accounting only; the stream itself is never materialized):

    reference  ->  2 flag bits + the component's codeword
    literal    ->  1 flag bit + one 64-bit block of program content
                   (the final block may be short; the uncompressed size is
                   known to a decoder, so no end marker is needed)

A match is taken only when it nets a positive saving, i.e. when
``body_size - (codeword_length + 2) > 0``.

Two interchangeable engines implement the scan: a compiled kernel
(reuselaw._kernel, built from Cython) and a numpy fallback.  They produce
bit-identical accounting; the compiled one is selected at import when
available.  Set REUSELAW_ENGINE=python|cython to force a choice.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _scan_py
from ._scan_py import hash_of_bits, pack_bits
from .domain import DomainSpec, Library, SimProgram, build_library, generate_program, trial_seed
from .errors import ConfigError, ValidationError

try:
    from . import _kernel
except ImportError:  # extension not built; numpy engine handles everything
    _kernel = None

REF_FLAG_BITS = 2
LITERAL_BLOCK_BITS = 64


def available_engines() -> tuple[str, ...]:
    return ("python", "cython") if _kernel is not None else ("python",)


def default_engine() -> str:
    forced = os.environ.get("REUSELAW_ENGINE", "auto").lower()
    if forced in ("python", "cython"):
        if forced == "cython" and _kernel is None:
            raise ConfigError("REUSELAW_ENGINE=cython but the compiled kernel is not built")
        return forced
    return "cython" if _kernel is not None else "python"


@dataclass(frozen=True)
class PreparedLibrary:
    """Search tables for one library, shared by both engines."""

    n_ranks: int
    lengths: tuple[int, ...]                 # distinct body sizes, descending
    values: dict[int, np.ndarray]            # per length: sorted window values/hashes
    ranks: dict[int, np.ndarray]             # per length: ranks aligned with values
    needs_verify: dict[int, bool]            # per length: hash-based (length > 64)
    bodies: dict[int, np.ndarray]            # per rank needing verification
    codeword_lengths: np.ndarray             # by rank, entry 0 unused
    body_sizes: np.ndarray                   # by rank, entry 0 unused
    # flattened copies for the compiled kernel
    k_lengths: np.ndarray
    k_table_off: np.ndarray
    k_values: np.ndarray
    k_ranks: np.ndarray
    k_needs_verify: np.ndarray
    k_body_off: np.ndarray
    k_body_len: np.ndarray
    k_body_flat: np.ndarray


def prepare_library(lib: Library) -> PreparedLibrary:
    n = len(lib)
    clens = np.zeros(n + 1, dtype=np.int64)
    sizes = np.zeros(n + 1, dtype=np.int64)
    per_length: dict[int, list[tuple[int, int]]] = {}
    bodies: dict[int, np.ndarray] = {}
    for c in lib.components:
        clens[c.rank] = len(c.codeword)
        sizes[c.rank] = c.body_size_bits
        per_length.setdefault(c.body_size_bits, []).append((hash_of_bits(c.body), c.rank))
        if c.body_size_bits > 64:
            bodies[c.rank] = c.body

    lengths = tuple(sorted(per_length, reverse=True))
    values: dict[int, np.ndarray] = {}
    ranks: dict[int, np.ndarray] = {}
    needs_verify: dict[int, bool] = {}
    k_values_parts = []
    k_ranks_parts = []
    k_table_off = np.zeros(len(lengths) + 1, dtype=np.int64)
    for li, L in enumerate(lengths):
        vals = np.array([v for v, _ in per_length[L]], dtype=np.uint64)
        rks = np.array([r for _, r in per_length[L]], dtype=np.int64)
        order = np.lexsort((rks, vals))
        values[L] = vals[order]
        ranks[L] = rks[order]
        needs_verify[L] = L > 64
        k_values_parts.append(values[L])
        k_ranks_parts.append(ranks[L])
        k_table_off[li + 1] = k_table_off[li] + vals.size

    k_body_off = np.full(n + 1, -1, dtype=np.int64)
    k_body_len = np.zeros(n + 1, dtype=np.int64)
    flat_parts = []
    off = 0
    for rank in sorted(bodies):
        b = bodies[rank]
        k_body_off[rank] = off
        k_body_len[rank] = b.size
        flat_parts.append(b)
        off += b.size

    return PreparedLibrary(
        n_ranks=n,
        lengths=lengths,
        values=values,
        ranks=ranks,
        needs_verify=needs_verify,
        bodies=bodies,
        codeword_lengths=clens,
        body_sizes=sizes,
        k_lengths=np.array(lengths, dtype=np.int64),
        k_table_off=k_table_off,
        k_values=(np.concatenate(k_values_parts) if k_values_parts
                  else np.empty(0, dtype=np.uint64)),
        k_ranks=(np.concatenate(k_ranks_parts) if k_ranks_parts
                 else np.empty(0, dtype=np.int64)),
        k_needs_verify=np.array([needs_verify[L] for L in lengths], dtype=np.uint8),
        k_body_off=k_body_off,
        k_body_len=k_body_len,
        k_body_flat=(np.concatenate(flat_parts) if flat_parts
                     else np.empty(0, dtype=np.uint8)),
    )


@dataclass(frozen=True)
class CompressionReport:
    """Per-program reuse accounting produced by compress()."""

    ratio: float                      # compressed / uncompressed
    lambda_hat: dict[int, float]      # rank -> references per compressed bit
    n_useful: int                     # distinct ranks with positive net savings
    reuse_proportion: float           # in [0, 1]
    savings: dict[int, float]         # rank -> mean bits saved per use


def compress(
    prog: SimProgram,
    lib: Library,
    engine: Optional[str] = None,
    prepared: Optional[PreparedLibrary] = None,
) -> tuple[SimProgram, CompressionReport]:
    """Greedy left-to-right longest-match compression of ``prog`` against ``lib``."""
    if prog.bits is None:
        raise ValidationError("program carries no bit content to compress")
    name = engine or default_engine()
    prep = prepared if prepared is not None else prepare_library(lib)

    bits = np.ascontiguousarray(prog.bits, dtype=np.uint8)
    s = int(bits.size)
    words = pack_bits(bits)

    if name == "cython":
        if _kernel is None:
            raise ConfigError("compiled kernel requested but not built")
        counts = np.zeros(prep.n_ranks + 1, dtype=np.int64)
        misc = np.zeros(2, dtype=np.int64)
        _kernel.scan(bits, words, s,
                     prep.k_lengths, prep.k_table_off, prep.k_values, prep.k_ranks,
                     prep.codeword_lengths, prep.k_needs_verify,
                     prep.k_body_off, prep.k_body_len, prep.k_body_flat,
                     REF_FLAG_BITS, LITERAL_BLOCK_BITS, counts, misc)
        lit_blocks, lit_content = int(misc[0]), int(misc[1])
    elif name == "python":
        counts, lit_blocks, lit_content = _scan_py.scan(
            bits, words, s, prep, REF_FLAG_BITS, LITERAL_BLOCK_BITS)
    else:
        raise ConfigError(f"unknown engine {name!r}")

    n_refs = int(counts.sum())
    codeword_bits = int((counts * prep.codeword_lengths).sum())
    escape = REF_FLAG_BITS * n_refs + lit_blocks
    compressed = lit_content + escape + codeword_bits

    refs = {int(r): int(c) for r, c in enumerate(counts) if c > 0}
    ratio = compressed / s if s else 1.0
    report = CompressionReport(
        ratio=ratio,
        lambda_hat={r: c / compressed for r, c in refs.items()},
        n_useful=len(refs),
        reuse_proportion=max(0.0, (s - compressed) / s) if s else 0.0,
        savings={
            r: float(prep.body_sizes[r] - REF_FLAG_BITS - prep.codeword_lengths[r])
            for r in refs
        },
    )
    out = SimProgram(
        uncompressed_bits=s,
        bits=prog.bits,
        tokens=prog.tokens,
        compressed_bits=compressed,
        refs=refs,
        custom_bits=lit_content,
    )
    return out, report


def run_trials(
    spec: DomainSpec,
    lib: Library,
    s: int,
    trials: int,
    engine: Optional[str] = None,
    keep_bits: bool = False,
) -> list[tuple[SimProgram, CompressionReport]]:
    """Generate and compress ``trials`` independent programs from the domain.

    Unless ``keep_bits`` is set, program payloads (bits and token logs) are
    dropped from the results to keep large experiments lean.
    """
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    prep = prepare_library(lib)
    out = []
    for t in range(trials):
        prog = generate_program(spec, lib, s, trial_seed(spec, t))
        comp, report = compress(prog, lib, engine=engine, prepared=prep)
        if not keep_bits:
            comp.bits = None
            comp.tokens = None
        out.append((comp, report))
    return out


def incompleteness_curve(
    spec: DomainSpec,
    prefixes: Sequence[int],
    s: int,
    trials: int,
    engine: Optional[str] = None,
) -> list[tuple[int, float]]:
    """Mean compression ratio against growing library prefixes.

    Each prefix size m compresses the same ``trials`` programs (drawn from the
    full domain) using only the first m components.
    """
    sizes = [int(m) for m in prefixes]
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValidationError("prefix sizes must be strictly increasing")
    if not 0.0 < spec.target_h < 1.0:
        raise ValidationError("incompleteness experiment needs 0 < target_h < 1")
    lib = build_library(spec)
    if sizes and sizes[-1] > len(lib):
        raise ValidationError("prefix size exceeds alphabet size")
    programs = [generate_program(spec, lib, s, trial_seed(spec, t)) for t in range(trials)]
    curve = []
    for m in sizes:
        prep = prepare_library(lib.prefix(m))
        ratios = []
        for prog in programs:
            _, report = compress(prog, lib.prefix(m), engine=engine, prepared=prep)
            ratios.append(report.ratio)
        curve.append((m, float(np.mean(ratios))))
    return curve


def savings_profile(reports: Sequence[CompressionReport]) -> dict[int, float]:
    """Per-rank mean of net bits saved per use across reports; unused ranks absent."""
    if not reports:
        raise ValidationError("savings profile needs at least one report")
    sums: dict[int, float] = {}
    counts: dict[int, int] = {}
    for rep in reports:
        for rank, s in rep.savings.items():
            sums[rank] = sums.get(rank, 0.0) + s
            counts[rank] = counts.get(rank, 0) + 1
    return {rank: sums[rank] / counts[rank] for rank in sorted(sums)}


def component_symbol(rank: int, alphabet_size: int) -> str:
    """Symbol name for a simulated component; zero-padded so that name order
    agrees with rank order."""
    width = len(str(alphabet_size))
    return f"comp-{rank:0{width}d}"
