"""Pure-Python (numpy) engine for the greedy longest-match scan.

Semantics are identical to the compiled kernel in ``_kernel.pyx``: the scan
walks the program left to right; at each reachable position it takes the
longest library body that matches and nets a positive saving, otherwise it
emits one fixed-size literal block and moves on.  This engine vectorizes the
candidate search and jumps over literal stretches in one step instead of
walking block by block; the resulting accounting is bit-identical.
"""

from __future__ import annotations

import numpy as np

FNV_OFFSET = np.uint64(0xCBF29CE484222325)
FNV_PRIME = np.uint64(0x100000001B3)


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a 0/1 uint8 array into big-endian uint64 words, padded with one
    extra zero word so window extraction never indexes past the end."""
    n_words = (bits.size + 63) // 64 + 1
    padded = np.zeros(n_words * 64, dtype=np.uint8)
    padded[: bits.size] = bits
    packed = np.packbits(padded)
    return packed.view(">u8").astype(np.uint64)


def windows_at(words: np.ndarray, positions: np.ndarray, width: int) -> np.ndarray:
    """Bit windows of ``width`` (<= 64) starting at each position, as integers."""
    q, r = np.divmod(positions.astype(np.int64), 64)
    r = r.astype(np.uint64)
    hi = words[q] << r
    lo = np.zeros(positions.size, dtype=np.uint64)
    m = r > 0
    if m.any():
        lo[m] = words[q[m] + 1] >> (np.uint64(64) - r[m])
    return (hi | lo) >> np.uint64(64 - width)


def chunked_hashes_at(words: np.ndarray, positions: np.ndarray, length: int) -> np.ndarray:
    """FNV-1a fold over the 64-bit chunks of each window of ``length`` > 64 bits."""
    h = np.full(positions.size, FNV_OFFSET, dtype=np.uint64)
    off = 0
    while off < length:
        width = min(64, length - off)
        c = windows_at(words, positions + off, width)
        h = (h ^ c) * FNV_PRIME
        off += width
    return h


def hash_of_bits(bits: np.ndarray) -> int:
    """Hash a whole bit array with the same scheme the scan uses for windows."""
    words = pack_bits(bits)
    if bits.size <= 64:
        return int(windows_at(words, np.zeros(1, dtype=np.int64), bits.size)[0])
    return int(chunked_hashes_at(words, np.zeros(1, dtype=np.int64), bits.size)[0])


def scan(bits, words, s, prep, ref_flag_bits, block_bits):
    """Run the greedy scan; returns (counts by rank, literal blocks, literal bits).

    ``prep`` is a compress.PreparedLibrary.
    """
    counts = np.zeros(prep.n_ranks + 1, dtype=np.int64)
    lit_blocks = 0
    lit_content = 0
    if s <= 0:
        return counts, lit_blocks, lit_content

    # Candidate positions per length, merged into a position -> [(L, rank)] map
    # (longest first) plus per-residue position arrays for jumping.
    cand: dict[int, list[tuple[int, int]]] = {}
    pos_arrays = []
    for L in prep.lengths:  # descending
        npos = s - L + 1
        if npos <= 0:
            continue
        positions = np.arange(npos, dtype=np.int64)
        if L <= 64:
            vals = windows_at(words, positions, L)
        else:
            vals = chunked_hashes_at(words, positions, L)
        table_vals = prep.values[L]
        table_ranks = prep.ranks[L]
        idx = np.searchsorted(table_vals, vals)
        idx[idx == table_vals.size] = table_vals.size - 1
        hit = table_vals[idx] == vals
        hit_pos = positions[hit]
        for p, k in zip(hit_pos.tolist(), idx[hit].tolist()):
            # walk the (normally length-1) run of equal table values
            v = table_vals[k]
            lst = cand.setdefault(p, [])
            while k < table_vals.size and table_vals[k] == v:
                lst.append((L, int(table_ranks[k])))
                k += 1
        pos_arrays.append(hit_pos)

    if pos_arrays:
        all_pos = np.unique(np.concatenate(pos_arrays))
    else:
        all_pos = np.empty(0, dtype=np.int64)
    by_res = [all_pos[all_pos % block_bits == r] for r in range(block_bits)]

    clens = prep.codeword_lengths
    i = 0
    while i < s:
        took = False
        for L, rank in cand.get(i, ()):
            if L - (ref_flag_bits + int(clens[rank])) <= 0:
                continue
            if prep.needs_verify[L] and not np.array_equal(
                bits[i : i + L], prep.bodies[rank]
            ):
                continue
            counts[rank] += 1
            i += L
            took = True
            break
        if took:
            continue
        arr = by_res[i % block_bits]
        j = int(np.searchsorted(arr, i + 1))
        nxt = int(arr[j]) if j < arr.size else s
        stop = min(nxt, s)
        span = stop - i
        full, tail = divmod(span, block_bits)
        lit_blocks += full + (1 if tail else 0)
        lit_content += span
        i = stop
    return counts, lit_blocks, lit_content
