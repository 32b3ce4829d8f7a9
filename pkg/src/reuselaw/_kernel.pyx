# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled engine for the greedy longest-match scan.

Walks the program block by block, extracting bit windows straight from the
packed word array and binary-searching the per-length body tables.  Produces
accounting identical to the pure-Python engine in _scan_py.
"""

ctypedef unsigned long long u64
ctypedef long long i64

cdef u64 FNV_OFFSET = 0xCBF29CE484222325ULL
cdef u64 FNV_PRIME = 0x100000001B3ULL


cdef inline u64 _window(const u64[::1] words, i64 i, i64 width) nogil:
    cdef i64 q = i >> 6
    cdef i64 r = i & 63
    cdef u64 hi = words[q] << r if r else words[q]
    cdef u64 lo = (words[q + 1] >> (64 - r)) if r else 0
    return (hi | lo) >> (64 - width)


cdef inline u64 _chunked_hash(const u64[::1] words, i64 i, i64 length) nogil:
    cdef u64 h = FNV_OFFSET
    cdef i64 off = 0
    cdef i64 width
    while off < length:
        width = length - off
        if width > 64:
            width = 64
        h = (h ^ _window(words, i + off, width)) * FNV_PRIME
        off += width
    return h


cdef inline i64 _bsearch(const u64[::1] values, i64 lo, i64 hi, u64 v) nogil:
    cdef i64 mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if values[mid] < v:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef inline bint _verify(const unsigned char[::1] bits, i64 i,
                         const unsigned char[::1] body_flat, i64 off, i64 length) nogil:
    cdef i64 k
    for k in range(length):
        if bits[i + k] != body_flat[off + k]:
            return False
    return True


def scan(const unsigned char[::1] bits,
         const u64[::1] words,
         i64 s,
         const i64[::1] lengths,
         const i64[::1] table_off,
         const u64[::1] values_flat,
         const i64[::1] ranks_flat,
         const i64[::1] clens,
         const unsigned char[::1] needs_verify,
         const i64[::1] body_off,
         const i64[::1] body_len,
         const unsigned char[::1] body_flat,
         i64 ref_flag_bits,
         i64 block_bits,
         i64[::1] counts_out,
         i64[::1] misc_out):
    cdef i64 i = 0
    cdef i64 lit_blocks = 0
    cdef i64 lit_content = 0
    cdef i64 n_lengths = lengths.shape[0]
    cdef i64 li, L, lo, hi, pos, rank, adv
    cdef u64 v
    cdef bint took

    with nogil:
        while i < s:
            took = False
            for li in range(n_lengths):
                L = lengths[li]
                if i + L > s:
                    continue
                if L <= 64:
                    v = _window(words, i, L)
                else:
                    v = _chunked_hash(words, i, L)
                lo = table_off[li]
                hi = table_off[li + 1]
                pos = _bsearch(values_flat, lo, hi, v)
                # walk the (normally length-1) run of equal table values
                while pos < hi and values_flat[pos] == v:
                    rank = ranks_flat[pos]
                    pos += 1
                    if L - (ref_flag_bits + clens[rank]) <= 0:
                        continue
                    if needs_verify[li]:
                        if not _verify(bits, i, body_flat, body_off[rank], body_len[rank]):
                            continue
                    counts_out[rank] += 1
                    i += L
                    took = True
                    break
                if took:
                    break
            if not took:
                adv = s - i
                if adv > block_bits:
                    adv = block_bits
                lit_blocks += 1
                lit_content += adv
                i += adv
    misc_out[0] = lit_blocks
    misc_out[1] = lit_content
