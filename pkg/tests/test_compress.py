"""Compressor tests: hand-traced accounting, engine parity, and the
law-of-large-numbers behavior of the mixture construction."""

import math

import numpy as np
import pytest

from reuselaw.codes import omega_codeword
from reuselaw.compress import (LITERAL_BLOCK_BITS, REF_FLAG_BITS,
                               available_engines, compress,
                               incompleteness_curve, prepare_library,
                               run_trials, savings_profile)
from reuselaw.domain import (DomainSpec, Library, LibraryComponent, SimProgram,
                             build_library, generate_program, trial_seed)
from reuselaw.errors import ValidationError

ENGINES = available_engines()


def spec_with(**kw):
    base = dict(target_h=0.5, alphabet_size=1024, zipf_exponent=2.0,
                body_size_bits=64, seed=404)
    base.update(kw)
    return DomainSpec(**base)


@pytest.mark.parametrize("engine", ENGINES)
class TestHandTraces:
    def test_single_body_program(self, engine):
        # One 32-bit rank-1 body: reference flag (2) + codeword "0" (1) = 3 bits.
        spec = spec_with(target_h=0.0, alphabet_size=4, body_size_bits=32, seed=7)
        lib = build_library(spec)
        prog = SimProgram(uncompressed_bits=32, bits=lib.components[0].body)
        out, rep = compress(prog, lib, engine=engine)
        assert out.compressed_bits == 3
        assert out.refs == {1: 1}
        assert out.custom_bits == 0
        assert rep.ratio == pytest.approx(3 / 32)
        assert rep.savings == {1: 29.0}
        assert rep.n_useful == 1

    def test_two_bodies_back_to_back(self, engine):
        spec = spec_with(target_h=0.0, alphabet_size=4, body_size_bits=32, seed=7)
        lib = build_library(spec)
        bits = np.concatenate([lib.components[1].body, lib.components[0].body])
        out, rep = compress(SimProgram(64, bits=bits), lib, engine=engine)
        # rank 2 codeword "100" (3 bits) + rank 1 "0" (1 bit) + 2*2 flag bits
        assert out.refs == {1: 1, 2: 1}
        assert out.compressed_bits == (2 + 3) + (2 + 1)
        assert rep.savings == {1: 29.0, 2: 27.0}

    def test_pure_literal_program(self, engine):
        spec = spec_with(alphabet_size=4, body_size_bits=64, seed=3)
        lib = build_library(spec)
        rng = np.random.default_rng(1)
        # avoid accidental matches: flip bits of a body so nothing aligns
        bits = rng.integers(0, 2, size=1000, dtype=np.uint8)
        out, rep = compress(SimProgram(1000, bits=bits), lib, engine=engine)
        if out.refs == {}:
            blocks = math.ceil(1000 / LITERAL_BLOCK_BITS)
            assert out.compressed_bits == 1000 + blocks
            assert out.custom_bits == 1000

    def test_accounting_identity(self, engine):
        spec = spec_with()
        lib = build_library(spec)
        prep = prepare_library(lib)
        prog = generate_program(spec, lib, 20_000, trial_seed(spec, 0))
        out, rep = compress(prog, lib, engine=engine, prepared=prep)
        codeword_bits = sum(len(omega_codeword(r)) * c for r, c in out.refs.items())
        n_refs = sum(out.refs.values())
        escape = out.compressed_bits - out.custom_bits - codeword_bits
        blocks = escape - REF_FLAG_BITS * n_refs
        assert blocks >= math.ceil(out.custom_bits / LITERAL_BLOCK_BITS)
        assert out.compressed_bits == out.custom_bits + escape + codeword_bits

    def test_never_worse_than_all_literal(self, engine):
        spec = spec_with(target_h=1.0)
        lib = build_library(spec)
        prog = generate_program(spec, lib, 50_000, trial_seed(spec, 2))
        out, rep = compress(prog, lib, engine=engine)
        s = out.uncompressed_bits
        assert out.compressed_bits <= s + math.ceil(s / LITERAL_BLOCK_BITS)
        assert 0.0 <= rep.reuse_proportion <= 1.0


class TestEngineParity:
    @pytest.mark.skipif(len(ENGINES) < 2, reason="compiled kernel not built")
    @pytest.mark.parametrize("kw,s", [
        (dict(), 100_000),
        (dict(target_h=1.0), 50_000),
        (dict(target_h=0.1, alphabet_size=64, zipf_exponent=1.0), 30_000),
        (dict(alphabet_size=32, body_size_bits=tuple([48] * 16 + [96] * 16)), 40_000),
        (dict(alphabet_size=5, body_size_bits=(64, 64, 128, 160, 200)), 20_000),
    ])
    def test_engines_agree(self, kw, s):
        spec = spec_with(**kw)
        lib = build_library(spec)
        prep = prepare_library(lib)
        for t in range(3):
            prog = generate_program(spec, lib, s, trial_seed(spec, t))
            a, ra = compress(prog, lib, engine="python", prepared=prep)
            b, rb = compress(prog, lib, engine="cython", prepared=prep)
            assert a.compressed_bits == b.compressed_bits
            assert a.refs == b.refs
            assert a.custom_bits == b.custom_bits
            assert ra == rb


class TestUniformCase:
    def test_random_program_is_not_compressible(self):
        # brute-force oracle: no library body occurs anywhere in the program
        spec = spec_with(target_h=1.0, alphabet_size=16, seed=77)
        lib = build_library(spec)
        prog = generate_program(spec, lib, 8192, trial_seed(spec, 0))
        hay = "".join(map(str, prog.bits.tolist()))
        for comp in lib.components:
            needle = "".join(map(str, comp.body.tolist()))
            assert needle not in hay
        out, rep = compress(prog, lib)
        assert out.refs == {}
        assert rep.reuse_proportion < 0.05
        assert rep.n_useful == 0

    def test_large_uniform_reuse_negligible(self):
        spec = spec_with(target_h=1.0)
        lib = build_library(spec)
        rs = run_trials(spec, lib, 100_000, 5)
        assert all(rep.reuse_proportion < 0.05 for _, rep in rs)


class TestMixtureRatios:
    def test_quarter_h_corpus_ratio(self):
        spec = spec_with(target_h=0.25, seed=808)
        lib = build_library(spec)
        rs = run_trials(spec, lib, 100_000, 20)
        mean_ratio = float(np.mean([rep.ratio for _, rep in rs]))
        assert 0.25 <= mean_ratio <= 0.35

    def test_reuse_bounded_by_one_minus_h(self):
        for h in (0.25, 0.5, 0.75):
            spec = spec_with(target_h=h, seed=900 + int(h * 100))
            lib = build_library(spec)
            rs = run_trials(spec, lib, 100_000, 10)
            mean_reuse = float(np.mean([rep.reuse_proportion for _, rep in rs]))
            assert mean_reuse <= 1.0 - h + 0.05

    def test_determinism(self):
        spec = spec_with()
        lib = build_library(spec)
        a = run_trials(spec, lib, 20_000, 3)
        b = run_trials(spec, lib, 20_000, 3)
        assert [(p.compressed_bits, p.refs) for p, _ in a] == \
               [(p.compressed_bits, p.refs) for p, _ in b]
        assert [r for _, r in a] == [r for _, r in b]


class TestIncompleteness:
    def test_empty_prefix_compresses_nothing(self):
        spec = spec_with()
        curve = incompleteness_curve(spec, [0], 20_000, 5)
        (m, ratio), = curve
        assert m == 0
        assert ratio == pytest.approx(1.0, abs=0.05)

    def test_full_prefix_matches_direct_runs(self):
        spec = spec_with(alphabet_size=64)
        lib = build_library(spec)
        curve = incompleteness_curve(spec, [64], 20_000, 5)
        direct = run_trials(spec, lib, 20_000, 5)
        assert curve[0][1] == pytest.approx(
            float(np.mean([rep.ratio for _, rep in direct])), abs=1e-12)

    def test_prefixes_must_increase(self):
        with pytest.raises(ValidationError):
            incompleteness_curve(spec_with(), [4, 4], 20_000, 2)

    def test_needs_intermediate_h(self):
        with pytest.raises(ValidationError):
            incompleteness_curve(spec_with(target_h=1.0), [1, 2], 20_000, 2)


class TestSavingsProfile:
    def test_single_report(self):
        spec = spec_with(target_h=0.0, alphabet_size=4, body_size_bits=32, seed=7)
        lib = build_library(spec)
        prog = SimProgram(uncompressed_bits=32, bits=lib.components[0].body)
        _, rep = compress(prog, lib)
        assert savings_profile([rep]) == {1: 29.0}

    def test_equal_bodies_savings_decrease_with_codeword_length(self):
        spec = spec_with(target_h=0.0, alphabet_size=16, seed=15)
        lib = build_library(spec)
        rs = run_trials(spec, lib, 50_000, 4)
        profile = savings_profile([rep for _, rep in rs])
        ranks = sorted(profile)
        for a, b in zip(ranks, ranks[1:]):
            assert profile[a] >= profile[b]
        for r in ranks:
            assert profile[r] == 64 - REF_FLAG_BITS - len(omega_codeword(r))

    def test_unused_rank_absent(self):
        spec = spec_with(target_h=0.0, alphabet_size=4, body_size_bits=32, seed=7)
        lib = build_library(spec)
        prog = SimProgram(uncompressed_bits=32, bits=lib.components[0].body)
        _, rep = compress(prog, lib)
        assert 2 not in savings_profile([rep])

    def test_empty_reports_rejected(self):
        with pytest.raises(ValidationError):
            savings_profile([])
