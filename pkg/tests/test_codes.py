"""Tests for the coding primitives, with independently computed oracles."""

import math
from fractions import Fraction

import numpy as np
import pytest

from reuselaw.codes import (Codebook, Codeword, FiniteDistribution, entropy,
                            kraft_sum, log_plus, omega_codeword, omega_decode,
                            omega_decode_stream, shannon_fano_codebook)
from reuselaw.errors import ValidationError


# --- independent reference decoder (recursive, straight from the code's
# --- defining recursion) used as the oracle for the iterative encoder

def _reference_omega_decode(bits):
    def rec(s, n):
        if s[0] == "0":
            return n, s[1:]
        value = int(s[: n + 1], 2)
        return rec(s[n + 1:], value)

    out = []
    rest = bits
    while rest:
        value, rest = rec(rest, 1)
        out.append(value)
    return out


class TestLogPlus:
    def test_one_is_zero(self):
        assert log_plus(1) == 0.0

    def test_sixteen(self):
        assert log_plus(16) == pytest.approx(7.0, abs=1e-12)

    def test_256_iterated_oracle(self):
        # direct evaluation of the iterated sum, stopping at the first
        # non-positive term
        t1 = math.log2(256)
        t2 = math.log2(t1)
        t3 = math.log2(t2)
        t4 = math.log2(t3)
        assert t4 > 0 and math.log2(t4) <= 0
        assert log_plus(256) == pytest.approx(t1 + t2 + t3 + t4, abs=1e-12)
        assert log_plus(256) == pytest.approx(13.249, abs=1e-3)

    def test_zero_rejected(self):
        with pytest.raises(ValidationError):
            log_plus(0)

    def test_nondecreasing_and_dominates_log2(self):
        prev = log_plus(2)
        for n in range(2, 4000):
            cur = log_plus(n)
            assert cur >= prev - 1e-12
            assert cur >= math.log2(n)
            prev = cur


class TestEntropy:
    def test_uniform_eight(self):
        assert entropy(FiniteDistribution.uniform(8)) == pytest.approx(3.0)

    def test_point_mass(self):
        assert entropy(FiniteDistribution.point_mass(5, 2)) == 0.0

    def test_half_quarter_quarter(self):
        d = FiniteDistribution((0.5, 0.25, 0.25))
        assert entropy(d) == pytest.approx(1.5)

    def test_invalid_sum_rejected(self):
        with pytest.raises(ValidationError):
            FiniteDistribution((0.5, 0.4))

    def test_negative_weight_rejected(self):
        with pytest.raises(ValidationError):
            FiniteDistribution((1.2, -0.2))

    def test_bounded_by_log_support(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            k = int(rng.integers(1, 64))
            w = rng.dirichlet(np.ones(k))
            d = FiniteDistribution(tuple(w / w.sum()))
            assert entropy(d) <= math.log2(k) + 1e-9

    def test_uniform_attains_log_support(self):
        for k in (1, 2, 3, 17, 256):
            assert entropy(FiniteDistribution.uniform(k)) == pytest.approx(
                math.log2(k), abs=1e-9)


class TestKraft:
    def test_complete_code(self):
        assert kraft_sum([1, 2, 2]) == 1.0

    def test_violating_lengths(self):
        assert kraft_sum([1, 1, 1]) == 1.5

    def test_empty(self):
        assert kraft_sum([]) == 0.0

    def test_rejects_zero_length(self):
        with pytest.raises(ValidationError):
            kraft_sum([0, 2])


def _assert_prefix_free(codebook):
    words = [cw.bits for cw in codebook.entries if cw is not None]
    for i, a in enumerate(words):
        for j, b in enumerate(words):
            if i != j:
                assert not b.startswith(a), f"{a} prefixes {b}"


class TestShannonFano:
    def test_dyadic_example(self):
        d = FiniteDistribution((0.5, 0.25, 0.25))
        cb = shannon_fano_codebook(d)
        assert cb.lengths() == [1, 2, 2]
        assert cb.expected_length(d) == pytest.approx(1.5)
        assert cb.expected_length(d) <= entropy(d) + 1.0
        _assert_prefix_free(cb)

    def test_uniform_four(self):
        d = FiniteDistribution.uniform(4)
        cb = shannon_fano_codebook(d)
        assert cb.lengths() == [2, 2, 2, 2]
        assert cb.expected_length(d) == pytest.approx(2.0)
        assert cb.expected_length(d) <= entropy(d) + 1.0

    def test_point_mass_minimum_length(self):
        d = FiniteDistribution((1.0,))
        cb = shannon_fano_codebook(d)
        assert cb.lengths() == [1]
        assert cb.expected_length(d) == 1.0
        assert cb.expected_length(d) <= entropy(d) + 1.0  # bound is tight here

    def test_zero_probability_outcome_has_no_codeword(self):
        d = FiniteDistribution((0.5, 0.0, 0.5))
        cb = shannon_fano_codebook(d)
        assert cb.entries[1] is None
        with pytest.raises(ValidationError):
            cb.codeword(1)
        assert cb.codeword(0) is not None

    def test_tie_break_by_index(self):
        d = FiniteDistribution.uniform(4)
        cb = shannon_fano_codebook(d)
        words = [cw.bits for cw in cb.entries]
        assert words == sorted(words)

    def test_seeded_random_distributions(self):
        # Kraft checked exactly with rationals; the end-to-end acceptance
        # run repeats this at full scale.
        rng = np.random.default_rng(2024)
        for _ in range(25):
            k = int(rng.integers(1, 2 ** 10))
            w = rng.dirichlet(np.ones(k) * rng.uniform(0.05, 2.0))
            w = w / w.sum()
            d = FiniteDistribution(tuple(w))
            cb = shannon_fano_codebook(d)
            exact_kraft = sum(Fraction(1, 2 ** l) for l in cb.lengths())
            assert exact_kraft <= 1
            assert cb.expected_length(d) <= entropy(d) + 1.0
            assert cb.is_prefix_free()


class TestOmega:
    def test_frozen_examples(self):
        assert omega_codeword(1).bits == "0"
        assert omega_codeword(2).bits == "100"
        assert omega_codeword(4).bits == "101000"
        assert omega_codeword(16).bits == "10100100000"

    def test_round_trip_against_reference_decoder(self):
        for n in list(range(1, 600)) + [1000, 65536, 2 ** 20]:
            bits = omega_codeword(n).bits
            assert _reference_omega_decode(bits) == [n]
            assert omega_decode(bits) == (n, len(bits))

    def test_zero_rejected(self):
        with pytest.raises(ValidationError):
            omega_codeword(0)

    def test_concatenation_decodes_exactly(self):
        rng = np.random.default_rng(99)
        values = rng.integers(1, 2 ** 16, size=2000).tolist()
        stream = "".join(omega_codeword(v).bits for v in values)
        assert omega_decode_stream(stream) == values
        assert _reference_omega_decode(stream) == values

    def test_family_codebook_invariants(self):
        cb = Codebook(tuple(omega_codeword(n) for n in range(1, 512)))
        assert cb.is_prefix_free()
        assert cb.kraft_sum() <= 1.0
        assert cb.lengths_nondecreasing()

    def test_length_dominates_log_plus(self):
        # identifier lengths must stay above the unique-decodability bound
        from reuselaw.codes import log_plus
        for n in range(1, 2 ** 12):
            assert len(omega_codeword(n)) >= log_plus(n) - 1e-9

    def test_truncated_stream_rejected(self):
        with pytest.raises(ValidationError):
            omega_decode("10")


class TestCodeword:
    def test_rejects_empty(self):
        with pytest.raises(ValidationError):
            Codeword("")

    def test_rejects_non_binary(self):
        with pytest.raises(ValidationError):
            Codeword("012")

    def test_length(self):
        assert Codeword("0101").length == 4
