from __future__ import annotations

import unittest

import numpy as np
from pydantic import ValidationError

from core.errors import EncodingError, PBGAError
from core.genome import (
    EncodingSpec,
    Genome,
    decode_genome,
    decode_param,
    decode_params,
    encode_genome,
    group_values,
    quantize,
)

ENC = EncodingSpec(bits_per_param=5, radius=3.0)


class TestEncodingSpec(unittest.TestCase):
    """Test EncodingSpec validation and derived values."""

    def test_defaults(self):
        """Defaults are 5 bits and a 3 px radius."""
        spec = EncodingSpec()
        self.assertEqual(spec.bits_per_param, 5)
        self.assertEqual(spec.radius, 3.0)

    def test_step(self):
        """Quantization step is 2r / (2^B - 1)."""
        self.assertAlmostEqual(ENC.step, 6.0 / 31.0)

    def test_rejects_nonpositive_radius(self):
        """Radius must be strictly positive."""
        with self.assertRaises(ValidationError):
            EncodingSpec(bits_per_param=5, radius=0.0)

    def test_rejects_zero_bits(self):
        """At least one bit per parameter."""
        with self.assertRaises(ValidationError):
            EncodingSpec(bits_per_param=0, radius=3.0)


class TestGenome(unittest.TestCase):
    """Test the Genome container."""

    def test_length_must_be_multiple_of_group(self):
        """Bit count must split into whole B-bit groups."""
        with self.assertRaises(EncodingError):
            Genome(np.zeros(7, dtype=np.uint8), 5)

    def test_bits_are_read_only(self):
        """Genome bits cannot be mutated in place."""
        g = Genome.zeros(2, 5)
        with self.assertRaises(ValueError):
            g.bits[0] = 1

    def test_int_round_trip(self):
        """from_int and to_int agree (MSB first)."""
        g = Genome.from_int(0b10110, 5, 5)
        self.assertEqual("".join(map(str, g.bits.tolist())), "10110")
        self.assertEqual(g.to_int(), 0b10110)

    def test_bit_orders_per_group(self):
        """Bit order restarts in every group with LSB = 0."""
        g = Genome.zeros(2, 3)
        np.testing.assert_array_equal(g.bit_orders(), [2, 1, 0, 2, 1, 0])

    def test_flipped_returns_new_genome(self):
        """flipped inverts masked bits and leaves the original untouched."""
        g = Genome.zeros(1, 4)
        h = g.flipped(np.array([True, False, False, True]))
        self.assertEqual(h.to_int(), 0b1001)
        self.assertEqual(g.to_int(), 0)

    def test_equality_and_hash(self):
        """Equal bits and group size compare and hash equal."""
        a = Genome.from_int(5, 8, 4)
        b = Genome.from_int(5, 8, 4)
        self.assertEqual(a, b)
        self.assertEqual(len({a, b}), 1)

    def test_encoding_error_is_library_error(self):
        """EncodingError derives from the library base error."""
        self.assertTrue(issubclass(EncodingError, PBGAError))


class TestDecodeParam(unittest.TestCase):
    """Test decode_param."""

    def test_endpoints(self):
        """00000 -> -r and 11111 -> +r."""
        self.assertEqual(decode_param("00000", ENC), -3.0)
        self.assertEqual(decode_param("11111", ENC), 3.0)

    def test_mid_level(self):
        """10000 (v=16) -> 3 * (32 - 31) / 31."""
        self.assertAlmostEqual(decode_param("10000", ENC), 3.0 / 31.0, places=12)

    def test_strictly_monotone(self):
        """Decoded value increases with the unsigned group value."""
        values = decode_params(Genome.from_int(0, 5, 5), ENC)
        decoded = [decode_param(Genome.from_int(v, 5, 5).bits, ENC) for v in range(32)]
        self.assertTrue(all(a < b for a, b in zip(decoded, decoded[1:])))
        self.assertEqual(values[0], -3.0)

    def test_wrong_group_size(self):
        """A group of the wrong width is rejected."""
        with self.assertRaises(EncodingError):
            decode_param("0101", ENC)

    def test_group_values(self):
        """Groups read MSB first."""
        np.testing.assert_array_equal(group_values("0000111111", 5), [1, 31])


class TestDecodeGenome(unittest.TestCase):
    """Test decode_genome."""

    def test_corner_is_clamped_to_circle(self):
        """(-3, -3) is scaled radially to norm 3."""
        g = Genome(np.zeros(10, dtype=np.uint8), 5)
        vec = decode_genome(g, ENC)[0]
        self.assertAlmostEqual(float(np.hypot(*vec)), 3.0, places=12)
        np.testing.assert_allclose(vec, -3.0 / np.sqrt(2.0) * np.ones(2), atol=1e-12)

    def test_small_vectors_unchanged(self):
        """Vectors inside the circle are left alone."""
        g = Genome.from_int(0b1000010000, 10, 5)
        np.testing.assert_allclose(decode_genome(g, ENC), [[3.0 / 31.0, 3.0 / 31.0]], atol=1e-12)

    def test_norm_bound(self):
        """Every decoded vector lies in the disk of radius r."""
        rng = np.random.default_rng(3)
        for _ in range(50):
            g = Genome.random(rng, 20, 5)
            norms = np.hypot(*decode_genome(g, ENC).T)
            self.assertTrue(np.all(norms <= 3.0 + 1e-9))

    def test_empty(self):
        """A zero-parameter genome decodes to an empty sequence."""
        g = Genome(np.zeros(0, dtype=np.uint8), 5)
        self.assertEqual(decode_genome(g, ENC).shape, (0, 2))

    def test_node_count_mismatch(self):
        """Expected node count must match the genome."""
        with self.assertRaises(EncodingError):
            decode_genome(Genome.zeros(4, 5), ENC, n_nodes=3)

    def test_odd_parameter_count(self):
        """Displacement genomes need (dx, dy) pairs."""
        with self.assertRaises(EncodingError):
            decode_genome(Genome.zeros(3, 5), ENC)


class TestEncodeGenome(unittest.TestCase):
    """Test encode_genome and quantize."""

    def test_endpoints(self):
        """(-3, +3) -> 00000 11111."""
        g = encode_genome(np.array([[-3.0, 3.0]]), ENC)
        self.assertEqual("".join(map(str, g.bits.tolist())), "0000011111")

    def test_zero_ties_low(self):
        """0.0 sits between levels 15 and 16 and goes to 15."""
        np.testing.assert_array_equal(quantize(np.array([0.0]), ENC), [15])

    def test_clamps_out_of_range(self):
        """10 px is clamped to +r."""
        g = encode_genome(np.array([[10.0, 0.0]]), ENC)
        self.assertEqual(group_values(g.bits, 5)[0], 31)

    def test_levels_are_fixed_points(self):
        """encode(decode(v)) == v for every 5-bit level."""
        for v in range(32):
            value = decode_param(Genome.from_int(v, 5, 5).bits, ENC)
            self.assertEqual(int(quantize(np.array([value]), ENC)[0]), v)

    def test_round_trip_error_bound(self):
        """decode(encode(x)) is within half a step of x per axis inside the circle."""
        rng = np.random.default_rng(11)
        vectors = rng.uniform(-2.0, 2.0, size=(40, 2))
        back = decode_genome(encode_genome(vectors, ENC), ENC)
        self.assertLessEqual(float(np.abs(back - vectors).max()), ENC.step / 2 + 1e-12)

    def test_rejects_non_finite(self):
        """NaN displacements cannot be encoded."""
        with self.assertRaises(EncodingError):
            encode_genome(np.array([[np.nan, 0.0]]), ENC)


if __name__ == "__main__":
    unittest.main()
