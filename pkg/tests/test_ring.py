from __future__ import annotations

import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (
    Q,
    centered_binomial_pmf,
    centered_distance,
    compress_bound,
    compress_exact,
    decompress_exact,
    schoolbook_negacyclic,
)
from pq5g.errors import ParameterError
from pq5g.kem import poly
from pq5g.kem.poly import COMPRESS_WIDTHS, Polynomial, compress, decompress, inv_ntt, multiply_ntts, ntt

coeffs = st.lists(st.integers(0, Q - 1), min_size=256, max_size=256)


def rand_poly(r: random.Random) -> list[int]:
    return [r.randrange(Q) for _ in range(256)]


# -- Polynomial type ----------------------------------------------------------


def test_polynomial_rejects_bad_shapes():
    with pytest.raises(ParameterError):
        Polynomial(tuple(range(255)))
    with pytest.raises(ParameterError):
        Polynomial((Q,) + (0,) * 255)
    with pytest.raises(ParameterError):
        Polynomial((-1,) + (0,) * 255)


def test_polynomial_add_sub():
    r = random.Random(1)
    a, b = Polynomial.from_list(rand_poly(r)), Polynomial.from_list(rand_poly(r))
    assert (a + b) - b == a
    assert a - a == Polynomial.zero()


# -- NTT ------------------------------------------------------------------------


def test_ntt_of_zero_is_zero(kernels):
    assert kernels.ntt([0] * 256) == [0] * 256


def test_ntt_roundtrip_1000(kernels):
    r = random.Random(2)
    for _ in range(1000):
        f = rand_poly(r)
        assert kernels.inv_ntt(kernels.ntt(f)) == f


def test_ntt_matches_schoolbook_200_pairs(kernels):
    r = random.Random(3)
    for _ in range(200):
        a, b = rand_poly(r), rand_poly(r)
        got = kernels.inv_ntt(kernels.multiply_ntts(kernels.ntt(a), kernels.ntt(b)))
        assert got == schoolbook_negacyclic(a, b)


def test_ntt_is_linear(kernels):
    r = random.Random(4)
    a, b = rand_poly(r), rand_poly(r)
    lhs = kernels.ntt([(x + y) % Q for x, y in zip(a, b)])
    rhs = [(x + y) % Q for x, y in zip(kernels.ntt(a), kernels.ntt(b))]
    assert lhs == rhs


def test_x_times_x255_is_minus_one():
    x = [0] * 256
    x[1] = 1
    x255 = [0] * 256
    x255[255] = 1
    prod = inv_ntt(multiply_ntts(ntt(Polynomial.from_list(x)), ntt(Polynomial.from_list(x255))))
    assert prod.coeffs == (Q - 1,) + (0,) * 255


@settings(max_examples=25, deadline=None)
@given(coeffs, coeffs)
def test_polynomial_api_matches_schoolbook(a, b):
    pa, pb = Polynomial.from_list(a), Polynomial.from_list(b)
    assert list(inv_ntt(multiply_ntts(ntt(pa), ntt(pb))).coeffs) == schoolbook_negacyclic(a, b)


# -- compression ---------------------------------------------------------------


def test_compress_zero_cases():
    assert compress(1, 0) == 0
    assert decompress(1, 0) == 0


def test_decompress_one_bit_midpoint():
    # q/2 = 1664.5 rounds up
    assert decompress(1, 1) == 1665


@pytest.mark.parametrize("d", COMPRESS_WIDTHS)
def test_compress_error_bound_exhaustive(d):
    bound = compress_bound(d)
    for x in range(Q):
        y = compress(d, x)
        assert 0 <= y < 2**d
        assert y == compress_exact(d, x)
        assert centered_distance(decompress(d, y), x) <= bound, (d, x)


@pytest.mark.parametrize("d", COMPRESS_WIDTHS)
def test_decompress_matches_exact_rounding(d):
    for y in range(2**d):
        assert decompress(d, y) == decompress_exact(d, y) % Q


@pytest.mark.parametrize("d", COMPRESS_WIDTHS)
def test_kernel_compression_agrees_with_reference(kernels, d):
    xs = list(range(Q)) + [0] * (-Q % 256)
    for start in range(0, len(xs), 256):
        chunk = xs[start : start + 256]
        assert kernels.compress_poly(d, chunk) == [compress(d, x) for x in chunk]
    ys = [y % 2**d for y in range(256)]
    assert kernels.decompress_poly(d, ys) == [decompress(d, y) for y in ys]


@pytest.mark.parametrize("args", [(3, 0), (1, Q), (1, -1), (4, 16)])
def test_compress_range_errors(args):
    d, v = args
    with pytest.raises(ParameterError):
        if d == 4:
            decompress(d, v)
        else:
            compress(d, v)


# -- byte encoding ---------------------------------------------------------------


@pytest.mark.parametrize("d", [1, 4, 5, 10, 11, 12])
def test_byte_encode_roundtrip(kernels, d):
    r = random.Random(d)
    m = Q if d == 12 else 2**d
    f = [r.randrange(m) for _ in range(256)]
    data = kernels.byte_encode(d, f)
    assert len(data) == 32 * d
    assert kernels.byte_decode(d, data) == f


def test_byte_decode_12_reduces_mod_q(kernels):
    # 0xFFF in every slot decodes to 4095 mod q
    assert kernels.byte_decode(12, b"\xff" * 384) == [4095 % Q] * 256


# -- CBD sampling ---------------------------------------------------------------------


@pytest.mark.parametrize("eta", [2, 3])
def test_cbd_zero_stream_is_zero(eta):
    assert poly.sample_cbd(eta, bytes(64 * eta)) == Polynomial.zero()


@pytest.mark.parametrize("eta", [2, 3])
def test_cbd_requires_exact_stream(eta):
    with pytest.raises(ParameterError):
        poly.sample_cbd(eta, bytes(64 * eta - 1))
    with pytest.raises(ParameterError):
        poly.sample_cbd(eta, bytes(64 * eta + 1))


def test_cbd_rejects_unknown_eta():
    with pytest.raises(ParameterError):
        poly.sample_cbd(4, bytes(256))


def test_cbd_all_ones_stream(kernels):
    # every eta-bit half has the same popcount, so everything cancels
    assert kernels.sample_cbd(2, b"\xff" * 128) == [0] * 256


@pytest.mark.parametrize("eta", [2, 3])
def test_cbd_histogram_within_one_percent(kernels, eta):
    r = random.Random(eta)
    counts: Counter[int] = Counter()
    polys = 1_000_000 // 256 + 1
    for _ in range(polys):
        for c in kernels.sample_cbd(eta, r.randbytes(64 * eta)):
            counts[c if c <= eta else c - Q] += 1
    total = sum(counts.values())
    assert total >= 1_000_000
    assert set(counts) <= set(range(-eta, eta + 1))
    for v, p in centered_binomial_pmf(eta).items():
        assert abs(counts[v] / total - p) < 0.01, (v, counts[v] / total, p)


def test_cbd_coefficients_in_range(kernels):
    r = random.Random(9)
    for eta in (2, 3):
        for _ in range(50):
            for c in kernels.sample_cbd(eta, r.randbytes(64 * eta)):
                assert c <= eta or c >= Q - eta
