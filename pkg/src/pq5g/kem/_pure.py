"""Pure-Python ring kernels for ML-KEM.

Same function set and semantics as the compiled ``_kernels`` extension.
Polynomials are plain lists of 256 ints reduced mod q.
"""

from __future__ import annotations

Q = 3329
N = 256
_N_INV = 3303  # 128^-1 mod q


def _bitrev7(n: int) -> int:
    return int(f"{n:07b}"[::-1], 2)


ZETAS = [pow(17, _bitrev7(i), Q) for i in range(128)]
GAMMAS = [pow(17, 2 * _bitrev7(i) + 1, Q) for i in range(128)]


def ntt(f: list[int]) -> list[int]:
    f = list(f)
    i = 1
    length = 128
    while length >= 2:
        for start in range(0, N, 2 * length):
            zeta = ZETAS[i]
            i += 1
            for j in range(start, start + length):
                t = zeta * f[j + length] % Q
                f[j + length] = (f[j] - t) % Q
                f[j] = (f[j] + t) % Q
        length >>= 1
    return f


def inv_ntt(f: list[int]) -> list[int]:
    f = list(f)
    i = 127
    length = 2
    while length <= 128:
        for start in range(0, N, 2 * length):
            zeta = ZETAS[i]
            i -= 1
            for j in range(start, start + length):
                t = f[j]
                f[j] = (t + f[j + length]) % Q
                f[j + length] = zeta * (f[j + length] - t) % Q
        length <<= 1
    return [x * _N_INV % Q for x in f]


def multiply_ntts(f: list[int], g: list[int]) -> list[int]:
    h = [0] * N
    for i in range(128):
        a0, a1 = f[2 * i], f[2 * i + 1]
        b0, b1 = g[2 * i], g[2 * i + 1]
        h[2 * i] = (a0 * b0 + a1 * b1 * GAMMAS[i]) % Q
        h[2 * i + 1] = (a0 * b1 + a1 * b0) % Q
    return h


def poly_add(f: list[int], g: list[int]) -> list[int]:
    return [(a + b) % Q for a, b in zip(f, g)]


def poly_sub(f: list[int], g: list[int]) -> list[int]:
    return [(a - b) % Q for a, b in zip(f, g)]


def sample_ntt(stream: bytes) -> list[int]:
    """Rejection-sample coefficients < q from 3-byte chunks of ``stream``.

    Returns fewer than 256 values when the stream runs out; the caller
    retries with a longer XOF output.
    """
    out: list[int] = []
    for pos in range(0, len(stream) - 2, 3):
        c0, c1, c2 = stream[pos], stream[pos + 1], stream[pos + 2]
        d1 = c0 | ((c1 & 0x0F) << 8)
        d2 = (c1 >> 4) | (c2 << 4)
        if d1 < Q:
            out.append(d1)
            if len(out) == N:
                break
        if d2 < Q:
            out.append(d2)
            if len(out) == N:
                break
    return out


def sample_cbd(eta: int, stream: bytes) -> list[int]:
    if len(stream) < 64 * eta:
        raise ValueError(f"CBD stream must be {64 * eta} bytes, got {len(stream)}")
    bits = int.from_bytes(stream[: 64 * eta], "little")
    mask = (1 << eta) - 1
    out = []
    for i in range(N):
        word = bits >> (2 * eta * i)
        a = (word & mask).bit_count()
        b = ((word >> eta) & mask).bit_count()
        out.append((a - b) % Q)
    return out


def byte_encode(d: int, f: list[int]) -> bytes:
    acc = 0
    for c in reversed(f):
        acc = (acc << d) | c
    return acc.to_bytes(32 * d, "little")


def byte_decode(d: int, data: bytes) -> list[int]:
    if len(data) != 32 * d:
        raise ValueError(f"ByteDecode_{d} expects {32 * d} bytes, got {len(data)}")
    acc = int.from_bytes(data, "little")
    mask = (1 << d) - 1
    out = [(acc >> (d * i)) & mask for i in range(N)]
    if d == 12:
        out = [x % Q for x in out]
    return out


def compress_poly(d: int, f: list[int]) -> list[int]:
    mask = (1 << d) - 1
    return [(((x << (d + 1)) + Q) // (2 * Q)) & mask for x in f]


def decompress_poly(d: int, f: list[int]) -> list[int]:
    half = 1 << (d - 1)
    return [(Q * y + half) >> d for y in f]
