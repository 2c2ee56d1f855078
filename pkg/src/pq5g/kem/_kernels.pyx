# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled ring kernels for ML-KEM; drop-in for ``pq5g.kem._pure``."""

from libc.stdint cimport int64_t, uint64_t, uint32_t

cdef enum:
    Q = 3329
    N = 256
    N_INV = 3303

cdef int64_t _ZETAS[128]
cdef int64_t _GAMMAS[128]


cdef int _bitrev7(int n):
    cdef int r = 0, i
    for i in range(7):
        r = (r << 1) | (n & 1)
        n >>= 1
    return r


cdef int64_t _powmod(int64_t base, int e):
    cdef int64_t r = 1
    cdef int i
    for i in range(e):
        r = r * base % Q
    return r


cdef void _init_tables():
    cdef int i
    for i in range(128):
        _ZETAS[i] = _powmod(17, _bitrev7(i))
        _GAMMAS[i] = _powmod(17, 2 * _bitrev7(i) + 1)


_init_tables()

ZETAS = [_ZETAS[i] for i in range(128)]
GAMMAS = [_GAMMAS[i] for i in range(128)]


cdef inline void _load(object f, int64_t* out) except *:
    cdef int i
    if len(f) != N:
        raise ValueError(f"polynomial must have {N} coefficients, got {len(f)}")
    for i in range(N):
        out[i] = f[i]


cdef inline list _store(int64_t* a):
    cdef int i
    return [a[i] for i in range(N)]


def ntt(f):
    cdef int64_t a[N]
    cdef int64_t t, zeta
    cdef int i = 1, length = 128, start, j
    _load(f, a)
    while length >= 2:
        start = 0
        while start < N:
            zeta = _ZETAS[i]
            i += 1
            for j in range(start, start + length):
                t = zeta * a[j + length] % Q
                a[j + length] = (a[j] - t + Q) % Q
                a[j] = (a[j] + t) % Q
            start += 2 * length
        length >>= 1
    return _store(a)


def inv_ntt(f):
    cdef int64_t a[N]
    cdef int64_t t, zeta
    cdef int i = 127, length = 2, start, j
    _load(f, a)
    while length <= 128:
        start = 0
        while start < N:
            zeta = _ZETAS[i]
            i -= 1
            for j in range(start, start + length):
                t = a[j]
                a[j] = (t + a[j + length]) % Q
                a[j + length] = zeta * (a[j + length] - t + Q) % Q
            start += 2 * length
        length <<= 1
    for j in range(N):
        a[j] = a[j] * N_INV % Q
    return _store(a)


def multiply_ntts(f, g):
    cdef int64_t a[N]
    cdef int64_t b[N]
    cdef int64_t h[N]
    cdef int i
    _load(f, a)
    _load(g, b)
    for i in range(128):
        h[2 * i] = (a[2 * i] * b[2 * i] + (a[2 * i + 1] * b[2 * i + 1] % Q) * _GAMMAS[i]) % Q
        h[2 * i + 1] = (a[2 * i] * b[2 * i + 1] + a[2 * i + 1] * b[2 * i]) % Q
    return _store(h)


def poly_add(f, g):
    cdef int64_t a[N]
    cdef int64_t b[N]
    cdef int i
    _load(f, a)
    _load(g, b)
    for i in range(N):
        a[i] = (a[i] + b[i]) % Q
    return _store(a)


def poly_sub(f, g):
    cdef int64_t a[N]
    cdef int64_t b[N]
    cdef int i
    _load(f, a)
    _load(g, b)
    for i in range(N):
        a[i] = (a[i] - b[i] + Q) % Q
    return _store(a)


def sample_ntt(bytes stream):
    cdef const unsigned char* s = stream
    cdef Py_ssize_t n = len(stream), pos = 0
    cdef int64_t out[N]
    cdef int count = 0
    cdef int d1, d2
    while pos + 2 < n and count < N:
        d1 = s[pos] | ((s[pos + 1] & 0x0F) << 8)
        d2 = (s[pos + 1] >> 4) | (s[pos + 2] << 4)
        if d1 < Q:
            out[count] = d1
            count += 1
        if d2 < Q and count < N:
            out[count] = d2
            count += 1
        pos += 3
    return [out[i] for i in range(count)]


def sample_cbd(int eta, bytes stream):
    if len(stream) < 64 * eta:
        raise ValueError(f"CBD stream must be {64 * eta} bytes, got {len(stream)}")
    cdef const unsigned char* s = stream
    cdef int64_t out[N]
    cdef int i, j, a, b, bit
    for i in range(N):
        a = 0
        b = 0
        for j in range(eta):
            bit = 2 * eta * i + j
            a += (s[bit >> 3] >> (bit & 7)) & 1
            bit += eta
            b += (s[bit >> 3] >> (bit & 7)) & 1
        out[i] = (a - b + Q) % Q
    return _store(out)


def byte_encode(int d, f):
    cdef int64_t a[N]
    cdef bytearray out = bytearray(32 * d)
    cdef unsigned char* o = out
    cdef uint64_t acc = 0
    cdef int bits = 0, i, pos = 0
    _load(f, a)
    for i in range(N):
        acc |= (<uint64_t>a[i]) << bits
        bits += d
        while bits >= 8:
            o[pos] = acc & 0xFF
            pos += 1
            acc >>= 8
            bits -= 8
    return bytes(out)


def byte_decode(int d, bytes data):
    if len(data) != 32 * d:
        raise ValueError(f"ByteDecode_{d} expects {32 * d} bytes, got {len(data)}")
    cdef const unsigned char* s = data
    cdef int64_t out[N]
    cdef uint64_t acc = 0
    cdef uint64_t mask = (1 << d) - 1
    cdef int bits = 0, i, pos = 0
    for i in range(N):
        while bits < d:
            acc |= (<uint64_t>s[pos]) << bits
            pos += 1
            bits += 8
        out[i] = acc & mask
        acc >>= d
        bits -= d
        if d == 12:
            out[i] = out[i] % Q
    return _store(out)


def compress_poly(int d, f):
    cdef int64_t a[N]
    cdef int64_t mask = (1 << d) - 1
    cdef int i
    _load(f, a)
    for i in range(N):
        a[i] = (((a[i] << (d + 1)) + Q) // (2 * Q)) & mask
    return _store(a)


def decompress_poly(int d, f):
    cdef int64_t a[N]
    cdef int64_t half = 1 << (d - 1)
    cdef int i
    _load(f, a)
    for i in range(N):
        a[i] = (Q * a[i] + half) >> d
    return _store(a)
