"""ML-KEM key generation, encapsulation and decapsulation over raw bytes.

Hash instantiation: H = SHA3-256, G = SHA3-512, J = SHAKE256 (32 bytes),
PRF = SHAKE256, XOF = SHAKE128.
"""

from __future__ import annotations

import hashlib
import hmac
from types import ModuleType

from ..errors import EncapsulationError, ParameterError
from ._backend import kernels as _default_kernels
from .params import KemParams, get_params

_XOF_BLOCK = 168  # SHAKE128 rate


def H(data: bytes) -> bytes:
    return hashlib.sha3_256(data).digest()


def G(data: bytes) -> tuple[bytes, bytes]:
    out = hashlib.sha3_512(data).digest()
    return out[:32], out[32:]


def J(data: bytes) -> bytes:
    return hashlib.shake_256(data).digest(32)


def PRF(eta: int, seed: bytes, nonce: int) -> bytes:
    return hashlib.shake_256(seed + bytes([nonce])).digest(64 * eta)


class MLKEM:
    """One ML-KEM parameter set bound to a kernel backend.

    ``kernels`` defaults to the backend picked at import; pass
    ``pq5g.kem._pure`` explicitly to force the interpreted path.
    """

    def __init__(self, params: KemParams | int, kernels: ModuleType | None = None):
        self.params = get_params(params)
        self.kernels = kernels or _default_kernels

    def __repr__(self) -> str:
        return f"MLKEM({self.params.name}, backend={self.kernels.__name__.rsplit('.', 1)[-1]})"

    # -- sampling -------------------------------------------------------

    def _sample_ntt(self, seed: bytes) -> list[int]:
        xof = hashlib.shake_128(seed)
        length = 3 * _XOF_BLOCK
        while True:
            coeffs = self.kernels.sample_ntt(xof.digest(length))
            if len(coeffs) == 256:
                return coeffs
            length += _XOF_BLOCK

    def _expand_matrix(self, rho: bytes) -> list[list[list[int]]]:
        k = self.params.k
        return [
            [self._sample_ntt(rho + bytes([j, i])) for j in range(k)]
            for i in range(k)
        ]

    def _noise(self, eta: int, seed: bytes, nonce: int) -> list[int]:
        return self.kernels.sample_cbd(eta, PRF(eta, seed, nonce))

    def _dot(self, row, vec) -> list[int]:
        kern = self.kernels
        acc = kern.multiply_ntts(row[0], vec[0])
        for a, b in zip(row[1:], vec[1:]):
            acc = kern.poly_add(acc, kern.multiply_ntts(a, b))
        return acc

    # -- K-PKE ----------------------------------------------------------

    def pke_keygen(self, d: bytes) -> tuple[bytes, bytes]:
        p, kern = self.params, self.kernels
        rho, sigma = G(d + bytes([p.k]))
        a_hat = self._expand_matrix(rho)
        s = [self._noise(p.eta1, sigma, n) for n in range(p.k)]
        e = [self._noise(p.eta1, sigma, p.k + n) for n in range(p.k)]
        s_hat = [kern.ntt(x) for x in s]
        e_hat = [kern.ntt(x) for x in e]
        t_hat = [kern.poly_add(self._dot(a_hat[i], s_hat), e_hat[i]) for i in range(p.k)]
        ek = b"".join(kern.byte_encode(12, t) for t in t_hat) + rho
        dk = b"".join(kern.byte_encode(12, x) for x in s_hat)
        return ek, dk

    def pke_encrypt(self, ek: bytes, m: bytes, r: bytes) -> bytes:
        p, kern = self.params, self.kernels
        k = p.k
        t_hat = [kern.byte_decode(12, ek[384 * i : 384 * (i + 1)]) for i in range(k)]
        rho = ek[384 * k :]
        a_hat = self._expand_matrix(rho)
        y = [self._noise(p.eta1, r, n) for n in range(k)]
        e1 = [self._noise(p.eta2, r, k + n) for n in range(k)]
        e2 = self._noise(p.eta2, r, 2 * k)
        y_hat = [kern.ntt(x) for x in y]
        a_t = [[a_hat[j][i] for j in range(k)] for i in range(k)]
        u = [kern.poly_add(kern.inv_ntt(self._dot(a_t[i], y_hat)), e1[i]) for i in range(k)]
        mu = kern.decompress_poly(1, kern.byte_decode(1, m))
        v = kern.poly_add(kern.poly_add(kern.inv_ntt(self._dot(t_hat, y_hat)), e2), mu)
        c1 = b"".join(kern.byte_encode(p.du, kern.compress_poly(p.du, x)) for x in u)
        c2 = kern.byte_encode(p.dv, kern.compress_poly(p.dv, v))
        return c1 + c2

    def pke_decrypt(self, dk: bytes, c: bytes) -> bytes:
        p, kern = self.params, self.kernels
        k, du = p.k, p.du
        step = 32 * du
        u = [
            kern.decompress_poly(du, kern.byte_decode(du, c[step * i : step * (i + 1)]))
            for i in range(k)
        ]
        v = kern.decompress_poly(p.dv, kern.byte_decode(p.dv, c[step * k :]))
        s_hat = [kern.byte_decode(12, dk[384 * i : 384 * (i + 1)]) for i in range(k)]
        w = kern.poly_sub(v, kern.inv_ntt(self._dot(s_hat, [kern.ntt(x) for x in u])))
        return kern.byte_encode(1, kern.compress_poly(1, w))

    # -- ML-KEM ---------------------------------------------------------

    def keygen(self, seed: bytes) -> tuple[bytes, bytes]:
        """Deterministic key pair from the 64-byte seed ``d || z``."""
        if len(seed) != 64:
            raise ParameterError(f"keygen seed must be 64 bytes (d||z), got {len(seed)}")
        d, z = seed[:32], seed[32:]
        ek, dk_pke = self.pke_keygen(d)
        return ek, dk_pke + ek + H(ek) + z

    def check_encaps_key(self, ek: bytes) -> None:
        p = self.params
        if len(ek) != p.ek_len:
            raise EncapsulationError(
                f"{p.name} encapsulation key must be {p.ek_len} bytes, got {len(ek)}"
            )
        kern = self.kernels
        body = ek[: 384 * p.k]
        for i in range(p.k):
            chunk = body[384 * i : 384 * (i + 1)]
            if kern.byte_encode(12, kern.byte_decode(12, chunk)) != chunk:
                raise EncapsulationError("encapsulation key holds coefficients >= q")

    def encaps(self, ek: bytes, m: bytes) -> tuple[bytes, bytes]:
        """Returns ``(ciphertext, shared_secret)``."""
        if len(m) != 32:
            raise ParameterError(f"encapsulation randomness must be 32 bytes, got {len(m)}")
        self.check_encaps_key(ek)
        key, r = G(m + H(ek))
        return self.pke_encrypt(ek, m, r), key

    def decaps(self, dk: bytes, ct: bytes) -> bytes:
        p = self.params
        if len(dk) != p.dk_len:
            raise ParameterError(f"{p.name} decapsulation key must be {p.dk_len} bytes, got {len(dk)}")
        if len(ct) != p.ct_len:
            raise ParameterError(f"{p.name} ciphertext must be {p.ct_len} bytes, got {len(ct)}")
        k = p.k
        dk_pke = dk[: 384 * k]
        ek = dk[384 * k : 768 * k + 32]
        h = dk[768 * k + 32 : 768 * k + 64]
        z = dk[768 * k + 64 :]
        if H(ek) != h:
            raise ParameterError("decapsulation key failed the embedded hash check")
        m_prime = self.pke_decrypt(dk_pke, ct)
        key, r_prime = G(m_prime + h)
        rejected = J(z + ct)
        if hmac.compare_digest(self.pke_encrypt(ek, m_prime, r_prime), ct):
            return key
        return rejected
