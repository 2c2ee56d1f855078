"""Level-tagged key material and the public keygen/encaps/decaps entry points."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from ..errors import EncapsulationError, ParameterError
from .mlkem import MLKEM
from .params import KemParams, get_params


@dataclass(frozen=True)
class _Tagged:
    params: KemParams
    data: bytes

    _length_attr = ""
    _error = ParameterError

    def __post_init__(self):
        want = getattr(self.params, self._length_attr)
        if len(self.data) != want:
            raise self._error(
                f"{type(self).__name__} for {self.params.name} must be {want} bytes, "
                f"got {len(self.data)}"
            )

    def __bytes__(self) -> bytes:
        return self.data

    def __len__(self) -> int:
        return len(self.data)

    @property
    def level(self) -> int:
        return self.params.level


class EncapsKey(_Tagged):
    _length_attr = "ek_len"
    _error = EncapsulationError


class DecapsKey(_Tagged):
    _length_attr = "dk_len"

    @property
    def z(self) -> bytes:
        return self.data[-32:]

    @property
    def encaps_key(self) -> EncapsKey:
        k = self.params.k
        return EncapsKey(self.params, self.data[384 * k : 768 * k + 32])


class KemCiphertext(_Tagged):
    _length_attr = "ct_len"


class SharedSecret(_Tagged):
    _length_attr = "ss_len"


@lru_cache(maxsize=None)
def _kem(params: KemParams) -> MLKEM:
    return MLKEM(params)


def keygen(params: KemParams | int, seed: bytes) -> tuple[EncapsKey, DecapsKey]:
    params = get_params(params)
    ek, dk = _kem(params).keygen(bytes(seed))
    return EncapsKey(params, ek), DecapsKey(params, dk)


def encaps(ek: EncapsKey, m: bytes) -> tuple[KemCiphertext, SharedSecret]:
    # EncapsKey construction already enforces the length; the modulus check runs in MLKEM.
    ct, ss = _kem(ek.params).encaps(ek.data, bytes(m))
    return KemCiphertext(ek.params, ct), SharedSecret(ek.params, ss)


def decaps(dk: DecapsKey, ct: KemCiphertext) -> SharedSecret:
    if dk.params != ct.params:
        raise ParameterError(f"key is {dk.params.name} but ciphertext is {ct.params.name}")
    return SharedSecret(dk.params, _kem(dk.params).decaps(dk.data, ct.data))
