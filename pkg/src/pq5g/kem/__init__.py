"""ML-KEM (levels 512/768/1024) and the X25519 hybrid mode."""

from ._backend import BACKEND
from .hybrid import ALL_MODES, DEFAULT_MODE, KemMode, ModeKind, hybrid_combine
from .keys import DecapsKey, EncapsKey, KemCiphertext, SharedSecret, decaps, encaps, keygen
from .mlkem import MLKEM
from .params import LEVELS, ML_KEM_512, ML_KEM_768, ML_KEM_1024, PARAMS, KemParams, get_params
from .poly import Polynomial, compress, decompress, inv_ntt, multiply_ntts, ntt, sample_cbd

__all__ = [
    "ALL_MODES", "BACKEND", "DEFAULT_MODE", "DecapsKey", "EncapsKey", "KemCiphertext",
    "KemMode", "KemParams", "LEVELS", "MLKEM", "ML_KEM_512", "ML_KEM_768", "ML_KEM_1024",
    "ModeKind", "PARAMS", "Polynomial", "SharedSecret", "compress", "decaps", "decompress",
    "encaps", "get_params", "hybrid_combine", "inv_ntt", "keygen", "multiply_ntts", "ntt",
    "sample_cbd",
]
