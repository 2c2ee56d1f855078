"""ML-KEM parameter sets."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ParameterError

Q = 3329
N = 256


@dataclass(frozen=True)
class KemParams:
    level: int
    k: int
    eta1: int
    eta2: int
    du: int
    dv: int

    @property
    def name(self) -> str:
        return f"ML-KEM-{self.level}"

    @property
    def ek_len(self) -> int:
        return 384 * self.k + 32

    @property
    def dk_len(self) -> int:
        return 768 * self.k + 96

    @property
    def ct_len(self) -> int:
        return 32 * (self.du * self.k + self.dv)

    @property
    def ss_len(self) -> int:
        return 32


ML_KEM_512 = KemParams(512, k=2, eta1=3, eta2=2, du=10, dv=4)
ML_KEM_768 = KemParams(768, k=3, eta1=2, eta2=2, du=10, dv=4)
ML_KEM_1024 = KemParams(1024, k=4, eta1=2, eta2=2, du=11, dv=5)

PARAMS = {p.level: p for p in (ML_KEM_512, ML_KEM_768, ML_KEM_1024)}
LEVELS = tuple(PARAMS)


def get_params(level: int | KemParams) -> KemParams:
    if isinstance(level, KemParams):
        return level
    try:
        return PARAMS[int(level)]
    except (KeyError, ValueError, TypeError):
        raise ParameterError(f"unsupported ML-KEM level: {level!r}") from None
