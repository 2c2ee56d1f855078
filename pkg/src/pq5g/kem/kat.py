"""Reader and checker for NIST ``.rsp``-style known-answer files.

Records are blank-line separated ``key = hexvalue`` blocks opened by
``count = N``. Two field-name dialects are accepted:

* ``fips203``: ``d``, ``z``, ``m`` (or ``msg``), ``ek``, ``dk``, ``ct`` (or ``c``),
  ``ss`` (or ``k``), optional ``seed``.
* ``round3``: ``seed``, ``pk``, ``sk``, ``ct``, ``ss``.

Which operations a record checks depends on the fields it carries. A bare
48-byte ``seed`` is expanded with the NIST PQC AES-256-CTR DRBG into
``d || z`` (keygen) followed by ``m`` (encaps), mirroring the reference
generator.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from ..errors import KatFormatError, ParameterError
from .mlkem import MLKEM
from .params import PARAMS, KemParams, get_params

FORMATS = {
    "fips203": {
        "seed": "seed", "d": "d", "z": "z", "m": "m", "msg": "m",
        "ek": "ek", "dk": "dk", "ct": "ct", "c": "ct", "ss": "ss", "k": "ss",
    },
    "round3": {"seed": "seed", "pk": "ek", "sk": "dk", "ct": "ct", "ss": "ss"},
}

_LINE = re.compile(r"^\s*([A-Za-z_]\w*)\s*=\s*([0-9A-Fa-f]*)\s*$")


@dataclass
class KatRecord:
    count: int
    fields: dict[str, bytes]
    line: int = 0


@dataclass
class KatCheck:
    count: int
    op: str
    ok: bool
    field: str | None = None
    offset: int | None = None
    detail: str = ""


@dataclass
class KatReport:
    level: int
    checks: list[KatCheck] = field(default_factory=list)

    @property
    def failures(self) -> list[KatCheck]:
        return [c for c in self.checks if not c.ok]

    @property
    def passed(self) -> bool:
        return bool(self.checks) and not self.failures

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "total": len(self.checks),
            "failed": len(self.failures),
            "checks": [
                {"count": c.count, "op": c.op, "ok": c.ok, "field": c.field, "offset": c.offset}
                for c in self.checks
            ],
        }


class CtrDrbg:
    """AES-256 CTR_DRBG without derivation function, as used by NIST PQC KAT generators."""

    def __init__(self, entropy: bytes, personalization: bytes = b""):
        if len(entropy) != 48:
            raise ParameterError("DRBG entropy input must be 48 bytes")
        seed = bytearray(entropy)
        for i, b in enumerate(personalization[:48]):
            seed[i] ^= b
        self._key = bytes(32)
        self._v = bytes(16)
        self._update(bytes(seed))

    def _block(self) -> bytes:
        self._v = ((int.from_bytes(self._v, "big") + 1) % (1 << 128)).to_bytes(16, "big")
        enc = Cipher(algorithms.AES(self._key), modes.ECB()).encryptor()
        return enc.update(self._v) + enc.finalize()

    def _update(self, provided: bytes | None) -> None:
        temp = b"".join(self._block() for _ in range(3))
        if provided is not None:
            temp = bytes(a ^ b for a, b in zip(temp, provided))
        self._key, self._v = temp[:32], temp[32:]

    def random_bytes(self, n: int) -> bytes:
        out = bytearray()
        while len(out) < n:
            out += self._block()
        self._update(None)
        return bytes(out[:n])


def parse_rsp(text: str, fmt: str = "fips203") -> list[KatRecord]:
    if fmt not in FORMATS:
        raise KatFormatError(f"unknown KAT format {fmt!r}; expected one of {sorted(FORMATS)}")
    names = FORMATS[fmt]
    records: list[KatRecord] = []
    current: KatRecord | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            continue
        m = _LINE.match(line)
        if not m:
            raise KatFormatError(f"line {lineno}: expected 'key = hex', got {raw!r}")
        key, value = m.group(1).lower(), m.group(2)
        if key == "count":
            current = KatRecord(int(value), {}, lineno)
            records.append(current)
            continue
        if current is None:
            raise KatFormatError(f"line {lineno}: field {key!r} before any 'count'")
        if key not in names:
            continue
        try:
            current.fields[names[key]] = bytes.fromhex(value)
        except ValueError:
            raise KatFormatError(f"line {lineno}: odd-length or invalid hex for {key!r}") from None
    if not records:
        raise KatFormatError("no KAT records found")
    return records


def load_rsp(path: str | Path, fmt: str = "fips203") -> list[KatRecord]:
    return parse_rsp(Path(path).read_text(), fmt)


def bundled_kat_path(level: int) -> Path:
    get_params(level)
    return Path(str(resources.files("pq5g.kem") / "data" / f"kat_mlkem_{level}.rsp"))


def infer_level(records: list[KatRecord]) -> int:
    for rec in records:
        for name, attr in (("ek", "ek_len"), ("dk", "dk_len"), ("ct", "ct_len")):
            if name in rec.fields:
                for p in PARAMS.values():
                    if len(rec.fields[name]) == getattr(p, attr):
                        return p.level
    raise KatFormatError("cannot infer ML-KEM level from record field lengths")


def _first_diff(a: bytes, b: bytes) -> int:
    for i, (x, y) in enumerate(zip(a, b)):
        if x != y:
            return i
    return min(len(a), len(b))


def _compare(count: int, op: str, got: dict[str, bytes], want: dict[str, bytes]) -> KatCheck:
    for name, value in got.items():
        if name in want and want[name] != value:
            return KatCheck(count, op, False, name, _first_diff(value, want[name]))
    return KatCheck(count, op, True)


def check_record(kem: MLKEM, rec: KatRecord) -> list[KatCheck]:
    f = dict(rec.fields)
    checks: list[KatCheck] = []
    if "seed" in f and not ("d" in f and "z" in f):
        drbg = CtrDrbg(f["seed"])
        dz = drbg.random_bytes(64)
        f.setdefault("d", dz[:32])
        f.setdefault("z", dz[32:])
        f.setdefault("m", drbg.random_bytes(32))

    def run(op, fn):
        try:
            checks.append(fn())
        except ParameterError as exc:
            checks.append(KatCheck(rec.count, op, False, detail=str(exc)))

    if {"d", "z"} <= f.keys() and ({"ek", "dk"} & f.keys()):
        def keygen():
            ek, dk = kem.keygen(f["d"] + f["z"])
            return _compare(rec.count, "keygen", {"ek": ek, "dk": dk}, f)
        run("keygen", keygen)
    if {"ek", "m"} <= f.keys() and ({"ct", "ss"} & f.keys()):
        def encaps():
            ct, ss = kem.encaps(f["ek"], f["m"])
            return _compare(rec.count, "encaps", {"ct": ct, "ss": ss}, f)
        run("encaps", encaps)
    if {"dk", "ct", "ss"} <= f.keys():
        run("decaps", lambda: _compare(rec.count, "decaps", {"ss": kem.decaps(f["dk"], f["ct"])}, f))
    if not checks:
        checks.append(KatCheck(rec.count, "none", False, detail="record has no checkable field set"))
    return checks


def verify(records: list[KatRecord], level: int | KemParams | None = None, kernels=None) -> KatReport:
    params = get_params(level) if level is not None else get_params(infer_level(records))
    kem = MLKEM(params, kernels)
    report = KatReport(params.level)
    for rec in records:
        report.checks.extend(check_record(kem, rec))
    return report
