"""Convert NIST ACVP ML-KEM JSON vector sets into the bundled .rsp files.

Usage: python tools/acvp_to_rsp.py ASSETS_DIR OUT_DIR

ASSETS_DIR must contain ``ML-KEM-keyGen-FIPS203/`` and
``ML-KEM-encapDecap-FIPS203/`` with their prompt.json/expectedResults.json.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path


def _load(path: Path) -> dict:
    with path.open() as fh:
        return json.load(fh)


def _results_by_tc(results: dict) -> dict[int, dict]:
    return {t["tcId"]: t for g in results["testGroups"] for t in g["tests"]}


def convert(assets: Path, out_dir: Path) -> None:
    records: dict[str, list[dict]] = {}
    kg = assets / "ML-KEM-keyGen-FIPS203"
    prompt, expected = _load(kg / "prompt.json"), _results_by_tc(_load(kg / "expectedResults.json"))
    for group in prompt["testGroups"]:
        for t in group["tests"]:
            r = expected[t["tcId"]]
            records.setdefault(group["parameterSet"], []).append(
                {"count": t["tcId"], "d": t["d"], "z": t["z"], "ek": r["ek"], "dk": r["dk"]}
            )
    ed = assets / "ML-KEM-encapDecap-FIPS203"
    prompt, expected = _load(ed / "prompt.json"), _results_by_tc(_load(ed / "expectedResults.json"))
    for group in prompt["testGroups"]:
        for t in group["tests"]:
            r = expected[t["tcId"]]
            if group["function"] == "encapsulation":
                rec = {"count": t["tcId"], "ek": t["ek"], "m": t["m"], "ct": r["c"], "ss": r["k"]}
            else:
                rec = {"count": t["tcId"], "dk": group["dk"], "ct": t["c"], "ss": r["k"]}
            records.setdefault(group["parameterSet"], []).append(rec)

    out_dir.mkdir(parents=True, exist_ok=True)
    for name, recs in records.items():
        level = name.rsplit("-", 1)[1]
        lines = [
            f"# {name} known-answer vectors",
            "# source: NIST ACVP ML-KEM-keyGen-FIPS203 and ML-KEM-encapDecap-FIPS203 sample vector sets",
            "# records with d/z/ek/dk check keygen, ek/m/ct/ss check encaps, dk/ct/ss check decaps",
            "",
        ]
        for rec in recs:
            for key, value in rec.items():
                lines.append(f"{key} = {value}")
            lines.append("")
        (out_dir / f"kat_mlkem_{level}.rsp").write_text("\n".join(lines))


if __name__ == "__main__":
    convert(Path(sys.argv[1]), Path(sys.argv[2]))
