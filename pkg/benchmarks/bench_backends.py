"""Compare the compiled ring kernels against the pure-Python fallback.

    python benchmarks/bench_backends.py [--repeat N] [--json out.json]

Times the kernel primitives and full ML-KEM operations on each importable
backend and prints the speedup of the compiled path.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import timeit

from pq5g.kem import LEVELS, MLKEM
from pq5g.kem._backend import available_backends

Q = 3329


def kernel_cases(kern, r: random.Random) -> dict:
    a = [r.randrange(Q) for _ in range(256)]
    b = [r.randrange(Q) for _ in range(256)]
    a_hat, b_hat = kern.ntt(a), kern.ntt(b)
    stream = r.randbytes(64 * 3)
    xof = r.randbytes(168 * 3)
    return {
        "ntt": lambda: kern.ntt(a),
        "inv_ntt": lambda: kern.inv_ntt(a_hat),
        "multiply_ntts": lambda: kern.multiply_ntts(a_hat, b_hat),
        "compress_poly(10)": lambda: kern.compress_poly(10, a),
        "byte_encode(12)": lambda: kern.byte_encode(12, a),
        "sample_cbd(3)": lambda: kern.sample_cbd(3, stream),
        "sample_ntt": lambda: kern.sample_ntt(xof),
    }


def kem_cases(kern, r: random.Random) -> dict:
    out = {}
    for level in LEVELS:
        kem = MLKEM(level, kern)
        seed, m = r.randbytes(64), r.randbytes(32)
        ek, dk = kem.keygen(seed)
        ct, _ = kem.encaps(ek, m)
        out[f"keygen-{level}"] = lambda kem=kem, seed=seed: kem.keygen(seed)
        out[f"encaps-{level}"] = lambda kem=kem, ek=ek, m=m: kem.encaps(ek, m)
        out[f"decaps-{level}"] = lambda kem=kem, dk=dk, ct=ct: kem.decaps(dk, ct)
    return out


def time_case(fn, repeat: int) -> float:
    """Best-of-five mean seconds per call."""
    fn()
    return min(timeit.repeat(fn, number=repeat, repeat=5)) / repeat


def run(repeat: int) -> dict:
    backends = available_backends()
    results: dict[str, dict[str, float]] = {}
    for name, kern in backends.items():
        r = random.Random(0)
        cases = {**kernel_cases(kern, r), **kem_cases(kern, r)}
        results[name] = {case: time_case(fn, repeat) for case, fn in cases.items()}
    return {"schema": "pq5g.backend_bench/v1", "repeat": repeat, "seconds_per_call": results}


def report(doc: dict) -> None:
    res = doc["seconds_per_call"]
    names = sorted(res)
    cases = list(res[names[0]])
    header = f"{'case':<20}" + "".join(f"{n + ' us':>14}" for n in names)
    if "compiled" in res:
        header += f"{'speedup':>10}"
    print(header)
    for case in cases:
        line = f"{case:<20}" + "".join(f"{res[n][case] * 1e6:>14.1f}" for n in names)
        if "compiled" in res:
            line += f"{res['python'][case] / res['compiled'][case]:>9.1f}x"
        print(line)
    if "compiled" not in res:
        print("compiled extension not built; only the pure-Python backend was timed", file=sys.stderr)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=20, help="calls per timing sample")
    p.add_argument("--json", type=argparse.FileType("w"), default=None, help="write raw timings as JSON")
    args = p.parse_args(argv)
    doc = run(args.repeat)
    report(doc)
    if args.json:
        json.dump(doc, args.json, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
