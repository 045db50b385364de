"""Size of the lifted shattering families against the ground size, each certified by a full sweep."""
import argparse
import json
import math
import time
from dataclasses import asdict, dataclass, field

from permshatter import checkers
from permshatter.constructions import shatter_family, shatter_plan


@dataclass
class SizesConfig:
    k: int = 3
    grounds: list[int] = field(default_factory=lambda: [4, 8, 16, 32, 64, 128])
    verify_limit: int = 3 * 10**7  # skip the sweep beyond this many k-tuples
    threads: int = 1


def run(cfg: SizesConfig) -> dict:
    rows = []
    for N in cfg.grounds:
        start = time.perf_counter()
        fam = shatter_family(cfg.k, N)
        verified = None
        if math.comb(N, cfg.k) <= cfg.verify_limit:
            verified = checkers.satisfies_total(fam, cfg.k, cfg.threads)[0]
        rows.append(
            {
                "N": N,
                "size": fam.m,
                "size_over_log2N": round(fam.m / math.log2(N), 3),
                "plan": [list(b) for b in shatter_plan(cfg.k, N)],
                "verified": verified,
                "seconds": round(time.perf_counter() - start, 3),
            }
        )
    return {"config": asdict(cfg), "rows": rows}


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--grounds", type=int, nargs="+", default=[4, 8, 16, 32, 64, 128])
    ap.add_argument("--threads", type=int, default=1)
    a = ap.parse_args()
    print(json.dumps(run(SizesConfig(a.k, a.grounds, threads=a.threads)), indent=2))
