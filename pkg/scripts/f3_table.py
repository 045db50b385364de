"""Exact f_3(n, t) and F_3(n, 6) on small ground sets, with the search effort behind each value."""
import argparse
import json
from dataclasses import asdict, dataclass, field

from permshatter import oracle


@dataclass
class TableConfig:
    grounds: list[int] = field(default_factory=lambda: [4, 5])
    k: int = 3
    node_budget: int = 10**9
    threads: int = 1


def run(cfg: TableConfig) -> dict:
    rows = []
    for n in cfg.grounds:
        for t in range(1, 7):
            rep = oracle.min_family_size(n, cfg.k, t, node_budget=cfg.node_budget, threads=cfg.threads)
            rows.append({"n": n, "t": t, "f": rep.optimum, "proved": rep.proof_of_optimality, "nodes": rep.nodes_explored})
    probe = oracle.monotonicity_probe(cfg.k, 6, cfg.grounds, node_budget=cfg.node_budget, threads=cfg.threads)
    return {"config": asdict(cfg), "min_family_size": rows, "max_fraction": probe.to_json()}


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grounds", type=int, nargs="+", default=[4, 5])
    ap.add_argument("--node-budget", type=int, default=10**9)
    ap.add_argument("--threads", type=int, default=1)
    a = ap.parse_args()
    print(json.dumps(run(TableConfig(a.grounds, 3, a.node_budget, a.threads)), indent=2))
