"""Tally which crossing-table rows each group actually hits.

    python scripts/crossing_table.py --groups dinf z2 --ball 3
"""
import argparse
import json
from collections import Counter
from dataclasses import dataclass, field, asdict

from cutforest.relative_structure import CASE_TABLE
from cutforest.verify import crossing_sweep


@dataclass
class Config:
    groups: list = field(default_factory=lambda: ["dinf", "f2", "z2", "bs-amalgam"])
    radius: int = 4
    interior: int = 3
    ball: int = 3


def run(cfg: Config) -> dict:
    out = {"config": asdict(cfg), "groups": {}}
    for name in cfg.groups:
        _, cases, lost = crossing_sweep(name, cfg.radius, cfg.interior, cfg.ball)
        rows = Counter((c.o_corner, c.go_corner, c.verdict) for *_, c in cases)
        out["groups"][name] = {
            "runs": len(cases),
            "skipped": lost,
            "bad": sum(not (c.nested and c.sums_ok and c.table_match) for *_, c in cases),
            "rows": [{"o": o, "go": go, "verdict": v, "count": n} for (o, go, v), n in sorted(rows.items())],
        }
    out["table"] = {f"{o}/{go}": [e for _, e in v] for (o, go), v in sorted(CASE_TABLE.items())}
    return out


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--groups", nargs="+", default=Config().groups)
    p.add_argument("--radius", type=int, default=4)
    p.add_argument("--interior", type=int, default=3)
    p.add_argument("--ball", type=int, default=3)
    print(json.dumps(run(Config(**vars(p.parse_args()))), indent=2, default=str))
