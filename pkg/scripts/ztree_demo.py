"""Orbit points of a line group, their Z-tree, and a Sageev round trip."""
import argparse
import json
from dataclasses import dataclass

from cutforest.cubing import build_z_tree, orbit_points, order_invariance, round_trip, zero_hyperbolicity_check
from cutforest.verify import line_report


@dataclass
class Config:
    group: str = "dinf"
    radius: int = 6
    ball: int = 4
    trials: int = 10


def main(cfg):
    rep = line_report(cfg.group, cfg.radius)
    pts = orbit_points(rep.arena, rep.cut, rep.arena.oracle.ball(cfg.ball))
    hyp = zero_hyperbolicity_check([p for _, p in pts])
    out = {"group": cfg.group, "points": {w or "1": sorted(p.delta) for w, p in pts},
           "zero_hyperbolic": hyp.ok}
    if hyp.ok and len(pts) > 1:
        t = build_z_tree([p for _, p in pts])
        out["tree"] = t.to_json()
        out["order_invariant"] = order_invariance([p for _, p in pts], cfg.trials)
    rt = round_trip(rep, 2)
    out["round_trip"] = {"isomorphic": rt.isomorphic, "partition_match": rt.partition_match, "walls": rt.walls}
    out["A_plus_Ax"] = {x: f.to_json() for x, f in rep.finiteness.items()}
    print(json.dumps(out, indent=2, default=str))


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    for k, v in vars(Config()).items():
        p.add_argument(f"--{k}", type=type(v), default=v)
    main(Config(**vars(p.parse_args())))
