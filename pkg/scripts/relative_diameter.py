"""Relative tree size and diameter per group fixture and arena radius.

The amalgam row is the interesting one: its relative tree does not shrink
to a star as the truncation grows.
"""
import argparse
from dataclasses import dataclass, field

from cutforest.errors import CutforestError
from cutforest.group_arena import arena_fixture
from cutforest.relative_structure import relative_nested_system


@dataclass
class Config:
    groups: list = field(default_factory=lambda: ["z", "dinf", "z2", "bs-amalgam", "z2z3"])
    radii: list = field(default_factory=lambda: [3, 4, 5])


def main(cfg):
    print(f"{'group':12} {'r':>2} {'walls':>5} {'verts':>5} {'diam':>4}")
    for name in cfg.groups:
        for r in cfg.radii:
            try:
                rel = relative_nested_system(arena_fixture(name, r, r - 1), 1)
            except CutforestError as exc:
                print(f"{name:12} {r:>2}  {type(exc).__name__}: {exc}")
                continue
            print(f"{name:12} {r:>2} {len(rel.system):>5} {len(rel.tree):>5} {rel.diameter():>4}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--groups", nargs="+", default=Config().groups)
    p.add_argument("--radii", nargs="+", type=int, default=Config().radii)
    main(Config(**vars(p.parse_args())))
