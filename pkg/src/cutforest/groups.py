"""Groups given by finite complete rewriting systems over single-letter generators."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

from .errors import OracleError, PreconditionError
from .graph_core import check_guard

WORD_GUARD = 200_000


@dataclass(frozen=True)
class GroupOracle:
    """A group with a distinguished subgroup H and a finite set S with G = <H, S>.

    Words are strings; ``inverses`` maps every letter to a word for its inverse.
    ``coset_fn`` takes a normal form g to the canonical normal form of gH and
    ``h_fn`` decides membership in H on normal forms.
    """

    name: str
    letters: tuple[str, ...]
    rules: tuple[tuple[str, str], ...]
    inverses: dict
    h_gens: tuple[str, ...]
    s_gens: tuple[str, ...]
    coset_fn: Callable[[str], str] = field(repr=False)
    h_fn: Callable[[str], bool] = field(repr=False)
    description: str = ""
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    def normal_form(self, word: str, rightmost: bool = False) -> str:
        if not rightmost:
            hit = self._memo.get(word)
            if hit is None:
                hit = self._memo[word] = self._rewrite(word, False)
            return hit
        return self._rewrite(word, True)

    def _rewrite(self, word: str, rightmost: bool) -> str:
        for ch in word:
            if ch not in self.inverses:
                raise PreconditionError(f"letter {ch!r} is not a generator of {self.name}")
        w = word
        for _ in range(10_000 + 50 * len(word)):
            best = None
            for lhs, rhs in self.rules:
                i = w.rfind(lhs) if rightmost else w.find(lhs)
                if i < 0:
                    continue
                if best is None or (i > best[0] if rightmost else i < best[0]):
                    best = (i, lhs, rhs)
            if best is None:
                return w
            i, lhs, rhs = best
            w = w[:i] + rhs + w[i + len(lhs):]
        raise OracleError(f"rewriting of {word!r} in {self.name} does not terminate")

    nf = normal_form

    def mul(self, *words: str) -> str:
        return self.normal_form("".join(words))

    def inv(self, word: str) -> str:
        return self.normal_form("".join(self.inverses[c] for c in reversed(word)))

    def coset(self, word: str) -> str:
        return self.coset_fn(self.normal_form(word))

    def in_H(self, word: str) -> bool:
        return self.h_fn(self.normal_form(word))

    def in_conjugate(self, word: str, g: str) -> bool:
        """Membership in gHg^-1."""
        return self.in_H(self.inv(g) + word + g)

    def ball(self, radius: int) -> list[str]:
        """Normal forms of length at most ``radius``, shortlex ordered."""
        seen = {""}
        frontier = {""}
        for _ in range(radius):
            nxt = set()
            for w in frontier:
                for c in self.letters:
                    u = self.normal_form(w + c)
                    if len(u) <= radius and u not in seen:
                        seen.add(u)
                        nxt.add(u)
            check_guard(len(seen), WORD_GUARD, "ball size")
            frontier = nxt
        return sorted(seen, key=shortlex)

    def h_ball(self, radius: int) -> list[str]:
        """Elements of H that are products of at most ``radius`` H-generators or inverses."""
        gens = [self.normal_form(h) for h in self.h_gens] + [self.inv(h) for h in self.h_gens]
        seen = {""}
        frontier = {""}
        for _ in range(radius):
            nxt = set()
            for w in frontier:
                for h in gens:
                    u = self.normal_form(w + h)
                    if u not in seen:
                        seen.add(u)
                        nxt.add(u)
            frontier = nxt
        return sorted(seen, key=shortlex)

    def check_confluence(self, max_len: int) -> None:
        """Leftmost and rightmost rewriting agree on every word up to ``max_len``."""
        check_guard(len(self.letters) ** max_len, WORD_GUARD, "confluence check size")
        for n in range(max_len + 1):
            for t in itertools.product(self.letters, repeat=n):
                w = "".join(t)
                a, b = self.normal_form(w), self.normal_form(w, rightmost=True)
                if a != b:
                    raise OracleError(f"{self.name}: {w!r} has normal forms {a!r} and {b!r}")

    def check_axioms(self, sample: list[str]) -> None:
        for x, y, z in itertools.product(sample, repeat=3):
            if self.mul(self.mul(x, y), z) != self.mul(x, self.mul(y, z)):
                raise OracleError(f"{self.name}: associativity fails on {x!r},{y!r},{z!r}")
        for x in sample:
            if self.mul(x, self.inv(x)) != "" or self.mul(self.inv(x), x) != "":
                raise OracleError(f"{self.name}: bad inverse for {x!r}")
        hs = [x for x in sample if self.in_H(x)]
        for x, y in itertools.product(hs, repeat=2):
            if not self.in_H(x + self.inv(y)):
                raise OracleError(f"{self.name}: H not closed on {x!r},{y!r}")
        for x in sample:
            c = self.coset(x)
            if not self.in_H(self.inv(x) + c):
                raise OracleError(f"{self.name}: coset rep {c!r} not in {x!r}H")


def shortlex(w: str):
    return (len(w), w)


def _free_rules(pairs):
    out = []
    for a, b in pairs:
        out += [(a + b, ""), (b + a, "")]
    return out


def _z() -> GroupOracle:
    return GroupOracle("z", ("t", "T"), tuple(_free_rules(["tT"])), {"t": "T", "T": "t"},
                       (), ("t",), lambda w: w, lambda w: w == "",
                       "Z = <t>, H trivial, S = {t}")


def _z2() -> GroupOracle:
    rules = _free_rules(["xX", "yY"]) + [("yx", "xy"), ("yX", "Xy"), ("Yx", "xY"), ("YX", "XY")]
    return GroupOracle("z2", ("x", "X", "y", "Y"), tuple(rules),
                       {"x": "X", "X": "x", "y": "Y", "Y": "y"}, ("x",), ("x", "y"),
                       lambda w: w.lstrip("xX"), lambda w: not set(w) & {"y", "Y"},
                       "Z^2 = <x, y>, H = <x>, S = {x, y}")


def _f2() -> GroupOracle:
    return GroupOracle("f2", ("a", "A", "b", "B"), tuple(_free_rules(["aA", "bB"])),
                       {"a": "A", "A": "a", "b": "B", "B": "b"}, ("a",), ("b",),
                       lambda w: w.rstrip("aA"), lambda w: set(w) <= {"a"} or set(w) <= {"A"},
                       "F2 = <a, b>, H = <a>, S = {b}")


def _dinf() -> GroupOracle:
    return GroupOracle("dinf", ("s", "t"), (("ss", ""), ("tt", "")), {"s": "s", "t": "t"},
                       ("s",), ("t",), lambda w: w.rstrip("s"), lambda w: w in ("", "s"),
                       "D_inf = <s, t | s^2, t^2>, H = <s>, S = {t}")


def _z2z3() -> GroupOracle:
    return GroupOracle("z2z3", ("a", "b"), (("aa", ""), ("bbb", "")), {"a": "a", "b": "bb"},
                       ("b",), ("a",), lambda w: w.rstrip("b"), lambda w: set(w) <= {"b"},
                       "Z2 * Z3 = <a, b | a^2, b^3>, H = <b>, S = {a}")


def _amalgam() -> GroupOracle:
    # z = a^2 = b^2 is central; normal forms are z^k followed by an alternating a/b word
    rules = [("A", "Za"), ("B", "Zb"), ("aa", "z"), ("bb", "z"), ("zZ", ""), ("Zz", ""),
             ("az", "za"), ("bz", "zb"), ("aZ", "Za"), ("bZ", "Zb")]

    def coset(w):
        return w.lstrip("zZ").rstrip("a")

    return GroupOracle("bs-amalgam", ("a", "A", "b", "B", "z", "Z"), tuple(rules),
                       {"a": "A", "A": "a", "b": "B", "B": "b", "z": "Z", "Z": "z"},
                       ("a",), ("b",), coset, lambda w: w.lstrip("zZ") in ("", "a"),
                       "Z *_{2Z} Z = <a, b | a^2 = b^2>, H = <a>, S = {b}")


GROUP_FIXTURES = {
    "z": _z, "z2": _z2, "f2": _f2, "dinf": _dinf, "z2z3": _z2z3, "bs-amalgam": _amalgam,
}


def group_fixture(name: str) -> GroupOracle:
    try:
        return GROUP_FIXTURES[name]()
    except KeyError:
        raise PreconditionError(
            f"unknown group fixture {name!r}; known: {sorted(GROUP_FIXTURES)}") from None
