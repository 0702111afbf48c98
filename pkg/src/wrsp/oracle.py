"""Independent level-1 oracle: exhaustive word closure from the presentation.

Elements are canonical words over the six presentation generators
x, y0, y1, s0, s1, c (c is the commutator of y0 and y1).  Multiplication
concatenates letter sequences and reduces them by applying the defining
relations one at a time: pull every x to the front (conjugation swaps the
base and square indices), sort the base letters (an out-of-order swap
deposits c), let squares fall into the s letters, and cancel involutions.
No packed arithmetic, shift tables or correction tables are involved, so
agreement with the fast engine on all 64 x 64 products is a real check.
"""

from __future__ import annotations

from .engine import Element, GroupContext

X, Y0, Y1, S0, S1, C = range(6)
GEN_NAMES = ("x", "y0", "y1", "s0", "s1", "c")

_X_CONJ = {Y0: Y1, Y1: Y0, S0: S1, S1: S0, C: C}
_CENTRAL = (S0, S1, C)

_MAX_STEPS = 100_000


def reduce_word(word) -> tuple[int, ...]:
    """Canonical form (x^t y0^a0 y1^a1 s0^z0 s1^z1 c^z2) of a letter list."""
    w = list(word)
    for _ in range(_MAX_STEPS):
        changed = False
        for p in range(len(w) - 1):
            u, v = w[p], w[p + 1]
            if u == v:
                if u == X:
                    del w[p:p + 2]  # x has order 2 at level 1
                elif u == Y0:
                    w[p:p + 2] = [S0]
                elif u == Y1:
                    w[p:p + 2] = [S1]
                else:
                    del w[p:p + 2]  # central involution
                changed = True
                break
            if v == X and u != X:
                w[p], w[p + 1] = X, _X_CONJ[u]  # u x = x u^x
                changed = True
                break
            if u == Y1 and v == Y0:
                w[p:p + 2] = [Y0, Y1, C]  # y1 y0 = y0 y1 c
                changed = True
                break
            if u in _CENTRAL and v in (Y0, Y1):
                w[p], w[p + 1] = v, u  # centrals move right
                changed = True
                break
            if u in _CENTRAL and v in _CENTRAL and u > v:
                w[p], w[p + 1] = v, u
                changed = True
                break
        if not changed:
            return tuple(w)
    raise RuntimeError("word reduction did not terminate")


def word_of_form(t: int, a0: int, a1: int, z0: int, z1: int, z2: int) -> tuple[int, ...]:
    return tuple([X] * t + [Y0] * a0 + [Y1] * a1 + [S0] * z0 + [S1] * z1 + [C] * z2)


class OracleGroup:
    """The 64 canonical forms with multiplication by word reduction."""

    def __init__(self):
        gens = [reduce_word([X]), reduce_word([Y0])]
        seen = {(): 0}
        forms: list[tuple[int, ...]] = [()]
        frontier = [()]
        while frontier:
            nxt = []
            for w in frontier:
                for g in gens:
                    prod = reduce_word(w + g)
                    if prod not in seen:
                        seen[prod] = len(forms)
                        forms.append(prod)
                        nxt.append(prod)
            frontier = nxt
        self.forms = forms
        self.index = seen

    @property
    def order(self) -> int:
        return len(self.forms)

    def mul(self, i: int, j: int) -> int:
        return self.index[reduce_word(self.forms[i] + self.forms[j])]

    def identity(self) -> int:
        return self.index[()]

    def order_of(self, i: int) -> int:
        o = 1
        cur = i
        e = self.identity()
        while cur != e:
            cur = self.mul(cur, cur)
            o <<= 1
            if o > 64:
                raise RuntimeError("oracle element order out of range")
        return o

    def order_census(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for i in range(self.order):
            o = self.order_of(i)
            out[o] = out.get(o, 0) + 1
        return out

    def centre(self) -> list[int]:
        return [i for i in range(self.order)
                if all(self.mul(i, j) == self.mul(j, i) for j in range(self.order))]


def build_oracle() -> OracleGroup:
    g = OracleGroup()
    if g.order != 64:
        raise RuntimeError(f"level-1 word closure found {g.order} elements, expected 64")
    return g


def oracle_index_of(oracle: OracleGroup, g: Element) -> int:
    """Oracle index of an engine element via its normal-form word."""
    ctx = g.ctx
    if ctx.k != 1:
        raise ValueError("the oracle only covers level 1")
    w = word_of_form(
        g.t, g.a & 1, (g.a >> 1) & 1, g.z & 1, (g.z >> 1) & 1, (g.z >> 2) & 1,
    )
    canon = reduce_word(w)
    if canon != w:
        raise RuntimeError("engine normal form is not oracle-canonical")
    return oracle.index[canon]


def compare_multiplication_tables(ctx: GroupContext, oracle: OracleGroup) -> dict:
    """Full 64 x 64 comparison of engine products against word reduction."""
    if ctx.k != 1:
        raise ValueError("the oracle only covers level 1")
    elements = list(ctx.all_elements())
    idx = [oracle_index_of(oracle, g) for g in elements]
    if len(set(idx)) != 64:
        return {"ok": False, "reason": "engine forms are not pairwise distinct in the oracle"}
    mismatches = []
    for i, g in enumerate(elements):
        for j, h in enumerate(elements):
            if oracle.mul(idx[i], idx[j]) != oracle_index_of(oracle, g * h):
                mismatches.append((g.text(), h.text()))
    return {"ok": not mismatches, "mismatches": mismatches[:4],
            "pairs_checked": len(elements) ** 2}
