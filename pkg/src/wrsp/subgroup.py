"""Subgroup arithmetic via induced generating sequences over a fixed chain.

Positions along the chain: 0 is the top exponent (relative order dividing
2**k), positions 1..n are the base coordinates and positions n+1..n+d the
central coordinates, each of relative order 2.  A subgroup is stored as a
fully reduced echelon sequence: strictly increasing leading positions,
normalised leading values, zeros at every deeper leader's position.

Reduction always multiplies on the right.  Right multiplication by a member
with leading position p never disturbs coordinates below p (the conjugation
in the product rule is driven by the right factor's top exponent, which is
zero for every leader except the one at position 0), so the reduced
sequence is canonical: it depends only on the subgroup, not on the
generators it was computed from.
"""

from __future__ import annotations

from collections import deque

from .engine import Element, GroupContext, commutator, parse_element


class UnsupportedExactIntersection(RuntimeError):
    """Raised when an exact generic intersection is out of supported range."""


def _v2(t: int) -> int:
    return (t & -t).bit_length() - 1


def _lead(ctx: GroupContext, g: Element) -> int:
    if g.t:
        return 0
    if g.a:
        return 1 + _v2(g.a)
    if g.z:
        return 1 + ctx.n + _v2(g.z)
    return ctx.total_positions


def _coordinate(ctx: GroupContext, g: Element, p: int) -> int:
    if p == 0:
        return g.t
    if p <= ctx.n:
        return (g.a >> (p - 1)) & 1
    return (g.z >> (p - 1 - ctx.n)) & 1


class Subgroup:
    """A subgroup held as a canonical induced generating sequence."""

    __slots__ = ("ctx", "igs", "log_order", "_inv_cache")

    def __init__(self, ctx: GroupContext, igs: tuple[Element, ...], log_order: int):
        self.ctx = ctx
        self.igs = igs
        self.log_order = log_order
        self._inv_cache = None

    # internal: position -> member map plus sorted positions
    def _table(self):
        if self._inv_cache is None:
            members = {_lead(self.ctx, m): m for m in self.igs}
            self._inv_cache = (sorted(members), members)
        return self._inv_cache

    def reduce(self, g: Element) -> Element:
        """Canonical coset representative of g modulo this subgroup."""
        positions, members = self._table()
        return _reduce(self.ctx, positions, members, g)

    def contains(self, g: Element) -> bool:
        return self.reduce(g).is_identity()

    def contains_subgroup(self, other: "Subgroup") -> bool:
        return all(self.contains(m) for m in other.igs)

    def leader_orders(self) -> list[int]:
        """Relative order of each member along the chain."""
        out = []
        for m in self.igs:
            if m.t:
                out.append(1 << (self.ctx.k - _v2(m.t)))
            else:
                out.append(2)
        return out

    def enumerate_elements(self) -> list[Element]:
        if self.log_order > 20:
            raise ValueError("enumeration is limited to subgroups of order 2**20 or less")
        els = [self.ctx.identity()]
        for m, r in zip(self.igs, self.leader_orders()):
            nxt = []
            for e in els:
                cur = e
                for _ in range(r):
                    nxt.append(cur)
                    cur = cur * m
            els = nxt
        return els

    def is_normal(self) -> bool:
        ctx = self.ctx
        for c in (ctx.x(), ctx.y()):
            for m in self.igs:
                if not self.contains(m.conj(c)):
                    return False
        return True

    def is_trivial(self) -> bool:
        return self.log_order == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self.ctx.k == other.ctx.k and self.igs == other.igs

    def __hash__(self) -> int:
        return hash((self.ctx.k, self.igs))

    def __repr__(self) -> str:
        return f"Subgroup(k={self.ctx.k}, log_order={self.log_order})"

    # -- serialisation ----------------------------------------------------

    def to_lines(self) -> list[str]:
        head = f"subgroup level={self.ctx.k} log_order={self.log_order}"
        return [head] + [m.text() for m in self.igs]

    @classmethod
    def from_lines(cls, ctx: GroupContext, lines: list[str]) -> "Subgroup":
        if not lines:
            raise ValueError("empty subgroup serialisation")
        head = lines[0].split()
        if len(head) != 3 or head[0] != "subgroup":
            raise ValueError(f"malformed subgroup header: {lines[0]!r}")
        level = int(head[1].split("=", 1)[1])
        declared = int(head[2].split("=", 1)[1])
        if level != ctx.k:
            raise ValueError(f"serialised level {level} does not match context level {ctx.k}")
        gens = [parse_element(ctx, ln) for ln in lines[1:]]
        sub = close(gens) if gens else close([ctx.identity()])
        if sub.log_order != declared or list(m.text() for m in sub.igs) != lines[1:]:
            raise ValueError("serialised sequence is not a canonical closed sequence")
        return sub


def _reduce(ctx: GroupContext, positions: list[int], members: dict, g: Element) -> Element:
    n = ctx.n
    for idx, p in enumerate(positions):
        if p == 0:
            if g.t:
                L = members[0]
                v = _v2(L.t)  # leader normalised so that L.t == 1 << v
                if _v2(g.t) >= v:
                    g = g * (L ** (-(g.t >> v)))
        elif p <= n:
            if (g.a >> (p - 1)) & 1:
                L = members[p]
                g = g * ctx.inv(L)
        else:
            # all remaining leaders are central-block members: pure xor
            z = g.z
            for q in positions[idx:]:
                if (z >> (q - 1 - n)) & 1:
                    z ^= members[q].z
            return Element(ctx, g.t, g.a, z)
    return g


def _normalize_top(ctx: GroupContext, h: Element) -> Element:
    v = _v2(h.t)
    u = h.t >> v
    if u == 1:
        return h
    return h ** pow(u, -1, 1 << (ctx.k - v))


def _push_obligations(ctx, members, positions, new, queue, conjugators):
    new_zb = new.is_central_block()
    # relative-order power of the new leader
    if not new_zb:
        v = _v2(new.t) if new.t else None
        if v is not None:
            queue.append(new ** (1 << (ctx.k - v)))
        else:
            queue.append(new * new)
    # commutators with existing leaders (central block commutes with every
    # trivial-top element, so those pairs are skipped)
    for q in positions:
        L = members[q]
        if L is new:
            continue
        L_zb = L.is_central_block()
        if new_zb and L_zb:
            continue
        if (new_zb and L.t == 0) or (L_zb and new.t == 0):
            continue
        queue.append(commutator(new, L))
        queue.append(commutator(L, new))
    for c in conjugators:
        if new_zb and c.t == 0:
            continue
        queue.append(new.conj(c))


def close(gens, conjugators=()) -> Subgroup:
    """Canonical induced sequence for the subgroup generated by gens.

    With conjugators given, the result is additionally closed under
    conjugation by them (pass the group generators to get normal closures).
    """
    gens = list(gens)
    if not gens:
        raise ValueError("close needs at least one generator")
    ctx = gens[0].ctx
    for g in gens:
        if g.ctx.k != ctx.k:
            raise ValueError("generators live at different levels")

    positions: list[int] = []
    members: dict[int, Element] = {}
    queue = deque(gens)
    while queue:
        g = queue.popleft()
        h = _reduce(ctx, positions, members, g)
        if h.is_identity():
            continue
        p = _lead(ctx, h)
        if p == 0:
            h = _normalize_top(ctx, h)
            old = members.get(0)
            if old is not None:
                # irreducible top coordinate: smaller 2-adic value replaces
                members[0] = h
                queue.append(old)
            else:
                positions.insert(0, 0)
                members[0] = h
        else:
            lo, hi = 0, len(positions)
            while lo < hi:
                mid = (lo + hi) // 2
                if positions[mid] < p:
                    lo = mid + 1
                else:
                    hi = mid
            positions.insert(lo, p)
            members[p] = h
        _push_obligations(ctx, members, positions, h, queue, conjugators)

    # canonical pass: clear every deeper leader position, deep to shallow
    for i in range(len(positions) - 2, -1, -1):
        p = positions[i]
        deeper_pos = positions[i + 1:]
        deeper = {q: members[q] for q in deeper_pos}
        members[p] = _reduce(ctx, deeper_pos, deeper, members[p])

    log = 0
    for p in positions:
        log += (ctx.k - _v2(members[p].t)) if p == 0 else 1
    return Subgroup(ctx, tuple(members[p] for p in positions), log)


def trivial_subgroup(ctx: GroupContext) -> Subgroup:
    return close([ctx.identity()])


def full_group(ctx: GroupContext) -> Subgroup:
    got = ctx._subgroup_cache.get("full")
    if got is None:
        got = close([ctx.x(), ctx.y()])
        if got.log_order != ctx.log_order:
            raise RuntimeError("closure of the two generators missed the full group")
        ctx._subgroup_cache["full"] = got
    return got


def _suffix_subgroup(ctx: GroupContext, start: int, cache_key: str) -> Subgroup:
    got = ctx._subgroup_cache.get(cache_key)
    if got is None:
        gens = []
        for p in range(start, ctx.total_positions):
            if p <= ctx.n:
                gens.append(ctx.base_gen(p - 1))
            else:
                gens.append(ctx.central_from_mask(1 << (p - 1 - ctx.n)))
        got = close(gens)
        ctx._subgroup_cache[cache_key] = got
    return got


def base_and_centre_subgroup(ctx: GroupContext) -> Subgroup:
    """All elements with trivial top exponent (index 2**k)."""
    return _suffix_subgroup(ctx, 1, "base_and_centre")


def centre_block_subgroup(ctx: GroupContext) -> Subgroup:
    """All elements with trivial top and base parts."""
    return _suffix_subgroup(ctx, 1 + ctx.n, "centre_block")


def pair_block_subgroup(ctx: GroupContext) -> Subgroup:
    """Span of the pair commutators, the derived subgroup of the base part."""
    return _suffix_subgroup(ctx, 1 + 2 * ctx.n, "pair_block")


def membership(g: Element, sub: Subgroup) -> bool:
    if g.ctx.k != sub.ctx.k:
        raise ValueError("element and subgroup live at different levels")
    return sub.contains(g)


def normal_closure(gens) -> Subgroup:
    gens = list(gens)
    if not gens:
        raise ValueError("normal_closure needs at least one generator")
    ctx = gens[0].ctx
    conj = (ctx.x(), ctx.x().inverse(), ctx.y())
    return close(gens, conjugators=conj)


def join(a: Subgroup, b: Subgroup) -> Subgroup:
    if a.ctx.k != b.ctx.k:
        raise ValueError("subgroups live at different levels")
    gens = a.igs + b.igs
    if not gens:
        return trivial_subgroup(a.ctx)
    return close(gens)


def commutator_subgroup(a: Subgroup, b: Subgroup, debug: bool = False) -> Subgroup:
    """[a, b] for normal a, b: the normal closure of generator commutators."""
    if a.ctx.k != b.ctx.k:
        raise ValueError("subgroups live at different levels")
    ctx = a.ctx
    if debug and (not a.is_normal() or not b.is_normal()):
        raise ValueError("commutator_subgroup needs normal inputs")
    seeds = []
    for u in a.igs:
        u_zb = u.is_central_block()
        for v in b.igs:
            v_zb = v.is_central_block()
            if u_zb and v_zb:
                continue
            if (u_zb and v.t == 0) or (v_zb and u.t == 0):
                continue
            c = commutator(u, v)
            if not c.is_identity():
                seeds.append(c)
    if not seeds:
        return trivial_subgroup(ctx)
    return normal_closure(seeds)


def commutator_with_group(a: Subgroup) -> Subgroup:
    """[a, G] using the two group generators on the right."""
    ctx = a.ctx
    seeds = []
    for u in a.igs:
        for v in (ctx.x(), ctx.y()):
            if u.is_central_block() and v.t == 0:
                continue
            c = commutator(u, v)
            if not c.is_identity():
                seeds.append(c)
    if not seeds:
        return trivial_subgroup(ctx)
    return normal_closure(seeds)


def agemo_mod_derived(s: Subgroup, m: int) -> Subgroup:
    """[s, s] joined with the 2**m-th powers of the members of s.

    Equals s^(2**m) [s, s] because s is abelian modulo [s, s].
    """
    if m < 1:
        raise ValueError("power exponent must be >= 1")
    der = commutator_subgroup(s, s)
    gens = list(der.igs) + [g ** (1 << m) for g in s.igs]
    gens = [g for g in gens if not g.is_identity()]
    if not gens:
        return trivial_subgroup(s.ctx)
    return close(gens)


def _suffix_start_of(sub: Subgroup) -> int | None:
    """Start position when sub is a full suffix-coordinate subgroup."""
    ctx = sub.ctx
    if not sub.igs:
        return ctx.total_positions
    positions = [_lead(ctx, m) for m in sub.igs]
    p0 = positions[0]
    if p0 == 0:
        return None
    want = list(range(p0, ctx.total_positions))
    if positions == want and sub.log_order == len(want):
        return p0
    return None


def _is_central_subspace(sub: Subgroup) -> bool:
    return all(m.is_central_block() for m in sub.igs)


def _central_restriction(sub: Subgroup) -> Subgroup:
    """Exact intersection with the centre block via the echelon suffix."""
    ctx = sub.ctx
    start = 1 + ctx.n
    kept = [m for m in sub.igs if _lead(ctx, m) >= start]
    return close(kept) if kept else trivial_subgroup(ctx)


def _central_intersect(a: Subgroup, b: Subgroup) -> Subgroup:
    """Intersection of two centre-block subspaces by GF(2) elimination:
    rows (u, u) for one side and (v, 0) for the other; once the left block
    is eliminated, the surviving right parts span the intersection."""
    ctx = a.ctx
    basis: dict[int, tuple[int, int]] = {}
    inter = []
    rows = [(m.z, m.z) for m in a.igs] + [(m.z, 0) for m in b.igs]
    for left, right in rows:
        while left:
            p = (left & -left).bit_length() - 1
            got = basis.get(p)
            if got is None:
                basis[p] = (left, right)
                break
            left ^= got[0]
            right ^= got[1]
        else:
            if right:
                inter.append(right)
    gens = [ctx.central_from_mask(m) for m in inter]
    return close(gens) if gens else trivial_subgroup(ctx)


def intersect(a: Subgroup, b: Subgroup) -> Subgroup:
    """Exact intersection.

    Always exact when one side is a full suffix-coordinate subgroup (the
    centre block, the trivial-top part, the pair block, the trivial group),
    the full group, or any subspace of the centre block (by GF(2) linear
    algebra).  Otherwise falls back to element enumeration, which is
    supported through level 2; deeper levels raise the unsupported-exact
    signal because no verified fact needs them.
    """
    if a.ctx.k != b.ctx.k:
        raise ValueError("subgroups live at different levels")
    ctx = a.ctx
    if a.log_order == ctx.log_order:
        return b
    if b.log_order == ctx.log_order:
        return a
    for s, t in ((a, b), (b, a)):
        start = _suffix_start_of(t)
        if start is not None:
            kept = [m for m in s.igs if _lead(ctx, m) >= start]
            return close(kept) if kept else trivial_subgroup(ctx)
    if _is_central_subspace(a):
        return _central_intersect(a, _central_restriction(b))
    if _is_central_subspace(b):
        return _central_intersect(b, _central_restriction(a))
    if ctx.k <= 2:
        small, big = (a, b) if a.log_order <= b.log_order else (b, a)
        found = [g for g in small.enumerate_elements() if big.contains(g)]
        return close(found) if found else trivial_subgroup(ctx)
    raise UnsupportedExactIntersection(
        "unsupported-exact: generic intersection beyond level 2 needs a "
        "suffix-coordinate or centre-block side"
    )


class LayerShape:
    """Abelian invariants of a layer, largest factor first."""

    __slots__ = ("invariants",)

    def __init__(self, invariants: tuple[int, ...]):
        self.invariants = tuple(sorted(invariants, reverse=True))

    def log_order(self) -> int:
        out = 0
        for inv in self.invariants:
            out += inv.bit_length() - 1
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, LayerShape):
            return self.invariants == other.invariants
        if isinstance(other, tuple):
            return self.invariants == tuple(sorted(other, reverse=True))
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.invariants)

    def __repr__(self) -> str:
        if not self.invariants:
            return "1"
        return " x ".join(f"C{q}" for q in self.invariants)


def layer_shape(s: Subgroup, t: Subgroup, max_log: int = 12) -> LayerShape:
    """Abelian invariants of s/t for t normal in s with abelian quotient.

    Computed by an exhaustive order census over the coset space, which is
    tiny for every layer that occurs here.
    """
    ctx = s.ctx
    if t.ctx.k != ctx.k:
        raise ValueError("subgroups live at different levels")
    if not s.contains_subgroup(t):
        raise ValueError("second subgroup is not contained in the first")
    for u in s.igs:
        u_zb = u.is_central_block()
        for v in s.igs:
            if u_zb and v.t == 0:
                continue
            if v.is_central_block() and u.t == 0:
                continue
            if not t.contains(commutator(u, v)):
                raise ValueError("quotient is not abelian")
    dlog = s.log_order - t.log_order
    if dlog == 0:
        return LayerShape(())
    if dlog > max_log:
        raise ValueError("layer too large for the census")

    reps = {t.reduce(ctx.identity())}
    frontier = list(reps)
    while frontier:
        nxt = []
        for r in frontier:
            for m in s.igs:
                cand = t.reduce(r * m)
                if cand not in reps:
                    reps.add(cand)
                    nxt.append(cand)
        frontier = nxt
    if len(reps) != 1 << dlog:
        raise RuntimeError("coset census does not match the index")

    # cumulative count of cosets killed by each power of 2
    max_exp = 0
    exps = []
    for r in reps:
        cur = r
        m = 0
        while not t.contains(cur):
            cur = cur * cur
            m += 1
        exps.append(m)
        max_exp = max(max_exp, m)
    cums = []
    for m in range(max_exp + 1):
        cnt = sum(1 for e in exps if e <= m)
        b = cnt.bit_length() - 1
        if cnt != 1 << b:
            raise RuntimeError("order census of an abelian layer must be a power of 2")
        cums.append(b)
    ranks = [cums[m] - cums[m - 1] for m in range(1, max_exp + 1)]
    ranks.append(0)
    invariants = []
    for m in range(1, max_exp + 1):
        invariants.extend([1 << m] * (ranks[m - 1] - ranks[m]))
    return LayerShape(tuple(invariants))
