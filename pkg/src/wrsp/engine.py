"""Exact arithmetic for a tower of finite 2-groups built from cyclic shifts.

Level k describes the group generated by a top element x of order 2**k
together with n = 2**k base generators that x permutes cyclically.  Squares
of base generators and commutators of distinct base generators are central
involutions that commute with the whole base part, so every group element
has a unique normal form (t, a, z):

    t   exponent of x, an integer mod 2**k
    a   GF(2) row of width n, exponents of the base generators written in
        increasing index order
    z   GF(2) row of width d = n + C(n, 2): first the n squares s_i, then
        the C(n, 2) pair commutators c_{i,j} (i < j) in lexicographic order

Multiplication moves the right factor's x-power past the left factor's base
and central parts.  Conjugation by x shifts every index by one; wrapping
index n-1 back to 0 reorders the base product and deposits pair commutators,
which is the "wrap" correction below.  Reordering the two base rows against
each other deposits the bilinear correction corr.

All vectors are packed into Python ints (bit i of a is the i-th base
exponent, bit j of z the j-th central coordinate).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

DEFAULT_MAX_LEVEL = 4


def pair_slot(i: int, j: int, n: int) -> int:
    """Lexicographic index of the unordered pair {i, j} with i < j."""
    return i * (n - 1) - i * (i - 1) // 2 + (j - i - 1)


def _linear_chunk_tables(bit_images: list[int]) -> list[list[int]]:
    """Byte-chunk lookup tables for the GF(2)-linear map bit b -> bit_images[b]."""
    nbits = len(bit_images)
    nchunks = max(1, (nbits + 7) // 8)
    tabs = []
    for c in range(nchunks):
        tab = [0] * 256
        base = 8 * c
        for byte in range(1, 256):
            low = byte & -byte
            src = base + low.bit_length() - 1
            img = bit_images[src] if src < nbits else 0
            tab[byte] = tab[byte ^ low] ^ img
        tabs.append(tab)
    return tabs


def _apply_chunks(tabs: list[list[int]], v: int) -> int:
    out = 0
    c = 0
    while v:
        byte = v & 255
        if byte:
            out ^= tabs[c][byte]
        v >>= 8
        c += 1
    return out


class GroupContext:
    """Parameters, lookup tables and named-commutator cache for one level."""

    __slots__ = (
        "k", "n", "num_pairs", "d", "tmod", "tmask", "amask", "zmask",
        "log_order", "total_positions", "pair_bit",
        "_ztabs", "_wrap_tabs", "_wtab", "_pairtabs",
        "_c_cache", "_cij_cache", "_subgroup_cache",
    )

    def __init__(self, k: int, allow_large: bool = False):
        if k < 1:
            raise ValueError("level k must be a positive integer")
        if k > DEFAULT_MAX_LEVEL and not allow_large:
            raise ValueError(
                f"level k = {k} exceeds the default cap {DEFAULT_MAX_LEVEL}; "
                "pass allow_large=True to build it anyway"
            )
        self.k = k
        n = 1 << k
        self.n = n
        self.num_pairs = n * (n - 1) // 2
        self.d = n + self.num_pairs
        self.tmod = 1 << k
        self.tmask = self.tmod - 1
        self.amask = (1 << n) - 1
        self.zmask = (1 << self.d) - 1
        self.log_order = k + 2 * n + self.num_pairs
        self.total_positions = 1 + n + self.d

        pair_bit = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                b = n + pair_slot(i, j, n)
                pair_bit[i][j] = b
                pair_bit[j][i] = b
        self.pair_bit = pair_bit

        # one-step index shift on the central block
        zshift = [0] * self.d
        for i in range(n):
            zshift[i] = (i + 1) % n
        for i in range(n):
            for j in range(i + 1, n):
                zshift[pair_bit[i][j]] = pair_bit[(i + 1) % n][(j + 1) % n]

        # chunk tables for every power of the shift (power 0 is the identity)
        self._ztabs = []
        perm = list(range(self.d))
        for _ in range(self.tmod):
            self._ztabs.append(_linear_chunk_tables([1 << p for p in perm]))
            perm = [zshift[p] for p in perm]

        # wrap correction: when the base top bit crosses the boundary after a
        # shift, every other occupied base slot i deposits the pair {0, i+1}
        self._wrap_tabs = _linear_chunk_tables(
            [1 << pair_bit[0][i + 1] for i in range(n - 1)]
        )

        # pair part of corr: right-row bit i against left-row bits j > i
        self._pairtabs = []
        for i in range(n):
            images = [1 << pair_bit[i][j] if j > i else 0 for j in range(n)]
            self._pairtabs.append(_linear_chunk_tables(images))

        # full conjugation tables for small widths
        if n <= 8:
            wtab = [[0] * (1 << n) for _ in range(self.tmod)]
            step = self._ztabs[1]
            for a in range(1 << n):
                w = 0
                cur = a
                for t in range(1, self.tmod):
                    w = _apply_chunks(step, w) ^ self._wrap(cur)
                    cur = self._rot(cur, 1)
                    wtab[t][a] = w
            self._wtab = wtab
        else:
            self._wtab = None

        self._c_cache: list = []
        self._cij_cache: dict = {}
        self._subgroup_cache: dict = {}

    # -- packed coordinate operations ------------------------------------

    def _rot(self, a: int, t: int) -> int:
        if t == 0:
            return a
        n = self.n
        return ((a << t) | (a >> (n - t))) & self.amask

    def _wrap(self, a: int) -> int:
        if not (a >> (self.n - 1)) & 1:
            return 0
        return _apply_chunks(self._wrap_tabs, a & (self.amask >> 1))

    def conj_by_x_power(self, a: int, z: int, t: int) -> tuple[int, int]:
        """Coordinates of x^-t (a, z) x^t."""
        t &= self.tmask
        if t == 0:
            return a, z
        if self._wtab is not None:
            return self._rot(a, t), _apply_chunks(self._ztabs[t], z) ^ self._wtab[t][a]
        step = self._ztabs[1]
        for _ in range(t):
            z = _apply_chunks(step, z) ^ self._wrap(a)
            a = self._rot(a, 1)
        return a, z

    def corr(self, a_left: int, a_right: int) -> int:
        """Central deposit from sorting the concatenation of two base rows."""
        res = a_left & a_right
        b = a_right
        tabs = self._pairtabs
        while b:
            low = b & -b
            b ^= low
            res ^= _apply_chunks(tabs[low.bit_length() - 1], a_left)
        return res

    def mul(self, g: "Element", h: "Element") -> "Element":
        if g.ctx.k != h.ctx.k:
            raise ValueError("elements live at different levels")
        a1, z1 = g.a, g.z
        t2 = h.t
        if t2:
            a1, z1 = self.conj_by_x_power(a1, z1, t2)
        a2 = h.a
        return Element(self, (g.t + t2) & self.tmask, a1 ^ a2, z1 ^ h.z ^ self.corr(a1, a2))

    def inv(self, g: "Element") -> "Element":
        t = g.t
        a, z = g.a, g.z
        if t:
            t = (self.tmod - t) & self.tmask
            a, z = self.conj_by_x_power(a, z, t)
        return Element(self, t, a, z ^ self.corr(a, a))

    # -- distinguished elements -------------------------------------------

    def identity(self) -> "Element":
        return Element(self, 0, 0, 0)

    def x(self) -> "Element":
        return Element(self, 1, 0, 0)

    def y(self) -> "Element":
        return Element(self, 0, 1, 0)

    def base_gen(self, i: int) -> "Element":
        if not 0 <= i < self.n:
            raise ValueError("base index out of range")
        return Element(self, 0, 1 << i, 0)

    def square_gen(self, i: int) -> "Element":
        if not 0 <= i < self.n:
            raise ValueError("square index out of range")
        return Element(self, 0, 0, 1 << i)

    def pair_gen(self, i: int, j: int) -> "Element":
        if i == j or not (0 <= i < self.n and 0 <= j < self.n):
            raise ValueError("pair indices must be distinct and in range")
        return Element(self, 0, 0, 1 << self.pair_bit[i][j])

    def central_from_mask(self, zmask: int) -> "Element":
        if zmask & ~self.zmask:
            raise ValueError("central mask out of range")
        return Element(self, 0, 0, zmask)

    def element(self, t: int, a: int, z: int) -> "Element":
        if not 0 <= t < self.tmod:
            raise ValueError("top exponent out of range")
        if a & ~self.amask or z & ~self.zmask:
            raise ValueError("coordinate vector out of range")
        return Element(self, t, a, z)

    def all_elements(self):
        """Iterate over the whole group; only sensible for k <= 2."""
        if self.log_order > 20:
            raise ValueError("full enumeration is limited to levels of order 2**20 or less")
        for t in range(self.tmod):
            for a in range(1 << self.n):
                for z in range(1 << self.d):
                    yield Element(self, t, a, z)

    def random_element(self, rng: random.Random) -> "Element":
        return Element(self, rng.randrange(self.tmod), rng.getrandbits(self.n), rng.getrandbits(self.d))

    def order_of(self, g: "Element") -> int:
        o = 1
        cur = g
        while not cur.is_identity():
            cur = self.mul(cur, cur)
            o <<= 1
            if o > (1 << (self.k + 3)):
                raise RuntimeError("element order exceeds the group exponent bound")
        return o

    # -- named commutator chains ------------------------------------------

    def c(self, i: int) -> "Element":
        """Left-normed chain c_1 = y, c_i = [c_{i-1}, x]."""
        if i < 1:
            raise ValueError("chain index must be >= 1")
        cache = self._c_cache
        if not cache:
            cache.append(self.y())
        x = self.x()
        while len(cache) < i:
            cache.append(commutator(cache[-1], x))
        return cache[i - 1]

    def cij(self, i: int, j: int) -> "Element":
        """c_{i,j} = [c_i, y, x, ..(j-1).., x]."""
        if i < 1 or j < 1:
            raise ValueError("chain indices must be >= 1")
        key = (i, j)
        got = self._cij_cache.get(key)
        if got is not None:
            return got
        if j == 1:
            val = commutator(self.c(i), self.y())
        else:
            val = commutator(self.cij(i, j - 1), self.x())
        self._cij_cache[key] = val
        return val

    def zij(self, i: int, j: int) -> "Element":
        """z_{i,j} = [c_i, c_j]."""
        if i < 1 or j < 1:
            raise ValueError("chain indices must be >= 1")
        return commutator(self.c(i), self.c(j))

    def __repr__(self) -> str:
        return f"GroupContext(k={self.k})"


@lru_cache(maxsize=None)
def get_context(k: int, allow_large: bool = False) -> GroupContext:
    return GroupContext(k, allow_large=allow_large)


class Element:
    """Immutable group element in canonical (t, a, z) form."""

    __slots__ = ("ctx", "t", "a", "z")

    def __init__(self, ctx: GroupContext, t: int, a: int, z: int):
        self.ctx = ctx
        self.t = t
        self.a = a
        self.z = z

    def __mul__(self, other: "Element") -> "Element":
        return self.ctx.mul(self, other)

    def inverse(self) -> "Element":
        return self.ctx.inv(self)

    def __pow__(self, e: int) -> "Element":
        base = self
        if e < 0:
            base = base.inverse()
            e = -e
        acc = self.ctx.identity()
        while e:
            if e & 1:
                acc = acc * base
            e >>= 1
            if e:
                base = base * base
        return acc

    def conj(self, h: "Element") -> "Element":
        """Conjugate self by h, that is h^-1 * self * h."""
        return h.inverse() * self * h

    def is_identity(self) -> bool:
        return self.t == 0 and self.a == 0 and self.z == 0

    def is_central_block(self) -> bool:
        """True for elements with trivial top and base part.

        Such elements commute with every element having trivial top part.
        """
        return self.t == 0 and self.a == 0

    def order(self) -> int:
        return self.ctx.order_of(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return (self.ctx.k, self.t, self.a, self.z) == (other.ctx.k, other.t, other.a, other.z)

    def __hash__(self) -> int:
        return hash((self.ctx.k, self.t, self.a, self.z))

    def text(self) -> str:
        ctx = self.ctx
        return "x^{} y:{} s:{} c:{}".format(
            self.t,
            _hex_le(self.a, ctx.n),
            _hex_le(self.z & ctx.amask, ctx.n),
            _hex_le(self.z >> ctx.n, ctx.num_pairs),
        )

    def __repr__(self) -> str:
        return self.text()


def _hex_le(v: int, nbits: int) -> str:
    """Hex string, one nibble per character, lowest coordinates first."""
    nnib = max(1, (nbits + 3) // 4)
    return "".join("0123456789abcdef"[(v >> (4 * i)) & 15] for i in range(nnib))


def _unhex_le(s: str, nbits: int) -> int:
    nnib = max(1, (nbits + 3) // 4)
    if len(s) != nnib:
        raise ValueError(f"expected {nnib} hex digits, got {len(s)}")
    v = 0
    for i, ch in enumerate(s):
        d = "0123456789abcdef".find(ch)
        if d < 0:
            raise ValueError(f"invalid hex digit {ch!r}")
        v |= d << (4 * i)
    if nbits and v >> nbits:
        raise ValueError("hex value has bits beyond the declared width")
    return v


def parse_element(ctx: GroupContext, text: str) -> Element:
    """Inverse of Element.text, bit exact."""
    parts = text.strip().split(" ")
    if len(parts) != 4 or not parts[0].startswith("x^"):
        raise ValueError(f"malformed element text: {text!r}")
    try:
        t = int(parts[0][2:])
    except ValueError:
        raise ValueError(f"malformed top exponent in {text!r}") from None
    fields = {}
    for part, tag in zip(parts[1:], ("y", "s", "c")):
        if not part.startswith(tag + ":"):
            raise ValueError(f"expected field {tag!r} in {text!r}")
        fields[tag] = part[len(tag) + 1:]
    if not 0 <= t < ctx.tmod:
        raise ValueError(f"top exponent {t} out of range for level {ctx.k}")
    a = _unhex_le(fields["y"], ctx.n)
    s = _unhex_le(fields["s"], ctx.n)
    c = _unhex_le(fields["c"], ctx.num_pairs)
    return ctx.element(t, a, (c << ctx.n) | s)


# -- free-function operation aliases ----------------------------------------

def multiply(g: Element, h: Element) -> Element:
    return g * h


def inverse(g: Element) -> Element:
    return g.inverse()


def power(g: Element, e: int) -> Element:
    return g ** e


def commutator(g: Element, h: Element) -> Element:
    """Left-normed commutator g^-1 h^-1 g h."""
    return g.inverse() * h.inverse() * g * h


def conjugate(g: Element, h: Element) -> Element:
    return g.conj(h)


# -- named commutator specs -------------------------------------------------

@dataclass(frozen=True)
class NamedCommutator:
    """Symbolic description of a chain commutator, resolvable in any context."""

    kind: str  # "c", "cij" or "zij"
    i: int
    j: int = 0

    def __post_init__(self):
        if self.kind not in ("c", "cij", "zij"):
            raise ValueError(f"unknown commutator kind {self.kind!r}")
        if self.i < 1 or (self.kind != "c" and self.j < 1):
            raise ValueError("chain indices must be >= 1")

    @classmethod
    def c(cls, i: int) -> "NamedCommutator":
        return cls("c", i)

    @classmethod
    def cij(cls, i: int, j: int) -> "NamedCommutator":
        return cls("cij", i, j)

    @classmethod
    def zij(cls, i: int, j: int) -> "NamedCommutator":
        return cls("zij", i, j)


def resolve(spec: NamedCommutator, ctx: GroupContext) -> Element:
    if spec.kind == "c":
        return ctx.c(spec.i)
    if spec.kind == "cij":
        return ctx.cij(spec.i, spec.j)
    return ctx.zij(spec.i, spec.j)


# -- wreath quotient --------------------------------------------------------

class WreathElement:
    """Element of the quotient by the central block: a pair (t, a)."""

    __slots__ = ("ctx", "t", "a")

    def __init__(self, ctx: GroupContext, t: int, a: int):
        self.ctx = ctx
        self.t = t
        self.a = a

    def __mul__(self, other: "WreathElement") -> "WreathElement":
        if self.ctx.k != other.ctx.k:
            raise ValueError("elements live at different levels")
        ctx = self.ctx
        return WreathElement(ctx, (self.t + other.t) & ctx.tmask,
                             ctx._rot(self.a, other.t) ^ other.a)

    def inverse(self) -> "WreathElement":
        ctx = self.ctx
        t = (ctx.tmod - self.t) & ctx.tmask
        return WreathElement(ctx, t, ctx._rot(self.a, t))

    def is_identity(self) -> bool:
        return self.t == 0 and self.a == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, WreathElement):
            return NotImplemented
        return (self.ctx.k, self.t, self.a) == (other.ctx.k, other.t, other.a)

    def __hash__(self) -> int:
        return hash(("w", self.ctx.k, self.t, self.a))

    def __repr__(self) -> str:
        return f"w(x^{self.t} y:{_hex_le(self.a, self.ctx.n)})"


def project_to_wreath(g: Element) -> WreathElement:
    """Quotient map killing the central block; a surjective homomorphism."""
    return WreathElement(g.ctx, g.t, g.a)
