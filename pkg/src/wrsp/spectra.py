"""Logarithmic-density sequences of subgroups against the filtration series.

For a target subgroup and a descending series S_0 = G >= S_1 >= ... the
density point at index i is the exact rational

    log2 |target S_i : S_i|  /  log2 |G : S_i|

Finite truncations cannot certify limits, so sequences carry a tail-window
minimum as the lower-limit estimate and a window spread as the proper-limit
diagnostic; the cross-level trend of the top-level ratios is reported
separately.  Everything is exact integer and Fraction arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .engine import Element, GroupContext
from .series import SeriesKind, SeriesTable
from .subgroup import Subgroup, centre_block_subgroup, close, intersect, trivial_subgroup


@dataclass(frozen=True)
class DensityPoint:
    i: int          # natural series index of the term
    num: int        # log2 |target S_i : S_i|
    den: int        # log2 |G : S_i|
    ratio: Fraction

    def as_row(self) -> dict:
        return {
            "i": self.i,
            "num": self.num,
            "den": self.den,
            "ratio_exact": f"{self.num}/{self.den}",
            "ratio_float": float(self.ratio),
        }


@dataclass(frozen=True)
class DensitySequence:
    kind: SeriesKind
    k: int
    target_label: str
    points: tuple[DensityPoint, ...]
    tail_window: int
    liminf_estimate: Fraction
    tail_spread: Fraction  # max - min over the window; 0 suggests a proper limit

    @property
    def top_ratio(self) -> Fraction:
        return self.points[-1].ratio if self.points else Fraction(0)

    def to_obj(self) -> dict:
        return {
            "kind": self.kind.value,
            "k": self.k,
            "target": self.target_label,
            "tail_window": self.tail_window,
            "liminf_estimate": f"{self.liminf_estimate.numerator}/{self.liminf_estimate.denominator}",
            "tail_spread": f"{self.tail_spread.numerator}/{self.tail_spread.denominator}",
            "points": [p.as_row() for p in self.points],
        }

    def to_csv_lines(self) -> list[str]:
        lines = ["kind,k,i,num,den,ratio_exact,ratio_float"]
        for p in self.points:
            r = p.as_row()
            lines.append(
                f"{self.kind.value},{self.k},{p.i},{p.num},{p.den},"
                f"{r['ratio_exact']},{r['ratio_float']!r}"
            )
        return lines

    def to_json(self) -> str:
        return json.dumps(self.to_obj(), indent=2) + "\n"


def density_sequence(target: Subgroup, table: SeriesTable,
                     target_label: str = "target",
                     tail_window: int | None = None) -> DensitySequence:
    ctx = target.ctx
    if ctx.k != table.k:
        raise ValueError("target and series live at different levels")
    points = []
    for i, sub in table.indexed_terms()[1:]:
        den = ctx.log_order - sub.log_order
        if den == 0:
            continue
        num = target.log_order - intersect(target, sub).log_order
        points.append(DensityPoint(i, num, den, Fraction(num, den)))
    if not points:
        raise ValueError("series has no proper terms")
    if tail_window is None:
        tail_window = max(1, len(points) // 2)
    tail = [p.ratio for p in points[-tail_window:]]
    return DensitySequence(
        kind=table.kind, k=table.k, target_label=target_label,
        points=tuple(points), tail_window=tail_window,
        liminf_estimate=min(tail), tail_spread=max(tail) - min(tail),
    )


def complement_density(target: Subgroup, table: SeriesTable) -> list[tuple[int, int]]:
    """log2 |G : S_i target| per natural index, for normal target."""
    ctx = target.ctx
    if ctx.k != table.k:
        raise ValueError("target and series live at different levels")
    out = []
    for i, sub in table.indexed_terms():
        cap = intersect(target, sub).log_order
        prod_log = sub.log_order + target.log_order - cap
        out.append((i, ctx.log_order - prod_log))
    return out


@dataclass(frozen=True)
class InvariantSubspace:
    """A shift-stable subspace of the centre block, automatically normal."""

    label: str
    seeds: tuple[Element, ...]
    span: Subgroup


def invariant_subspace(ctx: GroupContext, seeds, label: str = "seed") -> InvariantSubspace:
    seeds = tuple(seeds)
    for s in seeds:
        if s.ctx.k != ctx.k:
            raise ValueError("seed lives at a different level")
        if not s.is_central_block():
            raise ValueError("seeds must lie in the centre block")
    x = ctx.x()
    orbit = []
    for s in seeds:
        cur = s
        for _ in range(ctx.tmod):
            orbit.append(cur)
            cur = cur.conj(x)
    span = close(orbit) if orbit else trivial_subgroup(ctx)
    if not span.is_normal():
        raise RuntimeError("shift-closed central subspace must be normal")
    return InvariantSubspace(label, seeds, span)


def spectrum_sweep(table: SeriesTable, targets, ctx: GroupContext) -> list[DensitySequence]:
    """Density sequences for a family of invariant subspaces, least dense
    first; growing targets give weakly increasing top-level ratios."""
    seqs = [density_sequence(t.span, table, target_label=t.label) for t in targets]
    seqs.sort(key=lambda s: (s.liminf_estimate, s.target_label))
    return seqs


def sequences_to_csv(seqs) -> str:
    lines = ["target,kind,k,i,num,den,ratio_exact,ratio_float"]
    for s in seqs:
        for p in s.points:
            r = p.as_row()
            lines.append(
                f"{s.target_label},{s.kind.value},{s.k},{p.i},{p.num},{p.den},"
                f"{r['ratio_exact']},{r['ratio_float']!r}"
            )
    return "\n".join(lines) + "\n"
