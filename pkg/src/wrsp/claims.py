"""Registry of verifiable structure claims and their runners.

Each claim has a stable identifier, a mathematical one-line statement, a
supported level range and a runner returning a VerificationResult whose
status is "pass", "fail" or "sandwich-only" (both inclusions certified in
place of an exact term).  Runners are pure functions of the level, so
independent claims may run in a thread pool; reports are assembled in
identifier order for deterministic output.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .engine import commutator, get_context, project_to_wreath
from .oracle import build_oracle, compare_multiplication_tables, oracle_index_of
from .series import (
    SeriesKind,
    commutator_identity_checks,
    exact_power_subgroup,
    gamma_n_subgroups,
    lcs_generator_check,
    power_series,
    series,
)
from .spectra import complement_density, density_sequence
from .subgroup import (
    agemo_mod_derived,
    base_and_centre_subgroup,
    centre_block_subgroup,
    close,
    commutator_subgroup,
    full_group,
    intersect,
    join,
    normal_closure,
    pair_block_subgroup,
    trivial_subgroup,
)

PASS = "pass"
FAIL = "fail"
SANDWICH = "sandwich-only"


@dataclass
class VerificationResult:
    claim_id: str
    k: int
    status: str
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status in (PASS, SANDWICH)

    def line(self) -> str:
        mark = {PASS: "PASS", FAIL: "FAIL", SANDWICH: "SANDW"}[self.status]
        summary = self.details.get("summary", "")
        return f"{mark:5s}  {self.claim_id:24s} k={self.k}  {summary}"


@dataclass(frozen=True)
class ClaimSpec:
    claim_id: str
    statement: str
    k_min: int
    k_max: int
    runner: object

    def supports(self, k: int) -> bool:
        return self.k_min <= k <= self.k_max


def _ok(claim_id, k, ok, summary="", **extra) -> VerificationResult:
    details = {"summary": summary}
    details.update(extra)
    return VerificationResult(claim_id, k, PASS if ok else FAIL, details)


# -- individual runners ------------------------------------------------------

def _run_prop_order(k: int) -> VerificationResult:
    ctx = get_context(k)
    got = full_group(ctx).log_order
    want = k + (1 << (k + 1)) + (ctx.n * (ctx.n - 1)) // 2
    return _ok("prop-order", k, got == want,
               f"log2 order {got}, formula {want}", got=got, want=want)


def _run_oracle(k: int) -> VerificationResult:
    ctx = get_context(1)
    oracle = build_oracle()
    rep = compare_multiplication_tables(ctx, oracle)
    census = oracle.order_census()
    centre = oracle.centre()
    z_idx = {oracle_index_of(oracle, g)
             for g in centre_block_subgroup(ctx).enumerate_elements()}
    ok = rep["ok"] and max(census) == 8 and set(centre) <= z_idx
    return _ok("oracle-k1", 1, ok,
               f"64x64 table equal, max order {max(census)}, centre size {len(centre)}",
               census={str(o): c for o, c in sorted(census.items())},
               table=rep)


def _run_remark_derived(k: int) -> VerificationResult:
    ctx = get_context(k)
    h = base_and_centre_subgroup(ctx)
    z = centre_block_subgroup(ctx)
    hh = commutator_subgroup(h, h)
    ok = (commutator_subgroup(h, z).is_trivial()
          and z.contains_subgroup(hh)
          and agemo_mod_derived(h, 1) == z
          and hh == pair_block_subgroup(ctx))
    # exponent of the trivial-top part is 4: structural fourth powers
    for m in h.igs:
        ok = ok and (m ** 4).is_identity()
    return _ok("remark-derived", k, ok,
               "squares of the trivial-top part span the centre block, [H,Z]=1, exp(H)=4")


def _run_exp2(k: int, item: str) -> VerificationResult:
    ctx = get_context(k)
    gam = series(ctx, SeriesKind.GAMMA)
    n = ctx.n
    bad = []
    if item == "i":
        for i in range(n // 2 + 1, 2 * n + 1):
            if not gam.term(i + 1).contains(ctx.c(i) ** 2):
                bad.append(i)
        summary = f"c_i^2 in the next lower central term for i >= {n // 2 + 1}"
    elif item == "ii":
        for i in range(n + 1, 2 * n + 2):
            if not (ctx.c(i) ** 2).is_identity():
                bad.append(i)
        summary = f"c_i^2 = 1 for i >= {n + 1}"
    else:
        for i in range(n + n // 2 + 1, 2 * n + 1):
            if not gam.term(i + 1).contains(ctx.c(i)):
                bad.append(i)
        summary = f"c_i in the next lower central term for i >= {n + n // 2 + 1}"
    return _ok(f"lemma-exp2-{item}", k, not bad, summary, failures=bad)


def _run_cm2k(k: int) -> VerificationResult:
    ctx = get_context(k)
    gam = series(ctx, SeriesKind.GAMMA)
    n = ctx.n
    bad = []
    for m in range(2, n + 1, 2):
        if not gam.term(n + m + 1).contains(ctx.cij(m, n)):
            bad.append(m)
    return _ok("lemma-cm2k", k, not bad,
               f"c_(m,{n}) lies {n}+m+1 deep for even m", failures=bad)


def _run_lcs_class(k: int) -> VerificationResult:
    ctx = get_context(k)
    tbl = series(ctx, SeriesKind.GAMMA)
    want = 2 * ctx.n - 1
    return _ok("prop-lcs-class", k, tbl.length == want,
               f"nilpotency class {tbl.length}, formula {want}")


def _run_lcs_layers(k: int) -> VerificationResult:
    ctx = get_context(k)
    rep = lcs_generator_check(ctx)
    bad = [row for row in rep["per_index"]
           if not (row["generators_match"] and row["shape_match"])]
    return _ok("prop-lcs-layers", k, rep["ok"],
               f"all {len(rep['per_index'])} stated generator lists and layer "
               f"shapes match; layer logs sum to {rep['layer_log_sum']}",
               failures=bad[:4], layer_log_sum=rep["layer_log_sum"])


def remark_index_formula(i: int) -> int:
    """Predicted log2 |Z : (i-th lower central term ^ Z)| in the limit group."""
    if i % 2 == 1:
        m = (i + 1) // 2
        return m * (m - 1)
    m = i // 2
    return m * (m - 1) + m


def _run_remark_index(k: int) -> VerificationResult:
    ctx = get_context(k)
    z = centre_block_subgroup(ctx)
    gam = series(ctx, SeriesKind.GAMMA)
    table = []
    window_ok = True
    window = (1 << (k - 1)) + 1  # the level-k faithful range of the formula
    for i in range(1, 2 * ctx.n + 1):
        got = z.log_order - intersect(gam.term(i), z).log_order
        want = remark_index_formula(i)
        table.append({"i": i, "log_index": got, "limit_formula": want})
        if i <= window and got != want:
            window_ok = False
    return _ok("remark-index", k, window_ok,
               f"limit formula reproduced for i <= {window}; full table recorded",
               window=window, table=table)


def _run_exponent(k: int) -> VerificationResult:
    ctx = get_context(k)
    xy = ctx.x() * ctx.y()
    e = 1 << (k + 2)
    witness_ok = ((xy ** e).is_identity()
                  and not (xy ** (e // 2)).is_identity()
                  and xy ** (e // 2) == ctx.c(ctx.n) ** 2)
    orders_ok = (ctx.x().order() == 1 << k and ctx.y().order() == 4)
    maxo = 0
    if k <= 2:
        for g in ctx.all_elements():
            maxo = max(maxo, g.order())
    else:
        import random
        rng = random.Random(0xE0 + k)
        for t in range(ctx.tmod):
            xs = ctx.x() ** t
            for _ in range(1500):
                h = ctx.element(0, rng.getrandbits(ctx.n), rng.getrandbits(ctx.d))
                maxo = max(maxo, (xs * h).order())
    scope = "exhaustive" if k <= 2 else "witness plus coset sampling"
    ok = witness_ok and orders_ok and maxo == e
    return _ok("lemma-exponent", k, ok,
               f"exponent {e} ({scope}), witness x*y of order {e}",
               max_order=maxo)


def _run_lower2(k: int) -> VerificationResult:
    ctx = get_context(k)
    n = ctx.n
    tbl = series(ctx, SeriesKind.LOWER_P)
    gam = series(ctx, SeriesKind.GAMMA)
    x = ctx.x()
    ok = tbl.length == 2 * n - 1
    bad = []
    want2 = close([x ** 2, ctx.y() ** 2] + list(gam.term(2).igs))
    if tbl.term(2) != want2:
        ok = False
        bad.append(2)
    for i in range(3, 2 * n + 1):
        gens = [x ** (1 << (i - 1))]
        if 3 <= i <= n // 2 + 1:
            gens.append(ctx.c(i - 1) ** 2)
        gens = [g for g in gens if not g.is_identity()]
        want = close(gens + list(gam.term(i).igs)) if (gens or gam.term(i).igs) \
            else trivial_subgroup(ctx)
        if tbl.term(i) != want:
            ok = False
            bad.append(i)
    return _ok("prop-lower2", k, ok,
               f"length {tbl.length} and closed forms for all indices",
               failures=bad)


def _run_dimension(k: int) -> VerificationResult:
    ctx = get_context(k)
    n = ctx.n
    tbl = series(ctx, SeriesKind.DIMENSION)
    gam = series(ctx, SeriesKind.GAMMA)
    x, y = ctx.x(), ctx.y()
    ok = tbl.length == 2 * n
    bad = []
    for i in range(2, 2 * n + 1):
        l = (i - 1).bit_length()
        half = (i + 1) // 2
        gens = [x ** (1 << l)] + [g * g for g in gam.term(half).igs] + list(gam.term(i).igs)
        gens = [g for g in gens if not g.is_identity()]
        closed = close(gens) if gens else trivial_subgroup(ctx)
        gens2 = list(gam.term(i).igs) + [g * g for g in gam.term(half).igs]
        gens2 += [x ** (1 << l), y ** (1 << l)]
        for m in range(2, k + 3):
            nn = (i + (1 << m) - 1) >> m
            if nn >= 2:
                gens2 += [g ** (1 << m) for g in gam.term(nn).igs]
        gens2 = [g for g in gens2 if not g.is_identity()]
        product = close(gens2) if gens2 else trivial_subgroup(ctx)
        if not (tbl.term(i) == closed == product):
            ok = False
            bad.append(i)
    return _ok("prop-dimension", k, ok,
               f"length {tbl.length}; recurrence = closed form = product form",
               failures=bad)


def _run_gamma_sq(k: int) -> VerificationResult:
    ctx = get_context(k)
    bad = []
    for n in range(1, k + 1):
        cur = gamma_n_subgroups(ctx, n).gamma_n
        nxt = gamma_n_subgroups(ctx, n + 1).gamma_n
        if not nxt.contains_subgroup(agemo_mod_derived(cur, 1)):
            bad.append(n)
    return _ok("lemma-gamma-sq", k, not bad,
               "squares of each scaffold subgroup land in the next one",
               failures=bad)


def _run_double_product(k: int) -> VerificationResult:
    rep = commutator_identity_checks(get_context(k))
    return _ok("lemma-double-product", k, rep["double_product"],
               "m-fold shift commutators match the double product form",
               failures=rep.get("double_product_failures", []))


def _run_zij_shift(k: int) -> VerificationResult:
    rep = commutator_identity_checks(get_context(k))
    return _ok("cor-zij-shift", k, rep["power_shift"],
               "2-power shift identity for all in-range pairs",
               failures=rep.get("shift_failures", []))


def _run_sq_comm(k: int) -> VerificationResult:
    rep = commutator_identity_checks(get_context(k))
    return _ok("eq-sq-comm", k, rep["square_commutator"],
               "square-commutator congruence at the top 2-power")


def _run_power_expansion(k: int) -> VerificationResult:
    rep = commutator_identity_checks(get_context(k))
    return _ok("eq-power-expansion", k, rep["power_expansion"],
               "both power expansion congruences, error terms in the "
               "weight-filtered closure",
               details=rep["power_expansion_details"])


def _run_zij_table(k: int) -> VerificationResult:
    ctx = get_context(k)
    n = ctx.n
    gam = series(ctx, SeriesKind.GAMMA)
    ok = True
    nonzero = []
    for i in range(1, 2 * n + 2):
        for j in range(1, 2 * n + 2):
            z = ctx.zij(i, j)
            if z != ctx.zij(j, i):
                ok = False
            if max(i, j) >= n + 1 and not z.is_identity():
                ok = False
            if not z.is_identity():
                if i < j:
                    nonzero.append([i, j])
                if i + j <= 2 * n and not gam.term(i + j).contains(z):
                    ok = False
    return _ok("zij-table", k, ok,
               f"{len(nonzero)} nonzero pair commutators: symmetric, supported "
               f"below index {n + 1}, of weight at least i+j",
               nonzero=nonzero)


def _run_m_density(k: int) -> VerificationResult:
    ctx = get_context(k)
    z = centre_block_subgroup(ctx)
    seq = density_sequence(z, series(ctx, SeriesKind.M), "Z")
    n = ctx.n
    want = Fraction(n + n * (n - 1) // 2, ctx.log_order)
    top = seq.points[-1]
    ratios = [p.ratio for p in seq.points]
    ok = (top.i == k and top.ratio == want
          and all(a < b for a, b in zip(ratios, ratios[1:])))
    return _ok("thm-m-density", k, ok,
               f"top-level ratio {top.num}/{top.den}, increasing within the level",
               points=[p.as_row() for p in seq.points])


def _run_ld_complement(k: int) -> VerificationResult:
    ctx = get_context(k)
    z = centre_block_subgroup(ctx)
    ok = True
    recorded = {}
    # the 2(j-1) law needs both the top 2-power and the wreath layer alive:
    # j <= k+1 steps for the lower 2-series, additionally j <= 3 for the
    # dimension series whose top part is x^(2^ceil(log2 j))
    for kind, window in ((SeriesKind.LOWER_P, k + 1), (SeriesKind.DIMENSION, min(3, k + 1))):
        vals = dict(complement_density(z, series(ctx, kind)))
        recorded[kind.value] = sorted(vals.items())
        for j in range(1, min(window, max(vals)) + 1):
            if vals[j] != 2 * (j - 1):
                ok = False
    return _ok("thm-ld-complement", k, ok,
               "log index of S_j Z is twice the step count in the stable window",
               values=recorded)


def _run_p_power(k: int) -> VerificationResult:
    ctx = get_context(k)
    z = centre_block_subgroup(ctx)
    gam = series(ctx, SeriesKind.GAMMA)
    details = {}
    if k <= 2:
        tbl = series(ctx, SeriesKind.POWER)
        ok = tbl.term(k + 2).is_trivial()
        sq = tbl.term(1)
        ok = ok and gamma_n_subgroups(ctx, 1).gamma_n.contains_subgroup(sq)
        ok = ok and ctx.log_order - sq.log_order >= 2
        ok = ok and sq.contains_subgroup(gam.term(4))
        details["power_logs"] = [s.log_order for s in tbl.terms]
        status = PASS if ok else FAIL
    else:
        ok = True
        sw = []
        for i in range(1, k + 1):
            rep = power_series(ctx, i)
            sw.append({"i": i, "lower_log": rep.lower.log_order,
                       "upper_log": rep.upper.log_order,
                       "verified": rep.verified})
            ok = ok and rep.verified
        details["sandwiches"] = sw
        status = SANDWICH if ok else FAIL
    # scaffold-intersection indices: limit formula within the faithful window
    win = []
    for s in range(1, k + 1):
        got = z.log_order - intersect(gamma_n_subgroups(ctx, s).gamma_n, z).log_order
        m = 1 << (s - 1)
        win.append({"s": s, "log_index": got, "limit_formula": m * (m - 1)})
    details["scaffold_indices"] = win
    for row in win:
        if (1 << row["s"]) <= (1 << (k - 1)) + 1 and row["log_index"] != row["limit_formula"]:
            status = FAIL
    # decomposition of the level-k scaffold intersection; needs the squared
    # term inside the trivial-top part, so k >= 2
    if k >= 2:
        lhs = intersect(gamma_n_subgroups(ctx, k).gamma_n, z)
        rhs = join(agemo_mod_derived(gam.term(1 << (k - 1)), 1),
                   intersect(gam.term(1 << k), z))
        if lhs != rhs:
            status = FAIL
    details["summary"] = ("exact power terms verified" if k <= 2 else
                          "sandwich inclusions verified for every power index")
    return VerificationResult("thm-p-power", k, status, details)


def _run_f_sandwich(k: int) -> VerificationResult:
    ctx = get_context(k)
    s = k - 1
    phi = series(ctx, SeriesKind.FRATTINI).term(s)
    sc = gamma_n_subgroups(ctx, s)
    gam = series(ctx, SeriesKind.GAMMA)
    z = centre_block_subgroup(ctx)
    j = (1 << s) + (1 << (s - 1)) - 1
    low = join(sc.t_n, intersect(gam.term(j), z))
    ok_low = phi.contains_subgroup(low)
    ok_up = sc.gamma_n.contains_subgroup(phi)
    return _ok("thm-f-sandwich", k, ok_low and ok_up,
               f"level-{s} Frattini term sits between the stated bounds "
               f"inside level {k}",
               lower_log=low.log_order, phi_log=phi.log_order,
               upper_log=sc.gamma_n.log_order)


def _run_wreath(k: int) -> VerificationResult:
    import random
    ctx = get_context(k)
    rng = random.Random(0xAB + k)
    ok = True
    for _ in range(2000):
        g, h = ctx.random_element(rng), ctx.random_element(rng)
        if project_to_wreath(g * h) != project_to_wreath(g) * project_to_wreath(h):
            ok = False
            break
    seen = {(0, 0)}
    frontier = [(0, 0)]
    gens = [project_to_wreath(ctx.x()), project_to_wreath(ctx.y())]
    while frontier:
        nxt = []
        for (t, a) in frontier:
            cur = project_to_wreath(ctx.element(t, a, 0))
            for g in gens:
                p = cur * g
                if (p.t, p.a) not in seen:
                    seen.add((p.t, p.a))
                    nxt.append((p.t, p.a))
        frontier = nxt
    ok = ok and len(seen) == 1 << (k + ctx.n)
    ker_ok = all(project_to_wreath(g).is_identity()
                 for g in centre_block_subgroup(ctx).igs)
    return _ok("wreath-quotient", k, ok and ker_ok,
               f"quotient map is a homomorphism onto 2^{k + ctx.n} elements "
               f"with the centre block as kernel",
               image_log=(len(seen)).bit_length() - 1)


def _run_h_generation(k: int) -> VerificationResult:
    ctx = get_context(k)
    h = base_and_centre_subgroup(ctx)
    via_closure = normal_closure([ctx.y()])
    chain = close([ctx.c(i) for i in range(1, 2 * ctx.n + 1)])
    ok = via_closure == h == chain
    return _ok("h-generation", k, ok,
               "normal closure of y equals the span of the chain commutators")


CLAIMS: dict[str, ClaimSpec] = {}


def _register(claim_id, statement, k_min, k_max, runner):
    CLAIMS[claim_id] = ClaimSpec(claim_id, statement, k_min, k_max, runner)


_register("prop-order", "log2 order equals k + 2^(k+1) + C(2^k, 2)", 1, 4, _run_prop_order)
_register("oracle-k1", "packed arithmetic equals word reduction on all 64x64 products", 1, 1, _run_oracle)
_register("remark-derived", "squares of the trivial-top part span the centre block; its exponent is 4", 1, 3, _run_remark_derived)
_register("lemma-exp2-i", "c_i^2 falls into the next lower central term from half the base width on", 1, 3, lambda k: _run_exp2(k, "i"))
_register("lemma-exp2-ii", "c_i^2 vanishes beyond the base width", 1, 3, lambda k: _run_exp2(k, "ii"))
_register("lemma-exp2-iii", "c_i falls into the next lower central term beyond 1.5x the base width", 1, 3, lambda k: _run_exp2(k, "iii"))
_register("lemma-cm2k", "the double chain c_(m, 2^k) lies 2^k + m + 1 deep for even m", 1, 3, _run_cm2k)
_register("prop-lcs-class", "nilpotency class is 2^(k+1) - 1", 1, 3, _run_lcs_class)
_register("prop-lcs-layers", "stated generator lists and layer shapes; layer logs sum to the group log", 1, 3, _run_lcs_layers)
_register("remark-index", "centre-block index along the lower central series matches the limit formula in the faithful window", 1, 3, _run_remark_index)
_register("lemma-exponent", "group exponent is 2^(k+2), witnessed by x*y", 1, 3, _run_exponent)
_register("prop-lower2", "lower 2-series length and closed forms", 1, 3, _run_lower2)
_register("prop-dimension", "dimension series length, closed form and product form", 1, 3, _run_dimension)
_register("lemma-gamma-sq", "scaffold subgroups square into their successors", 1, 3, _run_gamma_sq)
_register("lemma-double-product", "m-fold shift of a pair commutator equals the double product", 1, 3, _run_double_product)
_register("cor-zij-shift", "2-power shift identity for pair commutators", 1, 3, _run_zij_shift)
_register("eq-sq-comm", "square-commutator congruence at the top 2-power", 1, 3, _run_sq_comm)
_register("eq-power-expansion", "power expansion congruences with certified error terms", 1, 3, _run_power_expansion)
_register("zij-table", "pair commutator table: symmetry, support and weight", 1, 3, _run_zij_table)
_register("thm-m-density", "construction-series density of the centre block at top level", 1, 3, _run_m_density)
_register("thm-ld-complement", "complement density along the lower 2- and dimension series", 1, 3, _run_ld_complement)
_register("thm-p-power", "2-power subgroups: exact terms or certified sandwiches with scaffold indices", 1, 3, _run_p_power)
_register("thm-f-sandwich", "Frattini term between its stated bounds, one level down", 2, 3, _run_f_sandwich)
_register("wreath-quotient", "quotient by the centre block is the wreath product", 1, 3, _run_wreath)
_register("h-generation", "normal closure of y equals the span of the chain commutators", 1, 3, _run_h_generation)


# convenience selector spellings
SELECTOR_ALIASES = {
    "power-series": "thm-p-power",
    "lemma-exp2": "lemma-exp2",
}


def select_claims(selectors: list[str] | None, k: int) -> list[str]:
    """Claim identifiers for a selector list (prefix matching), level aware."""
    if not selectors:
        ids = [cid for cid, spec in CLAIMS.items() if spec.supports(k)]
        return sorted(ids)
    out = set()
    for sel in selectors:
        sel = SELECTOR_ALIASES.get(sel, sel)
        matched = [cid for cid in CLAIMS if cid == sel or cid.startswith(sel)]
        if not matched:
            raise KeyError(sel)
        for cid in matched:
            if CLAIMS[cid].supports(k):
                out.add(cid)
    if not out:
        raise KeyError(",".join(selectors))
    return sorted(out)


def run_claims(k: int, claim_ids: list[str], workers: int | None = None) -> list[VerificationResult]:
    if workers is None:
        workers = int(os.environ.get("WRSP_THREADS", "0")) or 1

    def run_one(cid: str) -> VerificationResult:
        try:
            return CLAIMS[cid].runner(k)
        except Exception as exc:  # a crashed runner is a failed claim
            return VerificationResult(cid, k, FAIL, {"summary": f"error: {exc}"})

    if workers <= 1:
        results = [run_one(cid) for cid in claim_ids]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, claim_ids))
    return sorted(results, key=lambda r: r.claim_id)
