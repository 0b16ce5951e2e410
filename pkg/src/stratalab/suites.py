"""Verification suites driven by the command line."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from . import building as bt
from . import dl, rz, weyl
from .fq import FqSubspace, field as fq_field, iter_subspaces, projective_points
from .lattice import Lattice, SympSpace, colength
from .report import CheckResult, Report, compare, no_failures
from .ring import make_ring

SUITES = ("dl-partition", "dl-components", "building-ball", "rz-quaternionic", "rz-paramodular", "weyl-eo", "all")
CENSUS_MAX_Q = 9


class EnvelopeError(ValueError):
    """Parameters outside the supported envelope."""


@dataclass(frozen=True)
class SuiteConfig:
    suite: str
    p: int = 3
    d: int = 1
    radius: int = 1
    precision: int | None = None
    out: str | None = None
    fmt: str = "json"
    timings: bool = False
    sample: int = 2000
    seed: int = 0

    @property
    def m(self) -> int:
        return self.precision if self.precision is not None else 2 * self.radius + 4

    def validate(self) -> None:
        if self.suite not in SUITES:
            raise EnvelopeError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if self.p not in (3, 5):
            raise EnvelopeError("p must be 3 or 5")
        if self.d not in (1, 2, 4):
            raise EnvelopeError("deg must be 1, 2 or 4")
        if not 0 <= self.radius <= 2:
            raise EnvelopeError("radius must be between 0 and 2")
        if self.m < 2 * self.radius + 4:
            raise EnvelopeError(f"precision must be at least {2 * self.radius + 4} for radius {self.radius}")
        if self.fmt not in ("json", "text"):
            raise EnvelopeError("format must be json or text")

    def params(self) -> dict:
        return {"p": self.p, "deg": self.d, "radius": self.radius, "precision": self.m}


def _timed(report: Report, fn: Callable[[], list[CheckResult]]) -> None:
    with report.timed() as bucket:
        bucket.extend(fn())


# --- dl ---------------------------------------------------------------------------------


def suite_dl_partition(cfg: SuiteConfig) -> Report:
    rep = Report("dl-partition", cfg.params(), record_timings=cfg.timings)
    p, d = cfg.p, cfg.d
    if p**d > 81 or (p == 5 and d == 4):
        rep.add(CheckResult("dl/envelope", "skipped", None, None, {"reason": "p^(4d) enumeration infeasible"}))
        return rep
    F = fq_field(p, d)

    def counts() -> list[CheckResult]:
        c = dl.count_strata(p, d)
        rep.tables["strata"] = [[lab.value, n] for lab, n in c.items()]
        total = sum(c.values())
        q = p**d
        out = [compare("dl/partition-total", (q**4 - 1) // (q - 1), total)]
        members = total - c[dl.StratumLabel.NotInY]
        if d == 1:
            out.append(compare("dl/level-1-all-XP1", members, c[dl.StratumLabel.XP1]))
        if d == 2:
            out.append(compare("dl/level-2-no-XBw2", 0, c[dl.StratumLabel.XBw2]))
        if d == 4:
            pos = all(c[lab] > 0 for lab in (dl.StratumLabel.XP1, dl.StratumLabel.XBw1, dl.StratumLabel.XBw2))
            out.append(compare("dl/level-4-all-strata-occur", True, pos, None if pos else {"counts": {k.value: v for k, v in c.items()}}))
        return out

    def surface() -> list[CheckResult]:
        pts = projective_points(F, 4)
        codes = dl.label_lines(F, pts)
        surf = dl.surface_points(F)
        bad = [list(map(int, x)) for x, c, s in zip(pts, codes, surf) if (c != 3) != bool(s)]
        return [no_failures("dl/surface-equals-Y+", bad, len(pts))]

    def routes() -> list[CheckResult]:
        pts = projective_points(F, 4)
        codes = dl.label_lines(F, pts)
        idx = list(range(len(pts)))
        exhaustive = len(idx) <= 20000
        if not exhaustive:
            rng = random.Random(cfg.seed)
            members = [i for i in idx if codes[i] != 3]
            idx = sorted(set(rng.sample(idx, cfg.sample)) | set(rng.sample(members, min(cfg.sample, len(members)))))
        bad_plus, bad_surface, bad_direct = [], [], []
        for i in idx:
            x = tuple(int(a) for a in pts[i])
            U = FqSubspace.span(p, d, [x])
            lab = dl.classify_point_plus(U)
            if dl.LABEL_ORDER.index(lab) != codes[i]:
                bad_plus.append({"line": list(x), "subspace_route": lab.value, "line_route": dl.LABEL_ORDER[codes[i]].value})
            member = lab != dl.StratumLabel.NotInY
            if dl.surface_member(x, F) != member:
                bad_surface.append(list(x))
            if dl.plus_direct_member(U) != member:
                bad_direct.append(list(x))
        scope = {"lines_tested": len(idx), "of": len(pts), "exhaustive": exhaustive}
        return [
            no_failures("dl/plus-minus-routes-agree", bad_plus, len(idx)),
            no_failures("dl/surface-member-pointwise", bad_surface, len(idx)),
            no_failures("dl/plus-direct-criterion", bad_direct, len(idx)),
            CheckResult("dl/route-scope", "pass", None, scope),
        ]

    _timed(rep, counts)
    _timed(rep, surface)
    _timed(rep, routes)
    return rep


def suite_dl_components(cfg: SuiteConfig) -> Report:
    rep = Report("dl-components", {"p": cfg.p}, record_timings=cfg.timings)

    def run() -> list[CheckResult]:
        comps = dl.components_w1(cfg.p)
        bad = [T.serialize() for T, lines in comps if dl.perp(T) != T or len(lines) != cfg.p + 1]
        return [
            compare("components/plane-count", (cfg.p + 1) * (cfg.p**2 + 1), len(comps)),
            no_failures("components/self-perp-with-p+1-lines", bad, len(comps)),
        ]

    _timed(rep, run)
    return rep


# --- building ----------------------------------------------------------------------------


def suite_building_ball(cfg: SuiteConfig) -> Report:
    rep = Report("building-ball", cfg.params(), record_timings=cfg.timings)
    ctx = make_ring(cfg.p, 1, cfg.m)
    space = SympSpace.standard(ctx)
    base = bt.vertex(Lattice.standard(space))
    holder: dict = {}

    def enumerate_() -> list[CheckResult]:
        g = bt.enumerate_ball(base, cfg.radius, "bfs")
        g2 = bt.enumerate_ball(base, cfg.radius, "dfs")
        holder["g"] = g
        rep.tables["ball"] = [[t, n] for t, n in sorted(g.count_by_type().items())] + [["edges", len(g.edges)]]
        return [compare("building/traversal-independent", [v.lat.key for v in g.nodes], [v.lat.key for v in g2.nodes], {"bfs": len(g.nodes), "dfs": len(g2.nodes)})]

    def links() -> list[CheckResult]:
        g = holder["g"]
        p = cfg.p
        bad_count, bad_wit, bad_type = [], [], []
        for v in g.of_type(1):
            n0, n2 = bt.neighbors(v, 0), bt.neighbors(v, 2)
            if len(n0) != p + 1 or len(n2) != p + 1:
                bad_count.append({"vertex": v.lat.serialize(), "type0": len(n0), "type2": len(n2)})
            if not (any(v.lat <= w.lat for w in n0) and any(w.lat <= v.lat for w in n2)):
                bad_wit.append(v.lat.serialize())
        for v in g.nodes:
            if bt.classify_vertex(v.lat) != v.vtype:
                bad_type.append(v.lat.serialize())
        asym = [(i, j) for i, j in sorted(g.edges) if not bt.incident(g.nodes[i], g.nodes[j]) or not bt.incident(g.nodes[j], g.nodes[i])]
        base_counts = {t: len(bt.neighbors(base, t)) for t in (1, 2)}
        expected = (p + 1) * (p**2 + 1)
        return [
            no_failures("building/type1-has-p+1-neighbours-each-side", bad_count, len(g.of_type(1))),
            no_failures("building/type1-containment-witnesses", bad_wit, len(g.of_type(1))),
            no_failures("building/neighbours-classify", bad_type, len(g.nodes)),
            no_failures("building/incidence-symmetric", [list(e) for e in asym], len(g.edges)),
            compare("building/type0-link-sizes", {1: expected, 2: expected}, base_counts),
        ]

    _timed(rep, enumerate_)
    _timed(rep, links)
    return rep


# --- rz quaternionic ------------------------------------------------------------------------


def suite_rz_quaternionic(cfg: SuiteConfig) -> Report:
    rep = Report("rz-quaternionic", cfg.params(), record_timings=cfg.timings)
    radius = min(cfg.radius, rz.MAX_RADIUS)
    model = rz.QuatModel.build(cfg.p, cfg.d, radius, cfg.m)
    rep.params["model"] = model.describe()
    L0, L2 = rz.base_vertices(model)
    census_ok = cfg.p**cfg.d <= CENSUS_MAX_Q and radius == 1
    holder: dict = {}

    def identities() -> list[CheckResult]:
        return [compare("rz/form-identity-F-V", True, rz.form_identity_holds(model))]

    def census() -> list[CheckResult]:
        pts = rz.enumerate_ball_points(model, 1)
        holder["census"] = pts
        rep.tables["census"] = [["points", len(pts)]]
        return [CheckResult("rz/census-size", "pass", None, len(pts))]

    def per_point() -> list[CheckResult]:
        pts = holder["census"]
        pappas, crucial, labels, stable_q1 = [], [], [], []
        counts: dict = {}
        cases: dict = {}
        for D in pts:
            if rz.pappas_defect(D, model) > 1:
                pappas.append(D.serialize())
            cr = rz.crucial_lattice(D, model)
            cases[cr.case] = cases.get(cr.case, 0) + 1
            if not cr.ok:
                crucial.append({"point": D.serialize(), "case": cr.case, "stable": cr.stable, "chain": cr.chain_ok, "type": cr.vtype})
            lab = rz.bt_label(D, model)
            counts[lab.kind] = counts.get(lab.kind, 0) + 1
            if not rz.label_valid(lab, model):
                labels.append({"point": D.serialize(), "label": lab.kind, "witnesses": lab.witnesses()})
            if (lab.kind == "Q1") != model.is_tau_stable(D):
                stable_q1.append(D.serialize())
        rep.tables["labels"] = sorted([k, v] for k, v in counts.items())
        rep.tables["crucial_cases"] = sorted([k, v] for k, v in cases.items())
        n = len(pts)
        return [
            no_failures("rz/pappas-defect-at-most-1", pappas, n),
            no_failures("rz/crucial-lemma", crucial, n),
            no_failures("rz/label-witnesses-valid", labels, n),
            no_failures("rz/Q1-iff-tau-stable", stable_q1, n),
        ]

    def involution() -> list[CheckResult]:
        pts = holder["census"]
        S = set(pts)
        swap = {"Q0": "Q2", "Q2": "Q0", "Q02": "Q02", "Q1": "Q1"}
        bad = []
        for D in pts:
            E = rz.duality_involution(D)
            if rz.duality_involution(E) != D or not rz.is_quat_point(E, model):
                bad.append(D.serialize())
                continue
            if swap[rz.bt_label(D, model).kind] != rz.bt_label(E, model).kind:
                bad.append(D.serialize())
        inside = sum(1 for D in pts if rz.duality_involution(D) in S)
        return [
            no_failures("rz/duality-involution-swaps-Q0-Q2", bad, len(pts)),
            CheckResult("rz/duality-involution-scope", "pass", None, {"images_inside_window": inside, "of": len(pts)}),
        ]

    def equivalence() -> list[CheckResult]:
        if cfg.d == 1:
            lats = list(rz.iter_window_all(model.space))
            scope = "full window"
        else:
            lats = list(rz.iter_quat_candidates(model)) + rz.sample_window(model.space, cfg.sample, cfg.seed)
            scope = f"pruned candidates + {cfg.sample} sampled window lattices"
        bad = []
        both = 0
        for L in lats:
            a, b = rz.is_quat_point(L, model), rz.full_module_check(L, model)
            both += a
            if a != b:
                bad.append({"lattice": L.serialize(), "is_quat_point": a, "full_module_check": b})
        return [
            no_failures("rz/full-module-equivalence", bad, len(lats)),
            CheckResult("rz/full-module-scope", "pass", None, {"lattices": len(lats), "points": both, "scope": scope}),
        ]

    def superspecial() -> list[CheckResult]:
        pts = holder["census"]
        bad = [D.serialize() for D in pts if rz.full_superspecial(D, model) != model.is_tau_stable(D)]
        return [no_failures("rz/superspecial-iff-V-equals-Pi", bad, len(pts))]

    def bijections() -> list[CheckResult]:
        out = []
        for rep_ in (
            rz.bijection_report_L0(L0, model, sample=cfg.sample, seed=cfg.seed),
            rz.bijection_report_L2(L2, model, sample=cfg.sample, seed=cfg.seed),
        ):
            out.extend(rep_.checks)
            rep.tables[f"bijection_{rep_.side}"] = [[k, v] for k, v in rep_.label_counts.items()]
        return out

    def intersections() -> list[CheckResult]:
        pts = holder["census"]
        return rz.intersection_checks(model, pts) + [rz.type1_strata_check(model, pts)]

    _timed(rep, identities)
    if census_ok:
        _timed(rep, census)
        _timed(rep, per_point)
        _timed(rep, involution)
        _timed(rep, equivalence)
        _timed(rep, superspecial)
    else:
        rep.add(CheckResult("rz/census", "skipped", None, None, {"reason": "census limited to p^d <= 9 and radius 1"}))
    _timed(rep, bijections)
    if census_ok:
        _timed(rep, intersections)
    return rep


# --- rz paramodular ---------------------------------------------------------------------------


def suite_rz_paramodular(cfg: SuiteConfig) -> Report:
    rep = Report("rz-paramodular", cfg.params(), record_timings=cfg.timings)
    if cfg.d not in (2, 4):
        rep.add(CheckResult("param/envelope", "skipped", None, None, {"reason": "paramodular levels are d = 2, 4"}))
        return rep
    model = rz.ParamModel.build(cfg.p, cfg.d, 1, cfg.m)
    rep.params["model"] = model.describe()
    pair = rz.make_param_pair(model.base, model)

    def operators() -> list[CheckResult]:
        L = model.base
        from .lattice import apply_semilinear

        pi2 = apply_semilinear(model.Pi, apply_semilinear(model.Pi, L)) == L.scaled(1)
        vf = apply_semilinear(model.V, apply_semilinear(model.Pi, L)) == L.scaled(1)
        return [
            compare("param/Pi-squared-is-p", True, pi2),
            compare("param/VF-is-p", True, vf),
            compare("param/tau2-fixes-standard", True, model.is_tau_stable(L)),
            compare("param/base-pair-valid", True, pair.compat),
        ]

    def base_point() -> list[CheckResult]:
        if cfg.d != 2 or cfg.p**cfg.d > CENSUS_MAX_Q:
            return [CheckResult("param/M_std", "skipped", None, None, {"reason": "searched at d = 2, p = 3"})]
        pts = rz.enumerate_ball_points(model, 1)
        stable = [M for M in pts if model.is_tau_stable(M)]
        rep.tables["census"] = [["points", len(pts)], ["superspecial", len(stable)]]
        out = [compare("param/census-nonempty", True, bool(pts))]
        if stable:
            M = stable[0]
            rep.tables["M_std"] = [[M.serialize()]]
            out.append(compare("param/M_std-is-point", True, rz.is_param_point(M, model)))
        bad = [M.serialize() for M in pts if not rz.param_stratify(M, model).ok]
        out.append(no_failures("param/stratify-census", bad, len(pts)))
        return out

    def bijection() -> list[CheckResult]:
        return rz.param_bijection_report(pair, model)

    def stratify() -> list[CheckResult]:
        pts = rz.pair_stratum(pair, model)
        bad, no = [], 0
        kinds: dict = {}
        for M in pts:
            st = rz.param_stratify(M, model)
            kinds[st.label.kind] = kinds.get(st.label.kind, 0) + 1
            no += st.a_number == 1
            if not st.ok:
                bad.append({"point": M.serialize(), "findings": list(st.findings)})
        rep.tables["base_stratum_labels"] = sorted([k, v] for k, v in kinds.items())
        return [
            no_failures("param/stratify-base-stratum", bad, len(pts)),
            CheckResult("param/a-number-1-points", "pass", None, no),
        ]

    def intersections() -> list[CheckResult]:
        return rz.param_pair_intersections(pair, model)

    for fn in (operators, base_point, bijection, stratify, intersections):
        _timed(rep, fn)
    return rep


# --- weyl -----------------------------------------------------------------------------------------


def suite_weyl_eo(cfg: SuiteConfig) -> Report:
    rep = Report("weyl-eo", {}, record_timings=cfg.timings)

    def tables() -> list[CheckResult]:
        out = []
        for case in ("quaternionic", "paramodular"):
            rows = [r.serialize() for r in weyl.eo_table(case)]
            rep.tables[case] = rows
            out.append(compare(f"weyl/table-{case}", weyl.GOLDEN_TABLES[case], rows))
        return out

    def structure() -> list[CheckResult]:
        s0, s1, s2 = weyl.simple_reflections()
        r = weyl.rho_element()

        def power(x, n):
            y = weyl.IDENTITY
            for _ in range(n):
                y = y * x
            return y

        braids = power(s0 * s1, 4) == power(s1 * s2, 4) == power(s0 * s2, 2) == weyl.IDENTITY
        t = weyl.translation(1, 1)
        adm_a, adm_b = weyl.adm_set(), weyl.adm_set_bruteforce()
        adm = set(adm_a)
        small = weyl.ball(4)
        down_bad = [weyl.name(u) for w in adm_a for u in small if weyl.bruhat_leq(u, w) and u not in adm]
        maximal = sorted(weyl.name(w) for w in adm_a if not any(w != v and weyl.bruhat_leq(w, v) for v in adm_a))
        pred = weyl.min_coset_reps((0, 2))
        coset_bad = [weyl.name(w) for w in small if pred(w) != weyl.is_coset_minimal_bruteforce(w, (0, 2))]
        rep.tables["adm"] = [[weyl.name(w), weyl.length(w)] for w in adm_a]
        rep.tables["eo_K02"] = [[weyl.name(w), weyl.length(w)] for w in weyl.eo_set((0, 2))]
        return [
            compare("weyl/braid-relations", True, braids),
            compare("weyl/rho-conjugation", ["s2", "s1", "s0"], [weyl.name(weyl.conjugate_by_rho(x)) for x in (s0, s1, s2)]),
            compare("weyl/length-of-t_lambda", 3, weyl.length(t)),
            compare("weyl/adm-two-strategies", len(adm_b), len(adm_a)),
            compare("weyl/adm-sets-equal", [weyl.name(w) for w in adm_b], [weyl.name(w) for w in adm_a]),
            no_failures("weyl/adm-downward-closed", down_bad, len(adm_a)),
            compare("weyl/adm-maximal-elements", sorted(weyl.name(w) for w in weyl.mu_translations()), maximal),
            no_failures("weyl/coset-predicate-vs-bruteforce", coset_bad, len(small)),
        ]

    _timed(rep, tables)
    _timed(rep, structure)
    return rep


RUNNERS = {
    "dl-partition": suite_dl_partition,
    "dl-components": suite_dl_components,
    "building-ball": suite_building_ball,
    "rz-quaternionic": suite_rz_quaternionic,
    "rz-paramodular": suite_rz_paramodular,
    "weyl-eo": suite_weyl_eo,
}


def run_suite(cfg: SuiteConfig) -> Report:
    cfg.validate()
    if cfg.suite != "all":
        return RUNNERS[cfg.suite](cfg)
    rep = Report("all", cfg.params(), record_timings=cfg.timings)
    for name, fn in RUNNERS.items():
        rep.merge(fn(cfg))
    return rep
