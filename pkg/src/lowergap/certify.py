"""Certificate engine: every inequality checked on one instance, with hypothesis gating.

Each check is a list of named parts oriented as ``lhs >= rhs``. A part holds
when ``lhs - rhs >= -tol * max(1, |lhs|, |rhs|)``; the check reports its
worst part. Checks whose hypotheses fail are reported vacuous, never dropped.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Optional, Sequence, Union

import numpy as np

from . import freiman
from .errors import InvalidInstance, LowerGapError
from .graphs import SpectralInstance
from .groups import index_two_subgroups, is_simple, subgroup_orbits
from .invariants import (
    EXACT_BIPARTITENESS_MAX_N,
    EXACT_CHEEGER_MAX_N,
    CombinatorialConstants,
    combinatorial_constants,
    sigma_overlap,
)
from .spectral import (
    XI_NU_HALF,
    XI_NU_ONE,
    SpectralProfile,
    bottom_eigenfunction,
    decompose,
    default_xi,
    derived_constants,
    dichotomy_delta,
    plus_mass_factor,
)

DEFAULT_TOLERANCE = 1e-9
RANDOM_SUBSETS = 16
CHECK_IDS = tuple(f"C{i}" for i in range(1, 16))
KAPPA_STAGE_MAX = 1.0 / 260.0

Number = Union[float, Fraction]


@dataclass(frozen=True)
class CertifyOptions:
    xi: Optional[float] = None  # None: 4/5 when nu == 1, else 123/1000
    tolerance: float = DEFAULT_TOLERANCE
    max_exact_bipartiteness: int = EXACT_BIPARTITENESS_MAX_N
    max_exact_cheeger: int = EXACT_CHEEGER_MAX_N
    simple_group: Optional[bool] = None  # overrides the brute-force simplicity test


@dataclass(frozen=True)
class Part:
    name: str
    lhs: Number
    rhs: Number
    count: int = 1  # how many instances of this inequality were evaluated
    relation: str = ">="  # or "==" for stated identities

    @property
    def margin(self) -> float:
        diff = float(self.lhs) - float(self.rhs)
        return -abs(diff) if self.relation == "==" else diff

    def scale(self) -> float:
        return max(1.0, abs(float(self.lhs)), abs(float(self.rhs)))

    def slack(self) -> float:
        """Margin relative to the tolerance scale; the worst part minimizes this."""
        return self.margin / self.scale()


@dataclass(frozen=True)
class CheckResult:
    id: str
    title: str
    hypothesis_satisfied: bool
    lhs: Optional[Number] = None
    rhs: Optional[Number] = None
    margin: Optional[float] = None
    status: str = "vacuous"
    parts: tuple[Part, ...] = ()
    note: str = ""
    borderline: bool = False

    @property
    def passed(self) -> bool:
        return self.status != "fail"


def _vacuous(cid: str, title: str, why: str, borderline: bool = False) -> CheckResult:
    return CheckResult(cid, title, False, note=why, borderline=borderline)


def _failed(cid: str, title: str, why: str) -> CheckResult:
    return CheckResult(cid, title, True, status="fail", note=why)


def _evaluate(cid: str, title: str, parts: Sequence[Part], tol: float, note: str = "", borderline=False) -> CheckResult:
    # collapse repeated names to their worst instance, keeping first-seen order
    worst: dict[str, Part] = {}
    counts: dict[str, int] = {}
    for p in parts:
        counts[p.name] = counts.get(p.name, 0) + p.count
        if p.name not in worst or p.slack() < worst[p.name].slack():
            worst[p.name] = p
    merged = tuple(Part(p.name, p.lhs, p.rhs, counts[p.name], p.relation) for p in worst.values())
    if not merged:
        return _failed(cid, title, "no inequality was evaluated")
    w = min(merged, key=Part.slack)
    ok = all(p.margin >= -tol * p.scale() for p in merged)
    near = any(abs(p.margin) <= tol * p.scale() and max(abs(float(p.lhs)), abs(float(p.rhs))) > tol for p in merged)
    return CheckResult(
        cid, title, True, w.lhs, w.rhs, w.margin, "pass" if ok else "fail", merged, note, borderline or near
    )


def _near(x: float, gate: float, tol: float) -> bool:
    return abs(x - gate) <= tol * max(1.0, abs(gate))


def _le_gate(x: float, gate: float, tol: float) -> bool:
    return x <= gate + tol * max(1.0, abs(gate))


def random_subsets(inst: SpectralInstance, count: int = RANDOM_SUBSETS) -> list[frozenset[int]]:
    """Deterministic pseudo-random vertex sets seeded from a hash of the instance."""
    h = hashlib.sha256()
    h.update(inst.kind.encode())
    h.update(np.ascontiguousarray(inst.rho, dtype=np.int64).tobytes())
    rng = np.random.default_rng(int.from_bytes(h.digest()[:8], "little"))
    masks = rng.random((count, inst.n)) < 0.5
    return [frozenset(np.flatnonzero(m).tolist()) for m in masks]


@dataclass
class _Context:
    inst: SpectralInstance
    opts: CertifyOptions
    profile: SpectralProfile
    consts: CombinatorialConstants
    derived: Any
    subgroups: list
    orbits: list  # one orbit partition per index-two subgroup
    odd_or_simple: Optional[bool]
    no_transitive_index_two: bool
    left2right: freiman.Left2RightResult
    randoms: list
    freiman_info: dict = field(default_factory=dict)

    @property
    def kappa(self) -> float:
        return self.profile.kappa

    @property
    def kappa_ok(self) -> bool:
        return 0.0 < self.kappa < 1.0

    @property
    def tol(self) -> float:
        return self.opts.tolerance


def _lhs_1pmu(ctx: _Context) -> float:
    return 1.0 + ctx.profile.mu


def _gap(ctx: _Context) -> float:
    return 1.0 - ctx.profile.mu2


def check_c1(ctx):
    d = ctx.inst.d
    return _evaluate("C1", "main lower-gap bound", [Part("1+mu >= (1-mu2)/(50000 d)", _lhs_1pmu(ctx), _gap(ctx) / (50000 * d))], ctx.tol)


def check_c2(ctx):
    title = "odd-order or simple group bound"
    if not ctx.odd_or_simple:
        why = "group order above the simplicity-test cap" if ctx.odd_or_simple is None else "group neither of odd order nor simple"
        return _vacuous("C2", title, why)
    return _evaluate("C2", title, [Part("1+mu >= (1-mu2)/2525", _lhs_1pmu(ctx), _gap(ctx) / 2525)], ctx.tol)


def check_c3(ctx):
    title = "vertex Cheeger corollary"
    h = ctx.consts.vertex_cheeger
    if h is None:
        return _vacuous("C3", title, "vertex Cheeger constant not computed exactly (above cap)")
    d = ctx.inst.d
    parts = [Part("1+mu >= h^2/(350000 d^2)", _lhs_1pmu(ctx), float(h * h) / (350000 * d * d))]
    if ctx.odd_or_simple:
        parts.append(Part("1+mu >= h^2/17675", _lhs_1pmu(ctx), float(h * h) / 17675))
    return _evaluate("C3", title, parts, ctx.tol)


def check_c4(ctx):
    title = "dual Cheeger sandwich"
    b = ctx.consts.edge_bipartiteness
    if b is None:
        return _vacuous("C4", title, "edge bipartiteness constant not computed exactly (above cap)")
    return _evaluate("C4", title, [
        Part("2 beta_edge >= 1+mu", 2 * b, _lhs_1pmu(ctx)),
        Part("1+mu >= beta_edge^2/2", _lhs_1pmu(ctx), b * b / 2),
    ], ctx.tol)


def check_c5(ctx):
    title = "kappa versus edge bipartiteness"
    b = ctx.consts.edge_bipartiteness
    if not ctx.kappa_ok:
        return _vacuous("C5", title, "kappa outside (0, 1)")
    if b is None:
        return _vacuous("C5", title, "edge bipartiteness constant not computed exactly (above cap)")
    k = ctx.kappa
    return _evaluate("C5", title, [
        Part("(1+mu)/(2(1-kappa)) >= beta_edge", _lhs_1pmu(ctx) / (2 * (1 - k)), b),
        Part("kappa >= beta_edge/2", k, b / 2),
    ], ctx.tol)


def _lemma_gate(ctx, cid, title):
    if not ctx.kappa_ok:
        return _vacuous(cid, title, "kappa outside (0, 1)")
    if not ctx.profile.conditioned:
        return _vacuous(cid, title, "eigenfunction could not be made nowhere zero")
    return None


def check_c6(ctx):
    title = "structured/small decomposition norms"
    gate = _lemma_gate(ctx, "C6", title)
    if gate:
        return gate
    k, s = ctx.kappa, ctx.derived.sigma_c
    dec = decompose(ctx.profile.f)
    nf = float(np.linalg.norm(ctx.profile.f))
    return _evaluate("C6", title, [
        Part("sqrt(kappa)||f|| >= ||f_sml||", math.sqrt(k) * nf, dec.norm_sml),
        Part("||f_str|| >= sqrt(1-kappa)||f||", dec.norm_str, math.sqrt(1 - k) * nf),
        Part("sigma ||f_str|| >= ||f_sml||", s * dec.norm_str, dec.norm_sml),
    ], ctx.tol)


def check_c7(ctx):
    title = "kappa versus bipartiteness of f"
    gate = _lemma_gate(ctx, "C7", title)
    if gate:
        return gate
    k, beta, d = ctx.kappa, ctx.derived.beta_f, ctx.inst.d
    mu, gap, s = ctx.profile.mu, _gap(ctx), ctx.derived.sigma_c
    mid = 2 * beta / (gap + 2 * beta)
    proved = (1 + mu + (1 - mu) * s * s) / 2
    stated = gap * k / (2 * (1 - k))
    parts = [
        Part("(1+mu+(1-mu) sigma^2)/2 >= beta", proved, beta),
        Part("(1-mu2) kappa/(2(1-kappa)) >= beta", stated, beta),
        Part("kappa/(1-kappa) >= (1-mu2) kappa/(2(1-kappa))", k / (1 - k), stated),
        Part("kappa >= 2 beta/(1-mu2+2 beta)", k, mid),
        Part("2 beta/(1-mu2+2 beta) >= beta/(1+beta)", mid, beta / (1 + beta)),
        Part("beta/(1+beta) >= beta/2", beta / (1 + beta), beta / 2),
    ]
    if 2 * d * beta >= 1:
        parts.append(Part("kappa >= 1/(d(1-mu2)+1)", k, 1 / (d * gap + 1)))
    if ctx.consts.edge_bipartiteness is not None:
        parts.append(Part("beta >= beta_edge", beta, float(ctx.consts.edge_bipartiteness)))
    note = "" if 2 * d * beta >= 1 else "2 d beta < 1: the 1/(d(1-mu2)+1) branch does not apply"
    return _evaluate("C7", title, parts, ctx.tol, note)


def check_c8(ctx):
    title = "l1 mass on vertex subsets"
    gate = _lemma_gate(ctx, "C8", title)
    if gate:
        return gate
    f = ctx.profile.f
    n = f.size
    s = ctx.derived.sigma_c
    dec = decompose(f)
    ns = dec.norm_str
    plus = f > 0
    families = [frozenset(range(n))] + [O for part in ctx.orbits for O in part] + ctx.randoms
    parts = []
    rn = math.sqrt(n)
    for X in families:
        mask = np.zeros(n, dtype=bool)
        mask[list(X)] = True
        P = plus & mask
        m = int(P.sum())
        parts.append(Part("sigma sqrt(m/n)||f_str|| >= (1/sqrt n) sum_P |f_sml|",
                          s * math.sqrt(m) / rn * ns, float(np.abs(dec.f_sml[P]).sum()) / rn))
        parts.append(Part("(1/sqrt n)|sum_P f| >= ||f_str|| m/n - sigma ||f_str|| sqrt(m/n)",
                          abs(float(f[P].sum())) / rn, ns * m / n - s * ns * math.sqrt(m) / rn))
    return _evaluate("C8", title, parts, ctx.tol, f"{len(families)} subsets")


def check_c9(ctx):
    title = "support sizes and positive mass"
    k = ctx.kappa
    gate = _lemma_gate(ctx, "C9", title)
    if gate:
        return gate
    if not _le_gate(k, 0.2, ctx.tol):
        return _vacuous("C9", title, "kappa > 1/5", _near(k, 0.2, ctx.tol))
    s = ctx.derived.sigma_c
    n = ctx.profile.n
    sp, sm = len(ctx.profile.supp_plus), len(ctx.profile.supp_minus)
    nf2 = float(ctx.profile.f @ ctx.profile.f)
    fp2 = float(ctx.profile.f_plus @ ctx.profile.f_plus)
    return _evaluate("C9", title, [
        Part("(1+sigma) n/2 >= |supp f+|", (1 + s) * n / 2, sp),
        Part("|supp f-| >= (1-sigma) n/2", sm, (1 - s) * n / 2),
        Part("|supp f-| >= (1-sigma)/(1+sigma) |supp f+|", sm, (1 - s) / (1 + s) * sp),
        Part("(1+sigma+kappa+2 sqrt2 sqrt kappa)/2 ||f||^2 >= ||f+||^2", plus_mass_factor(k) / 2 * nf2, fp2),
    ], ctx.tol, borderline=_near(k, 0.2, ctx.tol))


def check_c10(ctx):
    title = "positive part carries a fixed share"
    k = ctx.kappa
    gate = _lemma_gate(ctx, "C10", title)
    if gate:
        return gate
    if not _le_gate(k, 1 / 3, ctx.tol):
        return _vacuous("C10", title, "kappa > 1/3", _near(k, 1 / 3, ctx.tol))
    th = ctx.derived.theta_c
    nf = float(np.linalg.norm(ctx.profile.f))
    np_ = float(np.linalg.norm(ctx.profile.f_plus))
    nm = float(np.linalg.norm(ctx.profile.f_minus))
    root = math.sqrt(max(0.0, 1 - th * th))
    parts = [
        Part("||f+|| >= theta ||f||", np_, th * nf),
        Part("sqrt(1-theta^2)||f|| >= ||f-||", root * nf, nm),
    ]
    note = ""
    if th > 1e-6:
        parts.append(Part("sqrt(theta^-2-1)||f+|| >= sqrt(1-theta^2)||f||", math.sqrt(th**-2 - 1) * np_, root * nf))
    else:
        note = "theta ~ 0: the bound via ||f+|| is unbounded and omitted"
    return _evaluate("C10", title, parts, ctx.tol, note, borderline=_near(k, 1 / 3, ctx.tol))


def _distinct_perms(perm: np.ndarray) -> np.ndarray:
    _, idx = np.unique(perm, axis=0, return_index=True)
    return perm[np.sort(idx)]


def check_c11(ctx):
    title = "correlation against overlap size"
    gate = _lemma_gate(ctx, "C11", title)
    if gate:
        return gate
    f = ctx.profile.f
    n = f.size
    k = ctx.kappa
    fp = np.maximum(f, 0.0)
    nf2 = float(f @ f)
    ns2 = decompose(f).norm_str ** 2
    perms = _distinct_perms(ctx.inst.action.perm)
    plus = sorted(ctx.profile.supp_plus)
    parts = []
    for pi in perms:
        pf = np.empty_like(f)
        pf[pi] = f  # (pi f)(v) = f(pi^-1 v)
        corr = float(fp @ np.maximum(pf, 0.0))
        I = len(sigma_overlap(pi, plus, n)[1]) / n
        parts.append(Part("(2 sqrt(I/n) sqrt(kappa)+kappa)||f||^2 >= |<f+,(pi f)+> - (I/n)||f_str||^2|",
                          (2 * math.sqrt(I) * math.sqrt(k) + k) * nf2, abs(corr - I * ns2)))
        parts.append(Part("((I/n) kappa+2 sqrt(I/n) sqrt(kappa)+kappa)||f||^2 >= |<f+,(pi f)+> - (I/n)||f||^2|",
                          (I * k + 2 * math.sqrt(I) * math.sqrt(k) + k) * nf2, abs(corr - I * nf2)))
    return _evaluate("C11", title, parts, ctx.tol, f"{len(perms)} permutations")


def _sigma_table(sets: list[frozenset[int]], perms: np.ndarray, n: int) -> np.ndarray:
    """table[s, p] = Sigma_{perms[p], sets[s]}."""
    masks = np.zeros((len(sets), n), dtype=bool)
    for i, S in enumerate(sets):
        masks[i, list(S)] = True
    inv = np.argsort(perms, axis=1)
    pulled = masks[:, inv]  # pulled[s, p, v] = masks[s, pi_p^-1 v]
    return (pulled == masks[:, None, :]).sum(axis=2) / n


def check_c12(ctx):
    title = "overlap functional is Lipschitz in the set"
    n = ctx.inst.n
    sets = [ctx.profile.supp_plus] + [O for part in ctx.orbits for O in part] + ctx.randoms
    perms = _distinct_perms(ctx.inst.action.perm)
    table = _sigma_table(sets, perms, n)
    masks = np.zeros((len(sets), n), dtype=bool)
    for i, S in enumerate(sets):
        masks[i, list(S)] = True
    parts = []
    for i, j in combinations(range(len(sets)), 2):
        sym = int(np.count_nonzero(masks[i] != masks[j]))
        bound = math.sqrt(2.0) * math.sqrt(sym / n)
        diff = np.abs(table[i] - table[j])
        p = int(np.argmax(diff))
        parts.append(Part("sqrt2 sqrt((|A-B|+|B-A|)/n) >= |Sigma_pi,A - Sigma_pi,B|", bound, float(diff[p]), len(perms)))
    return _evaluate("C12", title, parts, ctx.tol, f"{len(sets)} sets, {len(perms)} permutations")


def _stage_gates(ctx, xi_max: float) -> list[str]:
    """Names of the shared hypotheses of the index-two stage that fail."""
    failed = []
    if not ctx.kappa_ok:
        failed.append("0 < kappa < 1")
    elif not _le_gate(ctx.kappa, KAPPA_STAGE_MAX, ctx.tol):
        failed.append("kappa <= 1/260")
    if ctx.derived.xi > xi_max:
        failed.append(f"xi <= {xi_max:g}")
    if not ctx.profile.conditioned:
        failed.append("f nowhere zero")
    if not ctx.no_transitive_index_two:
        failed.append("no index-two subgroup acts transitively")
    return failed


def _stage_correlations(ctx):
    """(correlation profile, delta, verdict) at the configured xi, or a reason string."""
    info = ctx.freiman_info
    if "stage" not in info:
        delta = ctx.derived.delta
        if delta is None or not 0.0 < delta < 0.5:
            info["stage"] = f"delta = {delta} outside (0, 1/2)"
        else:
            corr = freiman.correlation_profile(ctx.profile, ctx.inst.action)
            info["stage"] = (corr, delta, freiman.dichotomy_test(corr, delta))
    return info["stage"]


def check_c13(ctx):
    title = "no dichotomy gives an index-two subgroup and a concentrated orbit"
    failed = _stage_gates(ctx, float(XI_NU_ONE))
    if failed:
        return _vacuous("C13", title, "hypotheses not met: " + ", ".join(failed), _near(ctx.kappa, KAPPA_STAGE_MAX, ctx.tol))
    stage = _stage_correlations(ctx)
    if isinstance(stage, str):
        return _vacuous("C13", title, stage)
    corr, delta, verdict = stage
    if verdict.dichotomy_holds:
        return _vacuous("C13", title, f"dichotomy holds (witness {verdict.witness})")
    try:
        H, _ = freiman.extract_index_two(corr, ctx.inst.group, delta)
    except LowerGapError as exc:
        return _failed("C13", title, f"extraction failed: {exc}")
    ctx.freiman_info["H"] = sorted(H)
    oc = freiman.orbit_concentration(H, ctx.profile, ctx.derived, ctx.inst.action, delta, ctx.tol)
    return _evaluate("C13", title, [
        Part("index of H == 2", 2, 2, relation="=="),
        Part("orbit bound >= min_O |supp f+ outside O|/n", oc.rhs, oc.lhs),
    ], ctx.tol, f"|H| = {len(H)}", borderline=_near(ctx.kappa, KAPPA_STAGE_MAX, ctx.tol))


def check_c14(ctx):
    title = "no dichotomy gives a lower gap"
    nu = ctx.consts.nu
    if nu == 1:
        xi_max, bound, branch = float(XI_NU_ONE), 1 / (10 * ctx.inst.d), "nu = 1"
    elif nu >= Fraction(1, 2):
        xi_max, bound, branch = float(XI_NU_HALF), 1 / (50000 * ctx.inst.d), "nu >= 1/2"
    else:
        return _vacuous("C14", title, f"nu = {nu} < 1/2")
    failed = _stage_gates(ctx, xi_max)
    if failed:
        return _vacuous("C14", title, "hypotheses not met: " + ", ".join(failed), _near(ctx.kappa, KAPPA_STAGE_MAX, ctx.tol))
    stage = _stage_correlations(ctx)
    if isinstance(stage, str):
        return _vacuous("C14", title, stage)
    _, _, verdict = stage
    if verdict.dichotomy_holds:
        return _vacuous("C14", title, f"dichotomy holds (witness {verdict.witness})")
    beta = ctx.derived.beta_f
    return _evaluate("C14", title, [
        Part("kappa >= beta/2", ctx.kappa, beta / 2),
        Part(f"beta/2 >= bound ({branch})", beta / 2, bound),
    ], ctx.tol, borderline=_near(ctx.kappa, KAPPA_STAGE_MAX, ctx.tol))


def check_c15(ctx):
    title = "dichotomy gives a lower gap"
    nu = ctx.consts.nu
    if nu == 1:
        denom, xi = 2521, float(XI_NU_ONE)
    elif nu >= Fraction(1, 2):
        denom, xi = 54632, float(XI_NU_HALF)
    else:
        return _vacuous("C15", title, f"nu = {nu} < 1/2")
    failed = []
    if not ctx.kappa_ok:
        failed.append("0 < kappa < 1")
    if not ctx.profile.conditioned:
        failed.append("f nowhere zero")
    if not ctx.no_transitive_index_two:
        failed.append("no index-two subgroup acts transitively")
    if not ctx.left2right.holds:
        failed.append("companion permutations verified")
    if failed:
        return _vacuous("C15", title, "hypotheses not met: " + ", ".join(failed))
    # above 1/260 the closed form for delta is not positive; the threshold is
    # evaluated at the stage boundary, where the conclusion is what is tested
    delta = dichotomy_delta(min(ctx.kappa, KAPPA_STAGE_MAX), xi)
    corr = freiman.correlation_profile(ctx.profile, ctx.inst.action)
    verdict = freiman.dichotomy_test(corr, delta)
    ctx.freiman_info["dichotomy"] = {"delta": delta, "witness": verdict.witness}
    if not verdict.dichotomy_holds:
        return _vacuous("C15", title, f"no dichotomy at delta = {delta:.6g}")
    return _evaluate("C15", title, [
        Part(f"1+mu >= (1-mu2)/{denom}", _lhs_1pmu(ctx), _gap(ctx) / denom),
    ], ctx.tol, f"witness {verdict.witness}, ratio {corr.ratio(verdict.witness):.6g}")


CHECKS = (check_c1, check_c2, check_c3, check_c4, check_c5, check_c6, check_c7, check_c8,
          check_c9, check_c10, check_c11, check_c12, check_c13, check_c14, check_c15)


@dataclass(frozen=True, eq=False)
class CertificateReport:
    instance: dict
    n: int
    d: int
    mu: float
    mu2: float
    kappa: float
    eigenvalues: tuple[float, ...]
    constants: dict
    profile: dict
    freiman: dict
    checks: tuple[CheckResult, ...]

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, cid: str) -> CheckResult:
        return next(c for c in self.checks if c.id == cid)

    def hypothesis_summary(self) -> str:
        vac = [c.id for c in self.checks if c.status == "vacuous"]
        fail = [c.id for c in self.checks if c.status == "fail"]
        npass = sum(c.status == "pass" for c in self.checks)
        text = f"{self.instance['label']}: {npass} pass, {len(fail)} fail, {len(vac)} vacuous"
        if vac:
            text += " (" + "; ".join(f"{c.id}: {c.note}" for c in self.checks if c.status == "vacuous") + ")"
        return text


def _prepare(inst: SpectralInstance, opts: CertifyOptions) -> _Context:
    if not inst.flags.valid:
        raise InvalidInstance(f"{inst.label}: " + ", ".join(inst.flags.reasons), inst.flags.reasons)
    profile = bottom_eigenfunction(inst, strict=False)
    consts = combinatorial_constants(inst, opts.max_exact_cheeger, opts.max_exact_bipartiteness)
    xi = opts.xi if opts.xi is not None else default_xi(consts.nu)
    derived = derived_constants(profile, inst, xi=xi)
    G = inst.group
    subgroups = index_two_subgroups(G)
    orbits = [subgroup_orbits(H, inst.action) for H in subgroups]
    if opts.simple_group is not None:
        odd_or_simple = G.order % 2 == 1 or opts.simple_group
    elif G.order % 2 == 1:
        odd_or_simple = True
    else:
        odd_or_simple = is_simple(G)
    return _Context(
        inst=inst, opts=opts, profile=profile, consts=consts, derived=derived,
        subgroups=subgroups, orbits=orbits, odd_or_simple=odd_or_simple,
        no_transitive_index_two=inst.action.is_transitive() and all(len(o) > 1 for o in orbits),
        left2right=freiman.verify_left2right(inst), randoms=random_subsets(inst),
    )


def certify_instance(inst: SpectralInstance, options: Optional[CertifyOptions] = None) -> CertificateReport:
    """Evaluate C1..C15 on a validated instance.

    A check whose computation raises is reported as failed with the error as
    its note; the rest of the report is still produced.
    """
    opts = options or CertifyOptions()
    ctx = _prepare(inst, opts)
    results = []
    for fn, cid in zip(CHECKS, CHECK_IDS):
        try:
            results.append(fn(ctx))
        except Exception as exc:  # noqa: BLE001 - a broken check must not sink the report
            results.append(_failed(cid, fn.__name__, f"{type(exc).__name__}: {exc}"))
    p, c, dv = ctx.profile, ctx.consts, ctx.derived
    stage = ctx.freiman_info.get("stage")
    fr: dict[str, Any] = {"index_two_subgroups": [sorted(H) for H in ctx.subgroups],
                          "condition_no_transitive_index_two": ctx.no_transitive_index_two,
                          "left2right": ctx.left2right.holds}
    if isinstance(stage, tuple):
        fr["stage_delta"] = stage[1]
        fr["stage_witness"] = stage[2].witness
    if "H" in ctx.freiman_info:
        fr["H"] = ctx.freiman_info["H"]
    if "dichotomy" in ctx.freiman_info:
        fr["dichotomy_delta"] = ctx.freiman_info["dichotomy"]["delta"]
        fr["dichotomy_witness"] = ctx.freiman_info["dichotomy"]["witness"]
    return CertificateReport(
        instance={"label": inst.label, "kind": inst.kind, "group_order": inst.group.order,
                  "connection_set": None if inst.connection_set is None else list(inst.connection_set),
                  "automorphism": None if inst.automorphism is None else list(inst.automorphism)},
        n=inst.n, d=inst.d, mu=p.mu, mu2=p.mu2, kappa=p.kappa,
        eigenvalues=tuple(float(x) for x in p.eigenvalues),
        constants={
            "edge_cheeger": c.edge_cheeger, "vertex_cheeger": c.vertex_cheeger,
            "edge_bipartiteness": c.edge_bipartiteness, "nu": c.nu,
            "sigma": dv.sigma_c, "theta": dv.theta_c, "xi": dv.xi, "delta": dv.delta, "beta_f": dv.beta_f,
        },
        profile={"supp_plus": sorted(p.supp_plus), "supp_minus": sorted(p.supp_minus),
                 "conditioned": p.conditioned, "multiplicity": p.multiplicity,
                 "translates_used": p.translates_used, "residual": p.residual},
        freiman=fr,
        checks=tuple(results),
    )


def c1_ratio(report: CertificateReport) -> float:
    """(1+mu) * 50000 d / (1-mu2): how far above the main bound the instance sits."""
    return (1.0 + report.mu) * 50000 * report.d / (1.0 - report.mu2)
