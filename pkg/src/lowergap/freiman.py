"""Freiman pivoting: correlations <f+, (tau.f)+>, dichotomy detection, index-two extraction.

Also hosts the Left2Right (companion permutation) verification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .errors import HypothesisNotMet, NotASubgroup, WrongIndex
from .graphs import SpectralInstance
from .groups import FiniteGroup, GroupAction, subgroup_orbits
from .spectral import DerivedConstants, SpectralProfile, plus_mass_factor, sigma_const

TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class CorrelationProfile:
    values: np.ndarray  # values[tau] = <f+, (tau.f)+>
    norm_plus_sq: float
    delta: Optional[float] = None
    witness: Optional[int] = None
    dichotomy_holds: Optional[bool] = None
    H: Optional[frozenset[int]] = None

    @classmethod
    def synthetic(cls, values: Sequence[float], norm_plus_sq: float) -> "CorrelationProfile":
        """A profile built directly from numbers, bypassing any spectrum."""
        return cls(np.asarray(values, dtype=np.float64), float(norm_plus_sq))

    def ratio(self, tau: int) -> float:
        return float(self.values[tau] / self.norm_plus_sq)


def correlation_profile(profile: SpectralProfile, action: GroupAction) -> CorrelationProfile:
    f = np.asarray(profile.f)
    fp = np.maximum(f, 0.0)
    # translates[tau, v] = f(tau^-1 v)
    translates = f[action.inverse_perm]
    values = np.maximum(translates, 0.0) @ fp
    return CorrelationProfile(values, float(fp @ fp))


@dataclass(frozen=True)
class DichotomyVerdict:
    dichotomy_holds: bool
    witness: Optional[int]
    delta: float


def dichotomy_test(corr: CorrelationProfile, delta: float) -> DichotomyVerdict:
    """First tau whose correlation lies strictly inside (delta, 1-delta) * ||f+||^2."""
    if not 0.0 < delta < 0.5:
        raise ValueError(f"delta must lie in (0, 1/2), got {delta}")
    lo = delta * corr.norm_plus_sq + TIE_TOL
    hi = (1.0 - delta) * corr.norm_plus_sq - TIE_TOL
    inside = np.flatnonzero((corr.values > lo) & (corr.values < hi))
    if inside.size:
        return DichotomyVerdict(True, int(inside[0]), delta)
    return DichotomyVerdict(False, None, delta)


@dataclass(frozen=True)
class SubgroupVerification:
    contains_identity: bool
    closed_under_mul: bool
    closed_under_inv: bool
    index: Optional[int]

    @property
    def ok(self) -> bool:
        return self.contains_identity and self.closed_under_mul and self.closed_under_inv and self.index == 2


def extract_index_two(
    corr: CorrelationProfile,
    G: FiniteGroup,
    delta: Optional[float] = None,
    failed_hypotheses: Sequence[str] = (),
) -> tuple[frozenset[int], SubgroupVerification]:
    """H = {tau : <f+, (tau.f)+> >= (1-delta) ||f+||^2}, verified to be an index-two subgroup.

    ``failed_hypotheses`` is attached to the raised error so a failure can be
    traced to the assumptions that were not met.
    """
    delta = corr.delta if delta is None else delta
    if delta is None:
        raise ValueError("delta is required")
    if dichotomy_test(corr, delta).dichotomy_holds:
        raise ValueError("extraction requires the absence of a dichotomy")
    thr = (1.0 - delta) * corr.norm_plus_sq - TIE_TOL
    H = np.flatnonzero(corr.values >= thr)
    inside = np.zeros(G.order, dtype=bool)
    inside[H] = True
    check = SubgroupVerification(
        contains_identity=bool(inside[G.identity]),
        closed_under_mul=bool(inside[G.mul[np.ix_(H, H)]].all()),
        closed_under_inv=bool(inside[G.inv[H]].all()),
        index=G.order // H.size if H.size and G.order % H.size == 0 else None,
    )
    members = frozenset(int(h) for h in H)
    if not (check.contains_identity and check.closed_under_mul and check.closed_under_inv):
        raise NotASubgroup(f"candidate {sorted(members)} is not a subgroup", failed_hypotheses)
    if check.index != 2:
        raise WrongIndex(
            f"candidate subgroup of order {H.size} has index {G.order / H.size:g}, not 2",
            failed_hypotheses,
        )
    return members, check


def orbit_concentration_bound(kappa: float, delta: float) -> float:
    """sigma/sqrt2 + (sqrt(delta)/2) * sqrt((1+sigma+kappa+2 sqrt2 sqrt kappa) / (2(1-kappa)))."""
    s = sigma_const(kappa)
    return s / math.sqrt(2.0) + math.sqrt(delta) / 2.0 * math.sqrt(plus_mass_factor(kappa) / (2.0 * (1.0 - kappa)))


@dataclass(frozen=True)
class OrbitConcentration:
    lhs: float  # min over H-orbits O of |supp(f+) \ O| / n
    rhs: float
    orbit: frozenset[int]

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + 1e-9 * max(1.0, abs(self.rhs))


def orbit_concentration(
    H,
    profile: SpectralProfile,
    derived: DerivedConstants,
    action: GroupAction,
    delta: Optional[float] = None,
    tol: float = 1e-9,
) -> OrbitConcentration:
    """Best H-orbit for supp(f+) and the bound it must meet; gates allow ``tol`` slack on kappa."""
    kappa = derived.kappa
    if not (0.0 < kappa <= 1.0 / 260.0 + tol) or derived.xi > 0.8:
        raise HypothesisNotMet(f"needs 0 < kappa <= 1/260 and xi <= 4/5 (kappa={kappa:.6g}, xi={derived.xi})")
    delta = derived.delta if delta is None else delta
    orbits = subgroup_orbits(H, action)
    n = profile.n
    plus = profile.supp_plus
    best = min(orbits, key=lambda O: (len(plus - O), min(O)))
    return OrbitConcentration(len(plus - best) / n, orbit_concentration_bound(kappa, delta), best)


# ---------------------------------------------------------------------------
# Left2Right


@dataclass(frozen=True, eq=False)
class Left2RightResult:
    holds: bool
    companions: Optional[np.ndarray] = field(default=None, repr=False)  # companions[tau] = rho_tau
    witness: Optional[tuple[int, int, int]] = None  # (tau, u, v)


def canonical_companion(inst: SpectralInstance) -> Optional[Callable[[int], np.ndarray]]:
    """Companion permutation per group element for the built-in families.

    Cayley and vertex-transitive graphs use tau itself; the sum and twisted
    variants need the adjusted maps worked out from their neighbor rules.
    """
    G = inst.group
    m, inv = G.mul, G.inv
    if inst.kind in ("cayley", "vertex_transitive"):
        return lambda tau: inst.action.perm[tau]
    if inst.kind == "cayley_sum":
        return lambda tau: m[:, inv[tau]]  # u -> u tau^-1
    sig = np.asarray(inst.automorphism, dtype=np.int64)
    if inst.kind == "twisted_cayley":
        return lambda tau: m[sig[tau]]  # u -> sigma(tau) u
    if inst.kind == "twisted_cayley_sum":
        return lambda tau: m[:, sig[inv[tau]]]  # u -> u sigma(tau^-1)
    return None


def verify_left2right(
    inst: SpectralInstance,
    action: Optional[GroupAction] = None,
    rho_map: Optional[Mapping[int, Sequence[int]]] = None,
) -> Left2RightResult:
    """Check a[u, v] == a[rho_tau(u), tau(v)] for every tau and every u, v.

    Companions come from ``rho_map`` when given, else from the family's
    canonical choice. Returns the first failing (tau, u, v) on failure.
    """
    action = inst.action if action is None else action
    a = inst.a
    canonical = canonical_companion(inst) if rho_map is None else None
    if rho_map is None and canonical is None:
        return Left2RightResult(False)
    companions = np.empty_like(action.perm)
    for tau in range(action.group.order):
        r = np.asarray(rho_map[tau] if rho_map is not None else canonical(tau), dtype=np.int64)
        t = action.perm[tau]
        bad = np.argwhere(a[np.ix_(r, t)] != a)
        if bad.size:
            u, v = map(int, bad[0])
            return Left2RightResult(False, witness=(tau, u, v))
        companions[tau] = r
    return Left2RightResult(True, companions)


def with_verdict(corr: CorrelationProfile, verdict: DichotomyVerdict, H=None) -> CorrelationProfile:
    return replace(corr, delta=verdict.delta, witness=verdict.witness, dichotomy_holds=verdict.dichotomy_holds, H=H)
