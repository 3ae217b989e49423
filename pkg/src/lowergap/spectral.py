"""Spectrum of T, the conditioned bottom eigenfunction, and the scalars built from it."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .eigen import eigh
from .errors import ConditioningFailed, DegenerateEigenpair, NotSymmetric
from .graphs import SpectralInstance
from .groups import GroupAction

ZERO_THRESHOLD = 1e-9
RESIDUAL_TOL = 1e-8
CLUSTER_TOL = 1e-8
LAMBDA_GRID = tuple(2.0**-k for k in range(21))

XI_NU_ONE = Fraction(4, 5)
XI_NU_HALF = Fraction(123, 1000)


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray  # eigenvalues of T, descending
    vectors: np.ndarray
    d: int

    @property
    def mu(self) -> float:
        return float(self.eigenvalues[-1] / self.d)

    @property
    def mu2(self) -> float:
        return float(self.eigenvalues[1] / self.d)


@dataclass(frozen=True, eq=False)
class SpectralProfile:
    eigenvalues: np.ndarray
    mu: float
    mu2: float
    d: int
    f: np.ndarray
    supp_plus: frozenset[int]
    supp_minus: frozenset[int]
    residual: float
    multiplicity: int
    conditioned: bool
    translates_used: int = 0

    @property
    def n(self) -> int:
        return int(self.f.size)

    @property
    def kappa(self) -> float:
        return (1.0 + self.mu) / (1.0 - self.mu2)

    @property
    def eigenfunction_hypotheses(self) -> dict[str, bool]:
        """Status of each item of the eigenfunction hypotheses."""
        k = self.kappa
        return {
            "orthogonal_to_constants": abs(self.f.sum()) <= 1e-9 * max(1.0, np.abs(self.f).sum()),
            "nowhere_zero": self.conditioned,
            "plus_support_larger": len(self.supp_plus) >= len(self.supp_minus),
            "kappa_in_open_unit_interval": 0.0 < k < 1.0,
        }

    @property
    def f_plus(self) -> np.ndarray:
        return np.maximum(self.f, 0.0)

    @property
    def f_minus(self) -> np.ndarray:
        return np.maximum(-self.f, 0.0)


def spectrum(inst: SpectralInstance, backend: str = "auto") -> Spectrum:
    if not inst.flags.undirected:
        raise NotSymmetric(f"{inst.label} is directed")
    w, V = eigh(inst.a, backend=backend)
    return Spectrum(w, V, inst.d)


def translate_function(f: np.ndarray, tau: int, action: GroupAction) -> np.ndarray:
    """(tau . f)(v) = f(tau^-1 v)."""
    out = np.empty_like(f)
    out[action.perm[tau]] = f
    return out


def _residual(a: np.ndarray, lam: float, f: np.ndarray) -> float:
    return float(np.abs(a @ f - lam * f).max())


def _zeros(f: np.ndarray) -> np.ndarray:
    return np.abs(f) <= ZERO_THRESHOLD * np.abs(f).max()


def _canonical_seed(V: np.ndarray) -> np.ndarray:
    # projection of the first indicator with a visible component onto the eigenspace;
    # independent of which orthonormal basis the solver returned
    for v in range(V.shape[0]):
        proj = V @ V[v]
        norm = np.linalg.norm(proj)
        if norm > 1e-6:
            return proj / norm
    raise DegenerateEigenpair("eigenspace projection vanished")


def condition_eigenfunction(
    a: np.ndarray, lam: float, d: int, f: np.ndarray, action: GroupAction
) -> tuple[np.ndarray, int]:
    """Remove zeros of an eigenvector by adding scaled translates of itself.

    Each accepted step adds lam * (tau . f) for the first group element tau and
    grid value lam whose sum is still an eigenvector and whose zero set is a
    strict subset of the current one. Returns (f, number of accepted steps).
    """
    f = f / np.linalg.norm(f)
    zero = _zeros(f)
    steps = 0
    while zero.any():
        accepted = None
        for tau in range(action.group.order):
            if tau == action.group.identity:
                continue
            tf = translate_function(f, tau, action)
            if _residual(a, lam, tf) > RESIDUAL_TOL * d:
                continue  # translate left the eigenspace
            for step in LAMBDA_GRID:
                g = f + step * tf
                norm = np.linalg.norm(g)
                if norm < 1e-12:
                    continue
                g = g / norm
                gz = _zeros(g)
                if gz.sum() < zero.sum() and not (gz & ~zero).any():
                    accepted = g
                    break
            if accepted is not None:
                break
        if accepted is None:
            raise ConditioningFailed(f"{int(zero.sum())} zero entries remain after all translates")
        f, zero = accepted, _zeros(accepted)
        steps += 1
    return f, steps


def bottom_eigenfunction(
    inst: SpectralInstance,
    action: Optional[GroupAction] = None,
    seed: Optional[np.ndarray] = None,
    strict: bool = True,
    backend: str = "auto",
) -> SpectralProfile:
    """Unit eigenvector for the smallest eigenvalue, made nowhere zero when possible.

    With ``strict=False`` a failed conditioning is recorded in
    ``profile.conditioned`` instead of raising ConditioningFailed.
    """
    action = inst.action if action is None else action
    spec = spectrum(inst, backend=backend)
    w, d = spec.eigenvalues, inst.d
    lam = float(w[-1])
    in_space = w <= lam + CLUSTER_TOL * max(1, d)
    V = spec.vectors[:, in_space]
    f = _canonical_seed(V) if seed is None else np.asarray(seed, dtype=np.float64)
    f = f / np.linalg.norm(f)
    res = _residual(inst.a, lam, f)
    if res > RESIDUAL_TOL * d:
        raise DegenerateEigenpair(f"seed residual {res:.3e} exceeds tolerance")
    steps = 0
    conditioned = True
    try:
        f, steps = condition_eigenfunction(inst.a, lam, d, f, action)
    except ConditioningFailed:
        if strict:
            raise
        conditioned = False
    res = _residual(inst.a, lam, f)
    if res > RESIDUAL_TOL * d:
        raise DegenerateEigenpair(f"conditioned residual {res:.3e} exceeds tolerance")
    if np.count_nonzero(f > 0) < np.count_nonzero(f < 0):
        f = -f
    f.setflags(write=False)
    return SpectralProfile(
        eigenvalues=w,
        mu=spec.mu,
        mu2=spec.mu2,
        d=d,
        f=f,
        supp_plus=frozenset(np.flatnonzero(f > 0).tolist()),
        supp_minus=frozenset(np.flatnonzero(f < 0).tolist()),
        residual=res,
        multiplicity=int(in_space.sum()),
        conditioned=conditioned,
        translates_used=steps,
    )


@dataclass(frozen=True, eq=False)
class Decomposition:
    f_str: np.ndarray
    f_sml: np.ndarray

    @property
    def norm_str(self) -> float:
        return float(np.linalg.norm(self.f_str))

    @property
    def norm_sml(self) -> float:
        return float(np.linalg.norm(self.f_sml))


def decompose(f) -> Decomposition:
    """Split f into its projection on the normalized sign pattern and the remainder."""
    f = np.asarray(getattr(f, "f", f), dtype=np.float64)
    sign = np.sign(f)
    f_str = (np.abs(f).sum() / f.size) * sign
    return Decomposition(f_str, f - f_str)


# closed forms in kappa (and xi) used throughout the lemma checks


def sigma_const(kappa: float) -> float:
    return math.sqrt(kappa / (1.0 - kappa))


def theta_const(kappa: float) -> float:
    return math.sqrt(1.0 - kappa) / math.sqrt(2.0) - math.sqrt(kappa)


def plus_mass_factor(kappa: float) -> float:
    """1 + sigma + kappa + 2 sqrt(2) sqrt(kappa), the recurring denominator."""
    return 1.0 + sigma_const(kappa) + kappa + 2.0 * math.sqrt(2.0) * math.sqrt(kappa)


def dichotomy_delta(kappa: float, xi: float) -> float:
    s = sigma_const(kappa)
    core = 3.0 * (1.0 - kappa) / plus_mass_factor(kappa) * (1.0 / math.sqrt(2.0) - s) ** 2
    return xi / 2.0 * (core - 1.0)


def default_xi(nu) -> Fraction:
    return XI_NU_ONE if nu == 1 else XI_NU_HALF


def bipartiteness_of_f(a: np.ndarray, f: np.ndarray, d: int) -> float:
    """Fraction of adjacency mass internal to the positive and negative supports of f."""
    pos = (f > 0).astype(np.float64)
    neg = (f < 0).astype(np.float64)
    return float((pos @ a @ pos + neg @ a @ neg) / (d * f.size))


@dataclass(frozen=True)
class DerivedConstants:
    kappa: float
    sigma_c: Optional[float]
    theta_c: Optional[float]
    xi: float
    delta: Optional[float]
    beta_f: float
    flags: dict

    def as_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "sigma": self.sigma_c,
            "theta": self.theta_c,
            "xi": self.xi,
            "delta": self.delta,
            "beta_f": self.beta_f,
            "flags": dict(self.flags),
        }


def derived_constants(profile: SpectralProfile, inst: SpectralInstance, xi=None, nu=None) -> DerivedConstants:
    """kappa, sigma, theta, delta(xi, kappa) and beta_f; out-of-range kappa only sets flags.

    xi defaults to 4/5 when nu == 1 and 123/1000 otherwise.
    """
    if profile.mu2 == 1.0:
        raise ValueError("mu2 == 1: the graph is disconnected")
    if xi is None:
        if nu is None:
            from .invariants import nu_constant

            nu = nu_constant(inst)
        xi = default_xi(nu)
    xi = float(xi)
    kappa = profile.kappa
    inside = 0.0 < kappa < 1.0
    sig = sigma_const(kappa) if inside else None
    theta = theta_const(kappa) if inside else None
    delta = dichotomy_delta(kappa, xi) if inside else None
    flags = {
        "kappa_in_open_unit_interval": inside,
        "kappa_le_1/5": inside and kappa <= 0.2,
        "kappa_le_1/3": inside and kappa <= 1.0 / 3.0,
        "kappa_le_1/260": inside and kappa <= 1.0 / 260.0,
    }
    return DerivedConstants(kappa, sig, theta, xi, delta, bipartiteness_of_f(inst.a, profile.f, inst.d), flags)
