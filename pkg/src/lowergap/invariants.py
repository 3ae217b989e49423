"""Exact Cheeger and bipartiteness constants, the overlap Sigma, and nu.

The exhaustive scans run in integer arithmetic over all 2^n subsets (Cheeger)
or all 3^n sign vectors (bipartiteness), grouped by size so that each minimum
is a single exact fraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from .errors import TooLargeForExact
from .graphs import SpectralInstance
from .groups import index_two_subgroups, subgroup_orbits

EXACT_CHEEGER_MAX_N = 22
EXACT_BIPARTITENESS_MAX_N = 13
_CHUNK = 3**10


def _subset_tables(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """For every bitmask F: (|F|, sum over u, v in F of a[u, v])."""
    n = a.shape[0]
    size = np.zeros(1 << n, dtype=np.int8)
    internal = np.zeros(1 << n, dtype=np.int64)
    for b in range(n):
        lo = 1 << b
        # col[F] = sum_{u in F} a[u, b] for F below bit b
        col = np.zeros(lo, dtype=np.int64)
        for c in range(b):
            col[1 << c: 2 << c] = col[: 1 << c] + a[c, b]
        internal[lo: 2 * lo] = internal[:lo] + 2 * col + a[b, b]
        size[lo: 2 * lo] = size[:lo] + 1
    return size, internal


def edge_cheeger_exact(inst: SpectralInstance, max_n: int = EXACT_CHEEGER_MAX_N) -> Fraction:
    n, d = inst.n, inst.d
    if n > max_n:
        raise TooLargeForExact(f"n={n} exceeds the exact Cheeger cap {max_n}")
    size, internal = _subset_tables(inst.a)
    cut = d * size.astype(np.int64) - internal  # edges leaving F
    best = None
    for k in range(1, n):
        c = int(cut[size == k].min())
        ratio = Fraction(c, d * min(k, n - k))
        best = ratio if best is None else min(best, ratio)
    return best


def vertex_cheeger_exact(inst: SpectralInstance, max_n: int = EXACT_CHEEGER_MAX_N) -> Fraction:
    """min over 0 < |F| <= n/2 of |outer vertex boundary of F| / |F|."""
    n = inst.n
    if n > max_n:
        raise TooLargeForExact(f"n={n} exceeds the exact Cheeger cap {max_n}")
    support = inst.a > 0
    adj = [int(sum(1 << u for u in np.flatnonzero(support[:, v] | support[v]))) for v in range(n)]
    nbhd = np.zeros(1 << n, dtype=np.uint32)
    size = np.zeros(1 << n, dtype=np.int8)
    for b in range(n):
        lo = 1 << b
        nbhd[lo: 2 * lo] = nbhd[:lo] | np.uint32(adj[b])
        size[lo: 2 * lo] = size[:lo] + 1
    masks = np.arange(1 << n, dtype=np.uint32)
    boundary = np.bitwise_count(nbhd & ~masks)
    best = None
    for k in range(1, n // 2 + 1):
        ratio = Fraction(int(boundary[size == k].min()), k)
        best = ratio if best is None else min(best, ratio)
    return best


def _action_preserves(inst: SpectralInstance) -> bool:
    P = inst.action.perm
    return inst.action.is_transitive() and all(np.array_equal(inst.a[np.ix_(p, p)], inst.a) for p in P)


def edge_bipartiteness_exact(
    inst: SpectralInstance, max_n: int = EXACT_BIPARTITENESS_MAX_N, return_minimizer: bool = False
):
    """min over nonzero psi in {-1,0,1}^n of <(dI+T)psi, psi> / (2 d ||psi||^2).

    When the instance's action is transitive and preserves the counts, some
    minimizer can be translated and negated so that psi(0) = 1, and only
    those 3^(n-1) vectors are scanned.
    """
    n, d = inst.n, inst.d
    if n > max_n:
        raise TooLargeForExact(f"n={n} exceeds the exact bipartiteness cap {max_n}")
    A = inst.a.astype(np.float64)
    pinned = _action_preserves(inst)
    free = n - 1 if pinned else n
    powers = 3 ** np.arange(free, dtype=np.int64)
    best_num: dict[int, int] = {}
    best_psi: dict[int, np.ndarray] = {}
    total = 3**free
    for start in range(0 if pinned else 1, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        psi = (idx[:, None] // powers) % 3 - 1
        if pinned:
            psi = np.hstack([np.ones((idx.size, 1), dtype=np.int64), psi])
        quad = np.rint(((psi @ A) * psi).sum(axis=1)).astype(np.int64)
        count = np.count_nonzero(psi, axis=1)
        num = d * count + quad
        for k in np.unique(count):
            if k == 0:
                continue
            sel = np.flatnonzero(count == k)
            j = sel[np.argmin(num[sel])]
            if int(k) not in best_num or num[j] < best_num[int(k)]:
                best_num[int(k)] = int(num[j])
                best_psi[int(k)] = psi[j].copy()
    ratios = {k: Fraction(v, 2 * d * k) for k, v in best_num.items()}
    kmin = min(ratios, key=lambda k: (ratios[k], k))
    if return_minimizer:
        return ratios[kmin], best_psi[kmin]
    return ratios[kmin]


def sigma_overlap(pi, vset: Iterable[int], n: int) -> tuple[Fraction, frozenset[int]]:
    """(Sigma_{pi, V}, V intersect pi(V)) with <pi 1_V, 1_V> = #{v in V : pi^-1(v) in V}."""
    pi = np.asarray(pi, dtype=np.int64)
    inside = np.zeros(n, dtype=bool)
    inside[list(vset)] = True
    pulled = np.empty(n, dtype=bool)
    pulled[pi] = inside  # pulled[v] = inside[pi^-1(v)]
    agree = np.count_nonzero(inside & pulled) + np.count_nonzero(~inside & ~pulled)
    overlap = frozenset(np.flatnonzero(inside & pulled).tolist())
    return Fraction(int(agree), n), overlap


def nu_constant(inst: SpectralInstance) -> Fraction:
    """Largest nu such that every index-two subgroup has a rho_i with Sigma >= nu on all its orbits."""
    subgroups = index_two_subgroups(inst.group)
    if not subgroups:
        return Fraction(1)
    worst = Fraction(1)
    for H in subgroups:
        orbits = subgroup_orbits(H, inst.action)
        best = max(min(sigma_overlap(r, O, inst.n)[0] for O in orbits) for r in inst.rho)
        worst = min(worst, best)
    return worst


@dataclass(frozen=True)
class CombinatorialConstants:
    edge_cheeger: Optional[Fraction]
    vertex_cheeger: Optional[Fraction]
    edge_bipartiteness: Optional[Fraction]
    nu: Fraction

    @property
    def exact(self) -> dict[str, bool]:
        return {
            "edge_cheeger": self.edge_cheeger is not None,
            "vertex_cheeger": self.vertex_cheeger is not None,
            "edge_bipartiteness": self.edge_bipartiteness is not None,
        }


def combinatorial_constants(
    inst: SpectralInstance,
    cheeger_max_n: int = EXACT_CHEEGER_MAX_N,
    bipartiteness_max_n: int = EXACT_BIPARTITENESS_MAX_N,
) -> CombinatorialConstants:
    """Every constant that fits under its cap; the rest are None (never approximated)."""

    def attempt(fn, cap):
        try:
            return fn(inst, cap)
        except TooLargeForExact:
            return None

    return CombinatorialConstants(
        edge_cheeger=attempt(edge_cheeger_exact, cheeger_max_n),
        vertex_cheeger=attempt(vertex_cheeger_exact, cheeger_max_n),
        edge_bipartiteness=attempt(edge_bipartiteness_exact, bipartiteness_max_n),
        nu=nu_constant(inst),
    )
