"""Named small instances and the reference corpus used by the acceptance suite."""

from __future__ import annotations

from itertools import combinations
from typing import Iterator

import numpy as np

from .errors import NotUndirected
from .graphs import SpectralInstance, build_instance, rho_from_adjacency, vertex_transitive_instance
from .groups import FiniteGroup, cyclic, dihedral, group_from_permutation_generators, quaternion8, symmetric


def triangle() -> SpectralInstance:
    return build_instance("cayley", cyclic(3), [1, 2], label="K3")


def five_cycle() -> SpectralInstance:
    return build_instance("cayley", cyclic(5), [1, 4], label="C5")


def four_cycle() -> SpectralInstance:
    return build_instance("cayley", cyclic(4), [1, 3], label="C4")


def prism() -> SpectralInstance:
    return build_instance("cayley", cyclic(6), [2, 3, 4], label="prism")


def petersen() -> SpectralInstance:
    """Kneser graph K(5,2) with Sym(5) acting on 2-subsets."""
    pairs = list(combinations(range(5), 2))
    index = {p: i for i, p in enumerate(pairs)}

    def induced(p):
        return [index[tuple(sorted((p[a], p[b])))] for a, b in pairs]

    gens = [induced([1, 0, 2, 3, 4]), induced([1, 2, 3, 4, 0])]
    _, action = group_from_permutation_generators(gens)
    a = np.array([[int(not set(x) & set(y)) for y in pairs] for x in pairs], dtype=np.int64)
    return vertex_transitive_instance(10, rho_from_adjacency(a), action, label="petersen")


def symmetric_subsets(G: FiniteGroup, max_size: int, include_identity: bool = True) -> Iterator[list[int]]:
    """Inverse-closed element sets of size 1..max_size, in a fixed order."""
    seen = set()
    classes = []
    for g in range(G.order):
        if g in seen or (g == G.identity and not include_identity):
            continue
        cls = sorted({g, int(G.inv[g])})
        seen.update(cls)
        classes.append(cls)
    for k in range(1, len(classes) + 1):
        for combo in combinations(classes, k):
            S = sorted(x for c in combo for x in c)
            if len(S) <= max_size:
                yield S


def odd_circulants(n_values=range(3, 16, 2), max_size: int = 6) -> Iterator[SpectralInstance]:
    """Cay(Z_n, S) for odd n and every inverse-closed S with |S| <= max_size (loops allowed)."""
    for n in n_values:
        G = cyclic(n)
        for S in symmetric_subsets(G, max_size):
            yield build_instance("cayley", G, S, label=f"cayley(C{n};S={S})")


def acceptance_corpus(valid_only: bool = True) -> list[SpectralInstance]:
    """The odd circulants, dihedral(3..8), Sym(3), Sym(4), Q8, the prism and Petersen.

    Non-abelian groups contribute every inverse-closed connection set of size
    at most 3 without the identity; with ``valid_only`` the bipartite and
    disconnected ones are dropped.
    """
    out = list(odd_circulants())
    groups = [dihedral(n) for n in range(3, 9)] + [symmetric(3), symmetric(4), quaternion8()]
    for G in groups:
        for S in symmetric_subsets(G, 3, include_identity=False):
            try:
                out.append(build_instance("cayley", G, S))
            except NotUndirected:  # unreachable for inverse-closed S, kept as a guard
                continue
    out += [triangle(), five_cycle(), prism(), petersen()]
    if valid_only:
        out = [inst for inst in out if inst.flags.valid]
    return out


__all__ = [
    "acceptance_corpus",
    "five_cycle",
    "four_cycle",
    "odd_circulants",
    "petersen",
    "prism",
    "symmetric_subsets",
    "triangle",
]
