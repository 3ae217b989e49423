"""Finite groups as dense multiplication tables, with 0-based element indices.

Every group carries ``mul[g, h]`` (the index of ``g*h``), ``inv[g]`` and the
index of the identity. Tables are validated once at construction and are
read-only afterwards.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from math import factorial
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    ClosureExceedsLimit,
    InvalidPermutation,
    NotASubgroup,
    UnsupportedParameter,
)

MAX_GROUP_ORDER = 5000
ASSOCIATIVITY_CHECK_MAX = 512
SIMPLICITY_CHECK_MAX = 200


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.int64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    mul: np.ndarray
    inv: np.ndarray
    identity: int = 0
    labels: Optional[tuple[str, ...]] = None
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "mul", _frozen(self.mul))
        object.__setattr__(self, "inv", _frozen(self.inv))
        self._validate()

    @property
    def order(self) -> int:
        return int(self.mul.shape[0])

    def _validate(self) -> None:
        m, order = self.mul, self.mul.shape[0]
        if m.ndim != 2 or m.shape != (order, order) or order < 1:
            raise ValueError("multiplication table must be a non-empty square array")
        if order > MAX_GROUP_ORDER:
            raise ClosureExceedsLimit(f"group order {order} exceeds {MAX_GROUP_ORDER}")
        ar = np.arange(order)
        if not (np.sort(m, axis=1) == ar).all() or not (np.sort(m, axis=0) == ar[:, None]).all():
            raise ValueError("multiplication table is not a Latin square")
        e = self.identity
        if not (m[e] == ar).all() or not (m[:, e] == ar).all():
            raise ValueError(f"element {e} is not a two-sided identity")
        if self.inv.shape != (order,) or not (m[ar, self.inv] == e).all():
            raise ValueError("inverse table is inconsistent with the multiplication")
        if order <= ASSOCIATIVITY_CHECK_MAX:
            for a in range(order):
                # (a*b)*c == a*(b*c) for all b, c
                if not np.array_equal(m[m[a]], m[a][m]):
                    raise ValueError(f"multiplication is not associative at a={a}")
        if self.labels is not None and len(self.labels) != order:
            raise ValueError("labels must have one entry per element")

    def label(self, g: int) -> str:
        return self.labels[g] if self.labels is not None else str(g)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def power(self, g: int, k: int) -> int:
        x = self.identity
        for _ in range(k):
            x = int(self.mul[x, g])
        return x


@dataclass(frozen=True, eq=False)
class GroupAction:
    """An action of ``group`` on ``0..n-1``; ``perm[g]`` is the image array of g."""

    group: FiniteGroup
    perm: np.ndarray
    verified: bool = field(default=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "perm", _frozen(self.perm))
        G, P = self.group, self.perm
        if P.ndim != 2 or P.shape[0] != G.order:
            raise ValueError("action needs one permutation per group element")
        n = P.shape[1]
        if not (np.sort(P, axis=1) == np.arange(n)).all():
            raise InvalidPermutation("action contains a non-bijective map")
        if not (P[G.identity] == np.arange(n)).all():
            raise ValueError("identity element does not act trivially")
        if not self.verified:
            for g in range(G.order):
                # perm[g*h] == perm[g] o perm[h]
                if not np.array_equal(P[G.mul[g]], P[g][P]):
                    raise ValueError(f"action is not a homomorphism at g={g}")

    @property
    def n(self) -> int:
        return int(self.perm.shape[1])

    @property
    def inverse_perm(self) -> np.ndarray:
        return self.perm[self.group.inv]

    def orbits(self) -> list[frozenset[int]]:
        return _orbits(self.perm, self.n)

    def is_transitive(self) -> bool:
        return len(self.orbits()) == 1

    @property
    def t(self) -> int:
        """Stabilizer size of any point (transitive actions only)."""
        if not self.is_transitive():
            raise ValueError("stabilizer size is only defined for transitive actions")
        return self.group.order // self.n


def _orbits(perms: np.ndarray, n: int) -> list[frozenset[int]]:
    if perms.size == 0:
        return [frozenset([v]) for v in range(n)]
    rows = np.repeat(np.arange(n)[None, :], perms.shape[0], axis=0).ravel()
    cols = perms.ravel()
    graph = coo_matrix((np.ones_like(rows), (rows, cols)), shape=(n, n))
    _, labels = connected_components(graph, directed=True, connection="weak")
    parts: dict[int, list[int]] = {}
    for v, lab in enumerate(labels):
        parts.setdefault(int(lab), []).append(v)
    return sorted((frozenset(p) for p in parts.values()), key=min)


# ---------------------------------------------------------------------------
# construction


def _check_permutation(p: Sequence[int], m: int, what: str) -> np.ndarray:
    arr = np.asarray(p, dtype=np.int64)
    if arr.shape != (m,) or not np.array_equal(np.sort(arr), np.arange(m)):
        raise InvalidPermutation(f"{what} is not a bijection on 0..{m - 1}: {list(p)}")
    return arr


class _PermIndex:
    """Vectorized lookup from permutation rows to element indices."""

    def __init__(self, P: np.ndarray):
        self.P = P
        rng = np.random.default_rng(0x5EED)
        self.w = rng.integers(1, 2**62, size=P.shape[1], dtype=np.int64)
        with np.errstate(over="ignore"):
            keys = P @ self.w
        self.order = np.argsort(keys, kind="stable")
        self.keys = keys[self.order]
        if np.any(np.diff(self.keys) == 0):
            self.w = None  # hash collision: fall back to dictionary lookup
            self.table = {row.tobytes(): i for i, row in enumerate(P)}

    def lookup(self, rows: np.ndarray) -> np.ndarray:
        if self.w is None:
            return np.array([self.table[r.tobytes()] for r in rows], dtype=np.int64)
        with np.errstate(over="ignore"):
            keys = rows @ self.w
        pos = np.searchsorted(self.keys, keys)
        pos = np.minimum(pos, len(self.keys) - 1)
        idx = self.order[pos]
        if not np.array_equal(self.P[idx], rows):
            raise ValueError("rows are not elements of the permutation group")
        return idx


def _table_from_permutations(P: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Multiplication and inverse tables for the composition g*h = g o h."""
    index = _PermIndex(P)
    order = P.shape[0]
    mul = np.empty((order, order), dtype=np.int64)
    for i in range(order):
        mul[i] = index.lookup(P[i][P])
    inv = index.lookup(np.argsort(P, axis=1))
    return mul, inv


def group_from_permutation_generators(
    gens: Sequence[Sequence[int]],
    max_order: int = MAX_GROUP_ORDER,
    degree: Optional[int] = None,
) -> tuple[FiniteGroup, GroupAction]:
    """Close a set of permutations of ``0..m-1`` under composition.

    Element 0 is the identity; the rest are numbered in breadth-first order
    of right multiplication by the generators, so numbering is deterministic.
    The returned action is the natural one and need not be transitive.
    """
    gens = [list(g) for g in gens]
    if degree is None:
        if not gens:
            raise ValueError("degree is required when no generators are given")
        degree = len(gens[0])
    if degree < 1:
        raise ValueError("permutation degree must be at least 1")
    garr = [_check_permutation(g, degree, f"generator {i}") for i, g in enumerate(gens)]
    max_order = min(max_order, MAX_GROUP_ORDER)

    ident = np.arange(degree, dtype=np.int64)
    elements = [ident]
    seen = {ident.tobytes(): 0}
    queue = deque([ident])
    while queue:
        g = queue.popleft()
        for s in garr:
            h = g[s]
            key = h.tobytes()
            if key not in seen:
                if len(elements) >= max_order:
                    raise ClosureExceedsLimit(f"closure exceeds max_order={max_order}")
                seen[key] = len(elements)
                elements.append(h)
                queue.append(h)
    P = np.array(elements, dtype=np.int64)
    mul, inv = _table_from_permutations(P)
    labels = tuple(_cycle_notation(p) for p in P)
    group = FiniteGroup(mul, inv, 0, labels, name=f"<{len(gens)} generators on {degree} points>")
    return group, GroupAction(group, P, verified=True)


def _cycle_notation(p: np.ndarray) -> str:
    seen, cycles = set(), []
    for start in range(len(p)):
        if start in seen or p[start] == start:
            continue
        cyc, x = [], start
        while x not in seen:
            seen.add(x)
            cyc.append(str(int(x)))
            x = int(p[x])
        cycles.append("(" + " ".join(cyc) + ")")
    return "".join(cycles) or "()"


def cyclic(n: int) -> FiniteGroup:
    if n < 1 or n > MAX_GROUP_ORDER:
        raise UnsupportedParameter(f"cyclic(n) needs 1 <= n <= {MAX_GROUP_ORDER}, got {n}")
    ar = np.arange(n)
    mul = np.add.outer(ar, ar) % n
    return FiniteGroup(mul, (-ar) % n, 0, tuple(str(i) for i in ar), name=f"C{n}")


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the n-gon; index k + n*e stands for r^k s^e."""
    if n < 3 or 2 * n > MAX_GROUP_ORDER:
        raise UnsupportedParameter(f"dihedral(n) needs 3 <= n <= {MAX_GROUP_ORDER // 2}, got {n}")
    order = 2 * n
    idx = np.arange(order)
    k, e = idx % n, idx // n
    # (r^a s^e)(r^b s^f) = r^(a + (-1)^e b) s^(e+f)
    sign = np.where(e == 0, 1, -1)
    a = (k[:, None] + sign[:, None] * k[None, :]) % n
    mul = a + n * ((e[:, None] + e[None, :]) % 2)
    inv = np.where(e == 0, (-k) % n, idx)
    labels = tuple(f"r^{int(kk)}" + (" s" if ee else "") for kk, ee in zip(k, e))
    return FiniteGroup(mul, inv, 0, labels, name=f"D{n}")


def symmetric(n: int, max_order: int = MAX_GROUP_ORDER) -> FiniteGroup:
    """Sym(n) with elements in lexicographic order of their image arrays."""
    if n < 1 or n > 8:
        raise UnsupportedParameter(f"symmetric(n) needs 1 <= n <= 8, got {n}")
    if factorial(n) > min(max_order, MAX_GROUP_ORDER):
        raise ClosureExceedsLimit(f"symmetric({n}) has order {factorial(n)} > {min(max_order, MAX_GROUP_ORDER)}")
    P = np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)
    mul, inv = _table_from_permutations(P)
    labels = tuple(_cycle_notation(p) for p in P)
    return FiniteGroup(mul, inv, 0, labels, name=f"S{n}")


def quaternion8() -> FiniteGroup:
    """Q8 with index 2*u + s for (-1)^s times unit u in (1, i, j, k)."""
    # unit products: UNIT[u][v] = (unit, sign)
    unit = [
        [(0, 0), (1, 0), (2, 0), (3, 0)],
        [(1, 0), (0, 1), (3, 0), (2, 1)],
        [(2, 0), (3, 1), (0, 1), (1, 0)],
        [(3, 0), (2, 0), (1, 1), (0, 1)],
    ]
    mul = np.empty((8, 8), dtype=np.int64)
    for x in range(8):
        for y in range(8):
            u, s = unit[x // 2][y // 2]
            mul[x, y] = 2 * u + (s + x % 2 + y % 2) % 2
    inv = np.array([0, 1, 3, 2, 5, 4, 7, 6])
    labels = ("1", "-1", "i", "-i", "j", "-j", "k", "-k")
    return FiniteGroup(mul, inv, 0, labels, name="Q8")


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    """G x H with the pair (a, b) at index a*|H| + b."""
    if G.order * H.order > MAX_GROUP_ORDER:
        raise UnsupportedParameter(f"direct product order {G.order * H.order} exceeds {MAX_GROUP_ORDER}")
    h = H.order
    a = np.arange(G.order * h) // h
    b = np.arange(G.order * h) % h
    mul = G.mul[a[:, None], a[None, :]] * h + H.mul[b[:, None], b[None, :]]
    inv = G.inv[a] * h + H.inv[b]
    labels = tuple(f"({G.label(int(x))},{H.label(int(y))})" for x, y in zip(a, b))
    return FiniteGroup(mul, inv, G.identity * h + H.identity, labels, name=f"{G.name}x{H.name}")


def builtin_group(family: str, *args, **kwargs) -> FiniteGroup:
    builders = {
        "cyclic": cyclic,
        "dihedral": dihedral,
        "symmetric": symmetric,
        "quaternion8": quaternion8,
        "direct_product": direct_product,
    }
    if family not in builders:
        raise UnsupportedParameter(f"unknown group family {family!r}")
    return builders[family](*args, **kwargs)


# ---------------------------------------------------------------------------
# subgroups


def generated_subgroup(G: FiniteGroup, gens: Iterable[int]) -> np.ndarray:
    """Sorted element indices of the subgroup generated by ``gens``."""
    inside = np.zeros(G.order, dtype=bool)
    inside[G.identity] = True
    used: list[int] = []
    for g in np.unique(np.asarray(list(gens), dtype=np.int64)):
        if inside[g]:
            continue
        # a generator outside the current subgroup: regrow the closure
        used.append(int(g))
        current = np.flatnonzero(inside)
        while True:
            grown = np.unique(G.mul[np.ix_(current, used)].ravel())
            fresh = grown[~inside[grown]]
            if fresh.size == 0:
                break
            inside[fresh] = True
            current = np.flatnonzero(inside)
    return np.flatnonzero(inside)


def is_subgroup(G: FiniteGroup, elems: Iterable[int]) -> bool:
    E = np.unique(np.asarray(list(elems), dtype=np.int64))
    if E.size == 0 or G.identity not in E:
        return False
    inside = np.zeros(G.order, dtype=bool)
    inside[E] = True
    return bool(inside[G.mul[np.ix_(E, E)]].all() and inside[G.inv[E]].all())


def index_two_subgroups(G: FiniteGroup) -> list[frozenset[int]]:
    """All subgroups of index two, via the quotient by squares and commutators.

    With N generated by every g^2 and [g, h], G/N is an elementary abelian
    2-group (Z/2)^k, and the index-two subgroups of G are the kernels of the
    2^k - 1 nonzero homomorphisms G/N -> Z/2.
    """
    order = G.order
    if order % 2:
        return []
    m, inv = G.mul, G.inv
    relators = np.zeros(order, dtype=bool)
    relators[m[np.arange(order), np.arange(order)]] = True
    for g in range(order):
        relators[m[m[g], m[inv[g], inv]]] = True  # g h g^-1 h^-1
    N = generated_subgroup(G, np.flatnonzero(relators))
    if N.size == order:
        return []
    coset = m[:, N].min(axis=1)

    span = {int(coset[G.identity]): 0}
    nbits = 0
    for g in range(order):
        c = int(coset[g])
        if c in span:
            continue
        new = {int(coset[m[g, rep]]): mask | (1 << nbits) for rep, mask in span.items()}
        span.update(new)
        nbits += 1
    vec = np.array([span[int(c)] for c in coset], dtype=np.int64)

    out = []
    for phi in range(1, 1 << nbits):
        parity = np.array([bin(int(v) & phi).count("1") % 2 for v in vec])
        H = np.flatnonzero(parity == 0)
        if H.size * 2 != order or not is_subgroup(G, H):
            raise AssertionError("quotient construction produced a non-subgroup")
        out.append(frozenset(int(h) for h in H))
    return sorted(out, key=lambda s: sorted(s))


def subgroup_orbits(H: Iterable[int], action: GroupAction) -> list[frozenset[int]]:
    """Orbit partition of the vertex set under the subgroup ``H``, sorted by minimum."""
    H = sorted(set(int(h) for h in H))
    if not is_subgroup(action.group, H):
        raise NotASubgroup(f"element set {H} is not a subgroup")
    return _orbits(action.perm[H], action.n)


def verify_automorphism(G: FiniteGroup, sigma: Sequence[int]) -> bool:
    s = _check_permutation(sigma, G.order, "automorphism")
    if s[G.identity] != G.identity:
        return False
    return bool(np.array_equal(s[G.mul], G.mul[np.ix_(s, s)]))


def normal_closure(G: FiniteGroup, g: int) -> np.ndarray:
    conjugates = G.mul[G.mul[:, g], G.inv]
    return generated_subgroup(G, conjugates)


def is_simple(G: FiniteGroup, max_order: int = SIMPLICITY_CHECK_MAX) -> Optional[bool]:
    """Brute-force simplicity test; ``None`` when the order is above the cap."""
    if G.order == 1:
        return False
    if G.is_abelian():
        return all(G.order % p for p in range(2, int(G.order**0.5) + 1))
    if G.order % 2 == 0 and index_two_subgroups(G):
        return False
    if G.order > max_order:
        return None
    done = np.zeros(G.order, dtype=bool)
    done[G.identity] = True
    for g in range(G.order):
        if done[g]:
            continue
        done[G.mul[G.mul[:, g], G.inv]] = True
        if normal_closure(G, g).size < G.order:
            return False
    return True


def left_translation_action(G: FiniteGroup) -> GroupAction:
    """The regular action x -> g*x; free and transitive."""
    # homomorphism property is associativity, already checked on G
    return GroupAction(G, G.mul, verified=True)
