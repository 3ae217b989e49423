"""Dense symmetric eigensolver: Householder tridiagonalization + implicit QL.

Deterministic for a given input. Above ``QL_MAX_N`` the Python-level
rotation loop becomes the bottleneck and LAPACK's ``eigh`` is used instead.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NotSymmetric

QL_MAX_N = 400
MAX_QL_SWEEPS = 60


def tridiagonalize(a: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (diag, offdiag, Q) with a = Q @ tridiag(diag, offdiag) @ Q.T."""
    A = np.array(a, dtype=np.float64, copy=True)
    n = A.shape[0]
    Q = np.eye(n)
    for k in range(n - 2):
        x = A[k + 1:, k]
        tail = np.linalg.norm(x[1:])
        if tail == 0.0:
            continue
        norm_x = math.hypot(x[0], tail)
        alpha = -norm_x if x[0] >= 0 else norm_x
        v = x.copy()
        v[0] -= alpha
        v /= np.linalg.norm(v)
        B = A[k + 1:, k + 1:]
        p = B @ v
        w = p - (v @ p) * v
        A[k + 1:, k + 1:] = B - 2.0 * (np.outer(v, w) + np.outer(w, v))
        A[k + 1:, k] = 0.0
        A[k, k + 1:] = 0.0
        A[k + 1, k] = A[k, k + 1] = alpha
        Q[:, k + 1:] -= 2.0 * np.outer(Q[:, k + 1:] @ v, v)
    return np.diag(A).copy(), np.diag(A, -1).copy(), Q


def tridiagonal_ql(d: np.ndarray, e: np.ndarray, Z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Implicit QL with Wilkinson-type shifts; rotations accumulate into Z's columns."""
    d = np.array(d, dtype=np.float64, copy=True)
    e = np.append(np.asarray(e, dtype=np.float64), 0.0)
    Z = np.array(Z, dtype=np.float64, copy=True)
    n = d.size
    eps = np.finfo(np.float64).eps
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > MAX_QL_SWEEPS:
                raise RuntimeError("QL iteration did not converge")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi, zj = Z[:, i].copy(), Z[:, i + 1].copy()
                Z[:, i + 1] = s * zi + c * zj
                Z[:, i] = c * zi - s * zj
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d, Z


def eigh(a: np.ndarray, backend: str = "auto") -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and orthonormal eigenvectors (columns) of symmetric ``a``."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetric("matrix must be square")
    if not np.array_equal(a, a.T):
        raise NotSymmetric("matrix is not symmetric")
    n = a.shape[0]
    if backend == "auto":
        backend = "ql" if n <= QL_MAX_N else "lapack"
    if backend == "lapack":
        w, V = np.linalg.eigh(a)
    elif backend == "ql":
        d, e, Q = tridiagonalize(a)
        w, V = tridiagonal_ql(d, e, Q)
    else:
        raise ValueError(f"unknown eigensolver backend {backend!r}")
    order = np.argsort(-w, kind="stable")
    return w[order], V[:, order]
