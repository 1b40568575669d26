"""Linear algebra over the prime field F_p.

Matrices are plain ``numpy`` int64 arrays holding residues mod p; row
reduction goes through ``galois`` GF(p) arrays. Subspaces are always kept as
reduced row echelon bases so that equal subspaces compare equal.
"""
from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Sequence

import galois
import numpy as np

Basis = tuple[tuple[int, ...], ...]


@lru_cache(maxsize=None)
def prime_field(p: int) -> type[galois.FieldArray]:
    return galois.GF(p)


def as_matrix(p: int, rows: Iterable[Sequence[int]], ncols: int) -> np.ndarray:
    rows = [list(r) for r in rows]
    if not rows:
        return np.zeros((0, ncols), dtype=np.int64)
    return np.array(rows, dtype=np.int64).reshape(len(rows), ncols) % p


def rref(p: int, mat: np.ndarray) -> np.ndarray:
    """Reduced row echelon form with the zero rows dropped."""
    mat = np.asarray(mat, dtype=np.int64)
    if mat.shape[0] == 0 or mat.shape[1] == 0:
        return np.zeros((0, mat.shape[1]), dtype=np.int64)
    GF = prime_field(p)
    reduced = GF(mat % p).row_reduce().view(np.ndarray).astype(np.int64)
    return reduced[np.any(reduced != 0, axis=1)]


def canonical(p: int, mat: np.ndarray) -> Basis:
    return tuple(tuple(int(c) for c in row) for row in rref(p, mat))


def rank(p: int, mat: np.ndarray) -> int:
    return int(rref(p, mat).shape[0])


def pivots(basis: np.ndarray) -> list[int]:
    return [int(np.flatnonzero(row)[0]) for row in np.asarray(basis)]


def null_space(p: int, mat: np.ndarray, ncols: int) -> np.ndarray:
    """Basis (as rows, in RREF) of {x : mat @ x = 0}."""
    reduced = rref(p, np.asarray(mat, dtype=np.int64).reshape(-1, ncols))
    piv = pivots(reduced)
    free = [j for j in range(ncols) if j not in piv]
    vectors = []
    for j in free:
        x = np.zeros(ncols, dtype=np.int64)
        x[j] = 1
        for i, c in enumerate(piv):
            x[c] = (-reduced[i, j]) % p
        vectors.append(x)
    return rref(p, as_matrix(p, vectors, ncols))


def coordinates(p: int, basis: np.ndarray, v: Sequence[int]) -> Optional[np.ndarray]:
    """Coordinates of v in an RREF basis, or None when v is outside the span."""
    basis = np.asarray(basis, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64) % p
    if basis.shape[0] == 0:
        return np.zeros(0, dtype=np.int64) if not v.any() else None
    coords = v[pivots(basis)] % p
    if not np.array_equal((coords @ basis) % p, v):
        return None
    return coords


def solve(p: int, a: np.ndarray, b: Sequence[int]) -> Optional[np.ndarray]:
    """One solution of a @ x = b (free variables set to zero), or None."""
    a = np.asarray(a, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1) % p
    n = a.shape[1]
    reduced = rref(p, np.hstack([a, b]))
    x = np.zeros(n, dtype=np.int64)
    for row, c in zip(reduced, pivots(reduced)):
        if c == n:
            return None
        x[c] = row[n]
    return x


def matrix_power(p: int, mat: np.ndarray, k: int) -> np.ndarray:
    result = np.eye(mat.shape[0], dtype=np.int64)
    base = np.asarray(mat, dtype=np.int64) % p
    while k > 0:
        if k & 1:
            result = (result @ base) % p
        base = (base @ base) % p
        k >>= 1
    return result


def span_closure(p: int, vectors: np.ndarray, operators: Sequence[np.ndarray]) -> np.ndarray:
    """Smallest subspace containing the vectors and stable under every operator."""
    basis = rref(p, vectors)
    while True:
        images = [basis] + [((op @ basis.T) % p).T for op in operators]
        grown = rref(p, np.vstack(images))
        if grown.shape[0] == basis.shape[0]:
            return grown
        basis = grown


def is_stable(p: int, basis: np.ndarray, op: np.ndarray) -> bool:
    if basis.shape[0] == 0:
        return True
    images = ((op @ basis.T) % p).T
    return rank(p, np.vstack([basis, images])) == basis.shape[0]


def is_isotropic(p: int, basis: np.ndarray, gram: np.ndarray) -> bool:
    if basis.shape[0] == 0:
        return True
    return not ((basis @ gram @ basis.T) % p).any()


def line_representatives(p: int, n: int) -> Iterator[np.ndarray]:
    """One nonzero vector per line of F_p^n (leading coordinate 1)."""
    for lead in reversed(range(n)):
        for tail in itertools.product(range(p), repeat=n - lead - 1):
            v = np.zeros(n, dtype=np.int64)
            v[lead] = 1
            v[lead + 1:] = tail
            yield v


def iter_subspaces(p: int, n: int, k: int) -> Iterator[np.ndarray]:
    """All k-dimensional subspaces of F_p^n, each as its RREF basis."""
    for piv in itertools.combinations(range(n), k):
        free = [(i, j) for i, c in enumerate(piv) for j in range(c + 1, n) if j not in piv]
        for values in itertools.product(range(p), repeat=len(free)):
            m = np.zeros((k, n), dtype=np.int64)
            for i, c in enumerate(piv):
                m[i, c] = 1
            for (i, j), value in zip(free, values):
                m[i, j] = value
            yield m


def congruence_diagonal(p: int, sym: np.ndarray) -> list[int]:
    """Diagonal of D with P^T sym P = D, for a symmetric matrix over F_p, p odd."""
    if p == 2:
        raise ValueError("symmetric matrices are not diagonalisable by congruence in characteristic 2")
    a = np.asarray(sym, dtype=np.int64).copy() % p
    n = a.shape[0]
    for i in range(n):
        if a[i, i] == 0:
            swap = next((j for j in range(i + 1, n) if a[j, j]), None)
            if swap is not None:
                a[[i, swap]] = a[[swap, i]]
                a[:, [i, swap]] = a[:, [swap, i]]
            else:
                partner = next((j for j in range(i + 1, n) if a[i, j]), None)
                if partner is None:
                    continue
                # e_i += e_partner turns the diagonal entry into 2·a[i, partner]
                a[i] = (a[i] + a[partner]) % p
                a[:, i] = (a[:, i] + a[:, partner]) % p
        inv = pow(int(a[i, i]), -1, p)
        for j in range(i + 1, n):
            if a[j, i]:
                c = (int(a[j, i]) * inv) % p
                a[j] = (a[j] - c * a[i]) % p
                a[:, j] = (a[:, j] - c * a[:, i]) % p
    return [int(a[i, i]) for i in range(n)]
