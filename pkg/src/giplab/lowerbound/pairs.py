"""Inputs that share Alice's vector but differ in GIP value."""

from __future__ import annotations

import itertools
from typing import Iterator

import numpy as np

from ..arith import check_modulus
from ..instances import PromiseInstance


def vector_index(vec, n: int) -> int:
    """Base-n integer of a vector, first coordinate most significant."""
    idx = 0
    for d in vec:
        idx = idx * n + int(d)
    return idx


def index_vector(idx: int, n: int, m: int) -> tuple[int, ...]:
    out = []
    for _ in range(m):
        idx, d = divmod(idx, n)
        out.append(d)
    return tuple(reversed(out))


def all_vectors(n: int, m: int) -> np.ndarray:
    """Every vector of F_n^m as rows, ordered by :func:`vector_index`."""
    return np.array(list(itertools.product(range(n), repeat=m)), dtype=np.int64).reshape(n**m, m)


def alice_group(n: int, m: int, alice: int) -> tuple[np.ndarray, np.ndarray]:
    """Promise completions of one Alice vector.

    Returns ``(remote, gip)``: ``remote[t, p-2]`` is the vector index of player
    ``p`` in the t-th completion and ``gip[t]`` its function value. Completions
    are indexed by the slope vector ``b`` in :func:`vector_index` order.
    """
    vecs = all_vectors(n, m)
    x = vecs[alice]
    weights = n ** np.arange(m - 1, -1, -1, dtype=np.int64)
    remote = np.empty((vecs.shape[0], n - 1), dtype=np.int64)
    for p in range(2, n + 1):
        remote[:, p - 2] = ((x[None, :] + (p - 1) * vecs) % n) @ weights
    gip = (np.where(vecs == 0, x[None, :], 0).sum(axis=1)) % n
    return remote, gip


def confusable_remote_pairs(n: int, m: int) -> Iterator[tuple[int, tuple[int, ...], tuple[int, ...]]]:
    """Stream ``(alice, remote_x, remote_z)`` for every unordered confusable pair."""
    check_modulus(n)
    for alice in range(n**m):
        remote, gip = alice_group(n, m, alice)
        rows = [tuple(int(v) for v in r) for r in remote]
        for s in range(len(rows)):
            for t in range(s + 1, len(rows)):
                if gip[s] != gip[t]:
                    yield alice, rows[s], rows[t]


def _instance(n: int, m: int, alice: int, remote: tuple[int, ...]) -> PromiseInstance:
    return PromiseInstance([index_vector(v, n, m) for v in (alice, *remote)], n)


def enumerate_confusable_pairs(n: int, m: int) -> Iterator[tuple[PromiseInstance, PromiseInstance]]:
    for alice, rx, rz in confusable_remote_pairs(n, m):
        yield _instance(n, m, alice, rx), _instance(n, m, alice, rz)
