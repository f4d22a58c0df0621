"""Promise instances: n players, each holding a length-m vector over F_n.

Every column ``[x_j^1, ..., x_j^n]`` must equal ``a*[1,...,1] + b*[0,1,...,n-1]``
for some ``a, b`` in F_n. Player ``p`` (1-indexed) therefore holds
``a_j + (p-1)*b_j`` in coordinate ``j``.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .arith import FieldElem, check_modulus


class PromiseViolation(ValueError):
    """Raised when a column is not in the span of the two promise basis vectors."""

    def __init__(self, column: int, entries):
        self.column = column
        self.entries = list(entries)
        super().__init__(f"column {column} violates the promise: {self.entries}")


@dataclass(frozen=True)
class PromiseColumn:
    a: int
    b: int
    n: int

    def entries(self) -> tuple[int, ...]:
        return column_from_pair(self.a, self.b, self.n)


def column_from_pair(a, b, n: int) -> tuple[int, ...]:
    """Entries of ``a*[1,...,1] + b*[0,...,n-1]``; entry ``p-1`` belongs to player ``p``."""
    a, b = int(a) % n, int(b) % n
    return tuple((a + p * b) % n for p in range(n))


def _certify(players: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    a = players[0] % n
    b = (players[1] - players[0]) % n
    p = np.arange(n, dtype=np.int64)[:, None]
    expected = (a[None, :] + p * b[None, :]) % n
    bad = np.nonzero((expected != players).any(axis=0))[0]
    if bad.size:
        j = int(bad[0])
        raise PromiseViolation(j, players[:, j].tolist())
    return a, b


def validate_promise(vectors, n: int | None = None) -> list[PromiseColumn]:
    """Certify the promise column by column and return the coefficients ``(a_j, b_j)``.

    ``vectors`` holds one sequence per player. When ``n`` is omitted the number of
    players is used, as the promise requires.
    """
    players = np.asarray(vectors, dtype=np.int64)
    if players.ndim != 2:
        raise ValueError("expected n player vectors of equal length")
    if n is None:
        n = players.shape[0]
    check_modulus(n)
    if players.shape[0] != n:
        raise ValueError(f"expected {n} player vectors, got {players.shape[0]}")
    if players.size and (players.min() < 0 or players.max() >= n):
        raise ValueError(f"entries must lie in [0, {n})")
    a, b = _certify(players, n)
    return [PromiseColumn(int(x), int(y), n) for x, y in zip(a, b)]


class PromiseInstance:
    """Immutable, promise-certified input for all n players."""

    __slots__ = ("n", "m", "players", "a", "b")

    def __init__(self, vectors, n: int | None = None):
        players = np.array(vectors, dtype=np.int64)
        if players.ndim == 1 and players.size == 0:
            players = players.reshape(n or 0, 0)
        n = players.shape[0] if n is None else n
        check_modulus(n)
        if players.ndim != 2 or players.shape[0] != n:
            raise ValueError(f"expected {n} player vectors of equal length")
        if players.size and (players.min() < 0 or players.max() >= n):
            raise ValueError(f"entries must lie in [0, {n})")
        a, b = _certify(players, n)
        for arr in (players, a, b):
            arr.setflags(write=False)
        self.n = n
        self.m = players.shape[1]
        self.players = players
        self.a = a
        self.b = b

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]], n: int) -> PromiseInstance:
        pairs = list(pairs)
        a = np.array([p[0] for p in pairs], dtype=np.int64) % n
        b = np.array([p[1] for p in pairs], dtype=np.int64) % n
        p = np.arange(n, dtype=np.int64)[:, None]
        return cls((a[None, :] + p * b[None, :]) % n, n)

    @property
    def columns(self) -> list[PromiseColumn]:
        return [PromiseColumn(int(x), int(y), self.n) for x, y in zip(self.a, self.b)]

    def vector(self, p: int) -> tuple[int, ...]:
        """Player ``p``'s vector (1-indexed; player 1 is Alice)."""
        return tuple(int(v) for v in self.players[p - 1])

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.players[:, j])

    def to_dict(self) -> dict:
        return {"n": self.n, "m": self.m, "players": self.players.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> PromiseInstance:
        try:
            n, players = int(d["n"]), d["players"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"instance object needs integer 'n' and 'players': {exc!r}") from exc
        m = d.get("m", len(players[0]) if players else 0)
        if len(players) != n or any(len(row) != m for row in players):
            raise ValueError(f"'players' must be {n} arrays of {m} integers")
        return cls(players, n) if m else cls(np.zeros((n, 0), dtype=np.int64), n)

    def __eq__(self, other):
        return (
            isinstance(other, PromiseInstance)
            and self.n == other.n
            and np.array_equal(self.players, other.players)
        )

    def __hash__(self):
        return hash((self.n, self.players.tobytes(), self.m))

    def __repr__(self):
        return f"PromiseInstance(n={self.n}, players={self.players.tolist()})"


def column_products(instance: PromiseInstance) -> np.ndarray:
    """Per-column product of all n entries, reduced mod n."""
    prod = np.ones(instance.m, dtype=np.int64)
    for row in instance.players:
        prod = (prod * row) % instance.n
    return prod


def gip_eval(instance: PromiseInstance) -> FieldElem:
    """Sum over columns of the product of the players' entries, over F_n."""
    return FieldElem(int(column_products(instance).sum() % instance.n), instance.n)


def gip_closed_form(instance: PromiseInstance) -> FieldElem:
    """The same value via the column coefficients: sum of a_j over columns with b_j = 0."""
    n = instance.n
    return FieldElem(int(instance.a[instance.b == 0].sum() % n), n)


def enumerate_instances(n: int, m: int) -> Iterator[PromiseInstance]:
    """All (n^2)^m instances, lexicographic in (a_1, b_1, ..., a_m, b_m)."""
    check_modulus(n)
    for flat in itertools.product(range(n), repeat=2 * m):
        yield PromiseInstance.from_pairs(zip(flat[0::2], flat[1::2]), n)


def random_instance(n: int, m: int, seed: int) -> PromiseInstance:
    check_modulus(n)
    rng = np.random.default_rng(seed)
    ab = rng.integers(0, n, size=(2, m), dtype=np.int64)
    p = np.arange(n, dtype=np.int64)[:, None]
    return PromiseInstance((ab[0][None, :] + p * ab[1][None, :]) % n, n)


def partition_counts(instance: PromiseInstance) -> dict[tuple[int, int], int]:
    """Map ``(a, b)`` to the number of columns with those coefficients (all n^2 keys)."""
    n = instance.n
    found = Counter(zip(instance.a.tolist(), instance.b.tolist()))
    return {(a, b): found.get((a, b), 0) for a in range(n) for b in range(n)}


# -- persistence ------------------------------------------------------------


def dump_instances(instances: Iterable[PromiseInstance], path) -> int:
    """Write one instance object per line; returns the number written."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for inst in instances:
            fh.write(json.dumps(inst.to_dict(), separators=(",", ":")))
            fh.write("\n")
            count += 1
    return count


def load_instances(path) -> list[PromiseInstance]:
    """Read a single instance object, a JSON array of them, or one object per line.

    Promise violations surface as :class:`PromiseViolation` carrying the column index.
    """
    text = Path(path).read_text(encoding="utf-8").strip()
    if not text:
        return []
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = [json.loads(line) for line in text.splitlines() if line.strip()]
    if isinstance(data, dict):
        data = [data]
    return [PromiseInstance.from_dict(d) for d in data]
