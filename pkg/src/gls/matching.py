"""Bipartite maximum matching and the Konig / Brualdi-Ryser duality.

A 0/1 square matrix of order n has an all-1 diagonal if and only if it has
no all-0 submatrix of size x by y with x + y >= n + 1.  The blocking
certificate is extracted as (uncovered rows) x (uncovered columns) of a
minimum vertex cover, which is itself read off a maximum matching by the
standard alternating-reachability construction, so |cover| = |matching|
holds by construction and is asserted.

All algorithms scan rows and columns in increasing order; outputs are
deterministic for a fixed input.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import AssertionFailure, CellRef, NotRegular, NotSquare


@dataclass(frozen=True)
class BitMatrix:
    """Square 0/1 matrix; each row is a width-n bitmask (bit j = column j)."""

    n: int
    rows: tuple[int, ...]

    @classmethod
    def from_lists(cls, data: Sequence[Sequence[int]]) -> "BitMatrix":
        n = len(data)
        if n < 1 or any(len(row) != n for row in data):
            raise NotSquare("BitMatrix needs an n x n array")
        rows = tuple(
            sum(1 << j for j, v in enumerate(row) if v) for row in data
        )
        return cls(n, rows)

    def bit(self, i: int, j: int) -> int:
        """Entry at 0-based (i, j)."""
        return (self.rows[i] >> j) & 1


@dataclass(frozen=True)
class MatchingResult:
    """Maximum matching plus a minimum vertex cover (Konig witness).

    Cells and indices are 1-based.  cover_rows and cover_cols together touch
    every 1-entry, and |cover_rows| + |cover_cols| equals the matching size.
    """

    matching: tuple[CellRef, ...]
    cover_rows: frozenset[int]
    cover_cols: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.matching)


@dataclass(frozen=True)
class AllOneDiagonal:
    """n cells on 1-entries with pairwise distinct rows and columns."""

    cells: tuple[CellRef, ...]


@dataclass(frozen=True)
class ZeroSubmatrixCertificate:
    """All-0 submatrix with x + y >= n + 1 rows plus columns (1-based)."""

    rows: frozenset[int]
    cols: frozenset[int]

    def verify(self, m: BitMatrix) -> bool:
        if len(self.rows) + len(self.cols) < m.n + 1:
            return False
        return all(
            m.bit(r - 1, c - 1) == 0 for r in self.rows for c in self.cols
        )


def max_matching(m: BitMatrix) -> MatchingResult:
    """Maximum matching on 1-entries via augmenting paths, with cover."""
    n = m.n
    match_col = [-1] * n  # column j -> matched row, or -1

    def augment(i: int, visited: list[bool]) -> bool:
        row = m.rows[i]
        for j in range(n):
            if (row >> j) & 1 and not visited[j]:
                visited[j] = True
                if match_col[j] < 0 or augment(match_col[j], visited):
                    match_col[j] = i
                    return True
        return False

    for i in range(n):
        augment(i, [False] * n)

    match_row = [-1] * n
    for j, i in enumerate(match_col):
        if i >= 0:
            match_row[i] = j

    # Konig: alternate from unmatched rows; cover = (rows - Z) | (cols in Z)
    z_rows = [i for i in range(n) if match_row[i] < 0]
    in_z_rows = [match_row[i] < 0 for i in range(n)]
    in_z_cols = [False] * n
    queue = list(z_rows)
    while queue:
        i = queue.pop()
        row = m.rows[i]
        for j in range(n):
            if (row >> j) & 1 and not in_z_cols[j]:
                in_z_cols[j] = True
                k = match_col[j]
                if k >= 0 and not in_z_rows[k]:
                    in_z_rows[k] = True
                    queue.append(k)

    cover_rows = frozenset(i + 1 for i in range(n) if not in_z_rows[i])
    cover_cols = frozenset(j + 1 for j in range(n) if in_z_cols[j])
    matching = tuple(
        CellRef(match_col[j] + 1, j + 1) for j in range(n) if match_col[j] >= 0
    )
    matching = tuple(sorted(matching))
    if len(cover_rows) + len(cover_cols) != len(matching):
        raise AssertionFailure("Konig equality |cover| = |matching| violated")
    # cover must touch every 1-entry
    for i in range(n):
        row = m.rows[i]
        if (i + 1) in cover_rows:
            continue
        for j in range(n):
            if (row >> j) & 1 and (j + 1) not in cover_cols:
                raise AssertionFailure("vertex cover misses a 1-entry")
    return MatchingResult(matching, cover_rows, cover_cols)


def diagonal_or_blocker(
    m: BitMatrix,
) -> AllOneDiagonal | ZeroSubmatrixCertificate:
    """Either an all-1 diagonal or a blocking all-0 submatrix certificate.

    Exactly one of the two exists (Brualdi-Ryser variant of Konig's
    theorem); the certificate is the complement of a minimum vertex cover,
    so x + y = 2n - |matching| >= n + 1 whenever the matching is deficient.
    """
    res = max_matching(m)
    n = m.n
    if res.size == n:
        return AllOneDiagonal(res.matching)
    rows = frozenset(range(1, n + 1)) - res.cover_rows
    cols = frozenset(range(1, n + 1)) - res.cover_cols
    cert = ZeroSubmatrixCertificate(rows, cols)
    if not cert.verify(m):
        raise AssertionFailure("extracted zero-submatrix certificate is invalid")
    return cert


def regular_bipartite_pm(adj: Sequence[Sequence[int]]) -> list[tuple[int, int]]:
    """Perfect matching in a d-regular bipartite graph (0-based indices).

    adj[i] lists the right-neighbors of left vertex i.  Every vertex on both
    sides must have degree exactly d >= 1 (a corollary of Hall's theorem
    then guarantees a perfect matching, asserted).  Returns sorted
    (left, right) pairs.
    """
    n = len(adj)
    if n == 0:
        return []
    d = len(adj[0])
    right_deg = [0] * n
    for i, nbrs in enumerate(adj):
        if len(nbrs) != len(set(nbrs)):
            raise NotRegular(f"left vertex {i} has repeated neighbors")
        if len(nbrs) != d:
            raise NotRegular(f"left vertex {i} has degree {len(nbrs)}, expected {d}")
        for j in nbrs:
            if not 0 <= j < n:
                raise NotRegular(f"right vertex {j} out of range")
            right_deg[j] += 1
    if any(deg != d for deg in right_deg):
        bad = next(j for j, deg in enumerate(right_deg) if deg != d)
        raise NotRegular(f"right vertex {bad} has degree {right_deg[bad]}, expected {d}")
    if d < 1:
        raise NotRegular("degree must be at least 1")

    bits = BitMatrix(
        n, tuple(sum(1 << j for j in nbrs) for nbrs in adj)
    )
    res = max_matching(bits)
    if res.size != n:
        raise AssertionFailure("regular bipartite graph without perfect matching")
    return sorted((r - 1, c - 1) for r, c in res.matching)
