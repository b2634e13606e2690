"""Transversal-finding procedures.

Four independent routes to a transversal or a refusal:

* an exact backtracking solver (first / count / all modes) over diagonals,
  fail-first on the row with fewest admissible cells;
* a bounded greedy-plus-backtracking cover of prescribed rows (any r rows
  with 2r <= n+1 can be covered by a partial transversal);
* a constructive solver for squares with at least 0.75 n^2 symbols, which
  walks the inductive argument: cover the all-repetition rows and columns,
  look for an all-singleton diagonal in the residue via the Konig engine,
  and otherwise strip one heavy singleton line and recurse;
* a splitter for squares whose symbol multiplicities are all 1 or n.

Every Found outcome is revalidated with verify_partial_transversal before
it is returned.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable

from .core import (
    AssertionFailure,
    CellRef,
    PartialTransversal,
    PreconditionViolated,
    ResourceLimit,
    Square,
    compute_stats,
    verify_partial_transversal,
)
from .matching import AllOneDiagonal, BitMatrix, diagonal_or_blocker, regular_bipartite_pm

FOUND = "found"
NOT_FOUND = "not_found"
INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class SolveReport:
    """Outcome of one solver run."""

    outcome: str
    method: str
    transversal: PartialTransversal | None = None
    count: int | None = None
    all_transversals: tuple[PartialTransversal, ...] | None = None
    node_count: int = 0
    elapsed_s: float = 0.0

    def to_dict(self, square: Square | None = None) -> dict:
        cells = None
        if self.transversal is not None:
            cells = [
                [r, c] + ([square[(r, c)]] if square is not None else [])
                for r, c in self.transversal.cells
            ]
        out = {
            "outcome": self.outcome,
            "method": self.method,
            "cells": cells,
            "node_count": self.node_count,
            "elapsed_ms": round(self.elapsed_s * 1000.0, 3),
        }
        if self.count is not None:
            out["count"] = self.count
        return out


def _dense_symbols(square: Square) -> list[list[int]]:
    """Grid with symbols renamed to 0..s-1 (first occurrence order)."""
    relab: dict[int, int] = {}
    out = []
    for row in square.grid:
        new = []
        for s in row:
            if s not in relab:
                relab[s] = len(relab)
            new.append(relab[s])
        out.append(new)
    return out


def _checked(square: Square, cells: Iterable[tuple[int, int]]) -> PartialTransversal:
    refs = [CellRef(r, c) for r, c in cells]
    ok, why = verify_partial_transversal(square, refs)
    if not ok:
        raise AssertionFailure(f"solver produced an invalid transversal: {why}")
    return PartialTransversal(tuple(sorted(refs)))


def find_transversal_exact(
    square: Square,
    mode: str = "first",
    node_budget: int | None = None,
) -> SolveReport:
    """Exact search over diagonals for rainbow ones.

    mode='first' returns one transversal (deterministic: fail-first row
    order, columns ascending); 'count' returns the exact number of
    transversals; 'all' additionally collects them.
    """
    if mode not in ("first", "count", "all"):
        raise PreconditionViolated(f"unknown mode {mode!r}")
    t0 = time.perf_counter()
    n = square.n
    g = _dense_symbols(square)
    nodes = 0
    count = 0
    first_cells: list[tuple[int, int]] | None = None
    collected: list[tuple[tuple[int, int], ...]] = []
    chosen: list[tuple[int, int]] = []
    rows_free = list(range(n))

    def search(used_cols: int, used_syms: int) -> bool:
        nonlocal nodes, count, first_cells
        if node_budget is not None and nodes > node_budget:
            raise ResourceLimit(f"node budget {node_budget} exceeded")
        if not rows_free:
            count += 1
            if first_cells is None:
                first_cells = list(chosen)
            if mode == "all":
                collected.append(tuple(chosen))
            return mode == "first"
        # fail-first: row with fewest admissible cells, lowest index on ties
        best_i = -1
        best_cells: list[int] = []
        for idx, i in enumerate(rows_free):
            row = g[i]
            cells = [
                c
                for c in range(n)
                if not (used_cols >> c) & 1 and not (used_syms >> row[c]) & 1
            ]
            if best_i < 0 or len(cells) < len(best_cells):
                best_i, best_cells = idx, cells
                if not cells:
                    return False
        i = rows_free.pop(best_i)
        row = g[i]
        done = False
        for c in best_cells:
            nodes += 1
            chosen.append((i + 1, c + 1))
            if search(used_cols | (1 << c), used_syms | (1 << row[c])):
                done = True
            chosen.pop()
            if done:
                break
        rows_free.insert(best_i, i)
        return done

    search(0, 0)
    elapsed = time.perf_counter() - t0
    if first_cells is None:
        return SolveReport(NOT_FOUND, "exact", count=0 if mode != "first" else None,
                           node_count=nodes, elapsed_s=elapsed)
    return SolveReport(
        FOUND,
        "exact",
        transversal=_checked(square, first_cells),
        count=count if mode != "first" else None,
        all_transversals=tuple(_checked(square, t) for t in collected)
        if mode == "all"
        else None,
        node_count=nodes,
        elapsed_s=elapsed,
    )


def greedy_partial_transversal(
    square: Square, rows: Iterable[int]
) -> PartialTransversal:
    """Partial transversal with one cell in each requested row (1-based).

    Requires 2r <= n+1; existence is then guaranteed, so a failure of the
    backtracking fallback raises AssertionFailure.  A plain greedy pass is
    tried first.
    """
    n = square.n
    req = sorted(set(rows))
    r = len(req)
    if any(not 1 <= i <= n for i in req):
        raise PreconditionViolated(f"row indices out of range in {req}")
    if 2 * r > n + 1:
        raise PreconditionViolated(
            f"{r} rows exceed the (n+1)/2 = {(n + 1) / 2:g} guarantee for n={n}"
        )
    if r == 0:
        return PartialTransversal(())
    g = _dense_symbols(square)

    # greedy: lowest admissible column per row
    used_cols = 0
    used_syms = 0
    cells: list[tuple[int, int]] = []
    for i in req:
        row = g[i - 1]
        for c in range(n):
            if not (used_cols >> c) & 1 and not (used_syms >> row[c]) & 1:
                used_cols |= 1 << c
                used_syms |= 1 << row[c]
                cells.append((i, c + 1))
                break
    if len(cells) == r:
        return _checked(square, cells)

    # backtracking fallback over the requested rows only
    found = _cover_rows_exact(g, n, [i - 1 for i in req], 0, 0)
    if found is None:
        raise AssertionFailure(
            f"guaranteed partial transversal over rows {req} not found"
        )
    return _checked(square, [(i + 1, c + 1) for i, c in found])


def _cover_rows_exact(
    g: list[list[int]],
    n: int,
    rows0: list[int],
    used_cols: int,
    used_syms: int,
) -> list[tuple[int, int]] | None:
    """One cell per row in rows0 (0-based), avoiding used columns/symbols."""
    if not rows0:
        return []
    # fail-first on fewest admissible cells
    best_k = -1
    best_cells: list[int] = []
    for k, i in enumerate(rows0):
        row = g[i]
        cells = [
            c
            for c in range(n)
            if not (used_cols >> c) & 1 and not (used_syms >> row[c]) & 1
        ]
        if best_k < 0 or len(cells) < len(best_cells):
            best_k, best_cells = k, cells
            if not cells:
                return None
    i = rows0[best_k]
    rest = rows0[:best_k] + rows0[best_k + 1 :]
    row = g[i]
    for c in best_cells:
        sub = _cover_rows_exact(
            g, n, rest, used_cols | (1 << c), used_syms | (1 << row[c])
        )
        if sub is not None:
            return [(i, c)] + sub
    return None


@dataclass(frozen=True)
class CoverPlan:
    """Which lines consist purely of repetition symbols, and the case split.

    full_rows / full_cols are 1-based indices in the square's own
    orientation.  After normalization (transpose when there are more full
    columns than full rows) p >= q holds; case (a) is 2q <= p, case (b)
    otherwise.
    """

    full_rows: frozenset[int]
    full_cols: frozenset[int]
    case_tag: str
    transposed: bool

    @property
    def p(self) -> int:
        return max(len(self.full_rows), len(self.full_cols))

    @property
    def q(self) -> int:
        return min(len(self.full_rows), len(self.full_cols))


def build_cover_plan(square: Square) -> CoverPlan:
    """Locate full (all-repetition) rows and columns of the square."""
    n = square.n
    occ = compute_stats(square).occ
    full_rows = frozenset(
        i + 1
        for i in range(n)
        if all(occ[s] >= 2 for s in square.grid[i])
    )
    full_cols = frozenset(
        j + 1
        for j in range(n)
        if all(occ[square.grid[i][j]] >= 2 for i in range(n))
    )
    transposed = len(full_cols) > len(full_rows)
    p = max(len(full_rows), len(full_cols))
    q = min(len(full_rows), len(full_cols))
    case_tag = "a" if 2 * q <= p else "b"
    return CoverPlan(full_rows, full_cols, case_tag, transposed)


def cover_full_lines(square: Square, plan: CoverPlan) -> PartialTransversal:
    """Partial transversal touching every full row and every full column.

    Searches for the smallest such cover: size p in case (a), at most
    ceil(p/2)+q in case (b).  (The floor(p/2)+q size is tried first; for odd
    p the construction may genuinely need one more cell.)  Exceeding the
    bound raises AssertionFailure.
    """
    n = square.n
    p, q = plan.p, plan.q
    if 2 * p > n + 1:
        raise PreconditionViolated(
            f"p={p} full lines exceed the (n+1)/2 bound for n={n}"
        )
    if p == 0:
        return PartialTransversal(())
    if plan.transposed:
        rows0 = sorted(j - 1 for j in plan.full_cols)
        cols0 = sorted(i - 1 for i in plan.full_rows)
        work = square.transpose()
    else:
        rows0 = sorted(i - 1 for i in plan.full_rows)
        cols0 = sorted(j - 1 for j in plan.full_cols)
        work = square
    cap = p if plan.case_tag == "a" else (p + 1) // 2 + q
    best: list[tuple[int, int]] | None = None
    for size in range(max(p, q), cap + 1):
        best = _cover_lines_exact(work, rows0, cols0, size)
        if best is not None:
            break
    if best is None:
        raise AssertionFailure(
            f"no cover of {p} full rows and {q} full columns within size {cap}"
        )
    if plan.transposed:
        best = [(c, r) for r, c in best]
    return _checked(square, [(r + 1, c + 1) for r, c in best])


def _cover_lines_exact(
    square: Square, rows0: list[int], cols0: list[int], size: int
) -> list[tuple[int, int]] | None:
    """Exact search: one cell per the given rows, plus cells in other rows
    for the given columns not yet covered, total exactly `size` cells."""
    n = square.n
    g = _dense_symbols(square)
    colset = set(cols0)
    cells: list[tuple[int, int]] = []

    def place_rows(k: int, used_cols: int, used_syms: int, covered_cols: int) -> bool:
        if k == len(rows0):
            missing = [c for c in cols0 if not (covered_cols >> c) & 1]
            if len(rows0) + len(missing) != size:
                return False
            return place_cols(missing, 0, used_cols, used_syms)
        # pruning: even covering a full column with every remaining row cell
        # cannot reach the target size
        remaining_rows = len(rows0) - k
        missing_now = sum(1 for c in cols0 if not (covered_cols >> c) & 1)
        if len(rows0) + max(0, missing_now - remaining_rows) > size:
            return False
        i = rows0[k]
        row = g[i]
        for c in range(n):
            if (used_cols >> c) & 1 or (used_syms >> row[c]) & 1:
                continue
            cells.append((i, c))
            cov = covered_cols | (1 << c) if c in colset else covered_cols
            if place_rows(k + 1, used_cols | (1 << c), used_syms | (1 << row[c]), cov):
                return True
            cells.pop()
        return False

    def place_cols(missing: list[int], k: int, used_cols: int, used_syms: int) -> bool:
        if k == len(missing):
            return True
        c = missing[k]
        for i in range(n):
            if i in rowset:
                continue
            if any(i == r for r, _ in cells):
                continue
            s = g[i][c]
            if (used_syms >> s) & 1:
                continue
            cells.append((i, c))
            if place_cols(missing, k + 1, used_cols | (1 << c), used_syms | (1 << s)):
                return True
            cells.pop()
        return False

    rowset = set(rows0)
    if place_rows(0, 0, 0, 0):
        return list(cells)
    return None


def find_transversal_constructive(square: Square) -> SolveReport:
    """Transversal for squares with at least 0.75 n^2 symbols.

    Follows the inductive proof: cover the full lines, delete their rows
    and columns, look for an all-singleton diagonal of the residue
    (singletons counted in the current square, not the residue), and on a
    blocking certificate remove the line of a singleton with more than n/2
    repetitions and recurse.  Any failure of a guaranteed step raises
    AssertionFailure.
    """
    t0 = time.perf_counter()
    n = square.n
    if 4 * square.symbol_count < 3 * n * n:
        raise PreconditionViolated(
            f"symbol_count {square.symbol_count} < 0.75*n^2 = {0.75 * n * n:g}"
        )
    levels = [0]
    cells = _constructive_level(square, levels, depth=0)
    report = SolveReport(
        FOUND,
        "constructive",
        transversal=_checked(square, cells),
        node_count=levels[0],
        elapsed_s=time.perf_counter() - t0,
    )
    return report


def _constructive_level(
    square: Square, levels: list[int], depth: int
) -> list[tuple[int, int]]:
    """One induction level; returns 1-based cells of a transversal."""
    n = square.n
    levels[0] += 1
    if depth > 0:
        if 4 * square.symbol_count <= 3 * n * n:
            raise AssertionFailure(
                f"induction invariant lost: {square.symbol_count} symbols at order {n}"
            )
    if n <= 2:
        rep = find_transversal_exact(square, mode="first")
        if rep.outcome != FOUND:
            raise AssertionFailure(f"guaranteed base case n={n} has no transversal")
        return [tuple(c) for c in rep.transversal.cells]

    plan = build_cover_plan(square)
    if plan.transposed:
        flipped = _constructive_level(square.transpose(), levels, depth)
        return [(c, r) for r, c in flipped]

    stats = compute_stats(square)
    p = len(plan.full_rows)
    if 2 * p > n:
        raise AssertionFailure(f"p={p} full rows contradict symbol count at n={n}")

    cover = cover_full_lines(square, plan)
    used_rows = {r - 1 for r, _ in cover.cells}
    used_cols = {c - 1 for _, c in cover.cells}
    keep_rows = [i for i in range(n) if i not in used_rows]
    keep_cols = [j for j in range(n) if j not in used_cols]

    # residue cells whose symbol is a singleton of the *current* square
    bits = []
    for i in keep_rows:
        mask = 0
        for jj, j in enumerate(keep_cols):
            if stats.occ[square.grid[i][j]] == 1:
                mask |= 1 << jj
        bits.append(mask)
    residue = BitMatrix(len(keep_rows), tuple(bits))
    outcome = diagonal_or_blocker(residue)
    if isinstance(outcome, AllOneDiagonal):
        cells = [tuple(c) for c in cover.cells]
        cells += [
            (keep_rows[r - 1] + 1, keep_cols[c - 1] + 1) for r, c in outcome.cells
        ]
        return cells

    # blocking certificate: the proof promises a singleton whose line holds
    # more than n/2 repetitions; pick the heaviest such line
    for i in keep_rows:
        if all(stats.occ[square.grid[i][j]] >= 2 for j in keep_cols):
            raise AssertionFailure(
                f"residue keeps a full row (row {i + 1}) after covering full lines"
            )
    for j in keep_cols:
        if all(stats.occ[square.grid[i][j]] >= 2 for i in keep_rows):
            raise AssertionFailure(
                f"residue keeps a full column (col {j + 1}) after covering full lines"
            )

    row_reps = [
        sum(1 for j in range(n) if stats.occ[square.grid[i][j]] >= 2)
        for i in range(n)
    ]
    col_reps = [
        sum(1 for i in range(n) if stats.occ[square.grid[i][j]] >= 2)
        for j in range(n)
    ]
    best_cell: tuple[int, int] | None = None
    best_load = -1
    for i in range(n):
        for j in range(n):
            if stats.occ[square.grid[i][j]] != 1:
                continue
            load = max(row_reps[i], col_reps[j])
            if 2 * load > n and load > best_load:
                best_load = load
                best_cell = (i, j)
    if best_cell is None:
        raise AssertionFailure(
            f"no singleton with more than n/2 repetitions in its line at n={n}"
        )
    si, sj = best_cell
    keep_r = [i for i in range(n) if i != si]
    keep_c = [j for j in range(n) if j != sj]
    sub = square.subsquare(keep_r, keep_c)
    if 4 * sub.symbol_count <= 3 * (n - 1) * (n - 1):
        raise AssertionFailure(
            f"symbol count fell to {sub.symbol_count} after deleting line of "
            f"singleton at ({si + 1},{sj + 1})"
        )
    inner = _constructive_level(sub, levels, depth + 1)
    cells = [(keep_r[r - 1] + 1, keep_c[c - 1] + 1) for r, c in inner]
    cells.append((si + 1, sj + 1))
    return cells


def rainbow_pm_multiplicity_split(square: Square) -> PartialTransversal:
    """Transversal when every symbol has multiplicity 1 or n (both present).

    Multiplicity-n symbols each form a permutation; dropping them leaves an
    (n-r)-regular bipartite graph of singleton cells whose perfect matching
    is automatically rainbow.
    """
    n = square.n
    stats = compute_stats(square)
    mults = set(stats.occ.values())
    if not mults <= {1, n}:
        bad = sorted(m for m in mults if m not in (1, n))
        raise PreconditionViolated(
            f"symbol multiplicities {bad} are strictly between 1 and n"
        )
    if len(mults) != 2:
        raise PreconditionViolated(
            f"need both multiplicities 1 and {n}; only {sorted(mults)} occur"
        )
    for s in stats.repetitions:
        rows_hit = {i for i in range(n) for j in range(n) if square.grid[i][j] == s}
        cols_hit = {j for i in range(n) for j in range(n) if square.grid[i][j] == s}
        if len(rows_hit) != n or len(cols_hit) != n:
            raise AssertionFailure(f"multiplicity-{n} symbol {s} is not a permutation")
    adj = [
        [j for j in range(n) if stats.occ[square.grid[i][j]] == 1]
        for i in range(n)
    ]
    pm = regular_bipartite_pm(adj)
    return _checked(square, [(i + 1, j + 1) for i, j in pm])


@dataclass(frozen=True)
class DecompositionResult:
    """Partition of all cells into n disjoint transversals, or the best
    disjoint packing found when no partition exists."""

    transversals: tuple[PartialTransversal, ...] | None
    max_disjoint: int
    node_count: int

    @property
    def feasible(self) -> bool:
        return self.transversals is not None


def decompose_into_transversals(
    square: Square, node_budget: int | None = None
) -> DecompositionResult:
    """Search for n pairwise disjoint transversals partitioning the grid.

    Exact branch-and-bound over disjoint packings: the lowest unresolved
    cell is either covered by some transversal through it or marked
    never-covered.  A packing of size n is a partition.  Practical for
    n <= 6; an optional node budget raises ResourceLimit beyond that.
    """
    n = square.n
    g = _dense_symbols(square)
    full = (1 << (n * n)) - 1
    nodes = 0
    best_k = 0
    best_partition: list[list[tuple[int, int]]] | None = None

    def transversals_through(avail: int, cell: int):
        """All transversals within avail containing `cell`, as bitmasks."""
        r0, c0 = divmod(cell, n)
        out: list[tuple[int, list[tuple[int, int]]]] = []
        picked = [(r0, c0)]

        def rec(i: int, used_cols: int, used_syms: int, mask: int):
            if i == n:
                out.append((mask, list(picked)))
                return
            if i == r0:
                rec(i + 1, used_cols, used_syms, mask)
                return
            base = i * n
            for c in range(n):
                if (used_cols >> c) & 1:
                    continue
                if not (avail >> (base + c)) & 1:
                    continue
                s = g[i][c]
                if (used_syms >> s) & 1:
                    continue
                picked.append((i, c))
                rec(i + 1, used_cols | (1 << c), used_syms | (1 << s), mask | (1 << (base + c)))
                picked.pop()

        rec(0, 1 << c0, 1 << g[r0][c0], 1 << cell)
        return out

    chosen: list[list[tuple[int, int]]] = []

    def search(avail: int, dead: int, k: int) -> bool:
        nonlocal nodes, best_k, best_partition
        nodes += 1
        if node_budget is not None and nodes > node_budget:
            raise ResourceLimit(f"node budget {node_budget} exceeded")
        if k > best_k:
            best_k = k
            if k == n:
                best_partition = [list(t) for t in chosen]
                return True
        live = avail & ~dead
        if k + bin(live).count("1") // n <= best_k and best_k == n:
            return False
        if live == 0:
            return False
        if k + bin(live).count("1") // n <= best_k:
            return False
        cell = (live & -live).bit_length() - 1
        for mask, cells in transversals_through(avail, cell):
            chosen.append(cells)
            if search(avail & ~mask, dead, k + 1):
                return True
            chosen.pop()
        return search(avail, dead | (1 << cell), k)

    search(full, 0, 0)
    if best_partition is not None:
        ts = tuple(
            _checked(square, [(r + 1, c + 1) for r, c in t]) for t in best_partition
        )
        covered = {cell for t in ts for cell in t.cells}
        if len(covered) != n * n:
            raise AssertionFailure("decomposition does not partition the grid")
        return DecompositionResult(ts, n, nodes)
    return DecompositionResult(None, best_k, nodes)
