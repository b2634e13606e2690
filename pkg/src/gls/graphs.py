"""Properly edge-colored complete graphs and rainbow-factor searches.

Hosts the anti-Ramsey side of the problem: generators for proper edge
colorings of K_m (circle-method 1-factorization plus fresh recoloring, and
an exhaustive enumerator up to color relabeling), exhaustive searches for
rainbow 1-factors and near-spanning rainbow 2-factors, and the reduction
that turns a properly colored K_n into a generalized Latin square whose
rainbow transversals pull back to multicolored degree-2 edge sets.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Iterator

from .core import (
    AssertionFailure,
    CellRef,
    DegenerateExtraction,
    InfeasibleParams,
    NotProper,
    OddVertices,
    ParseError,
    PartialTransversal,
    Square,
    validate_square,
)


@dataclass(frozen=True)
class EdgeColoredGraph:
    """Complete graph K_m with a proper edge coloring.

    `matrix` is the full symmetric m x m color matrix with -1 on the
    diagonal; vertices are 1-based in the public API and the file format.
    """

    m: int
    matrix: tuple[tuple[int, ...], ...]
    color_count: int

    def color_of(self, u: int, v: int) -> int:
        if u == v or not (1 <= u <= self.m and 1 <= v <= self.m):
            raise InfeasibleParams(f"no edge ({u},{v}) in K_{self.m}")
        return self.matrix[u - 1][v - 1]

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """(u, v, color) for u < v, 1-based."""
        for u in range(self.m):
            for v in range(u + 1, self.m):
                yield u + 1, v + 1, self.matrix[u][v]

    @property
    def colors(self) -> frozenset[int]:
        return frozenset(c for _, _, c in self.edges())

    @classmethod
    def from_edges(
        cls, m: int, edges: Iterable[tuple[int, int, int]]
    ) -> "EdgeColoredGraph":
        """Build from (u, v, color) triples (1-based); checks properness."""
        if m < 2:
            raise InfeasibleParams("need at least 2 vertices")
        mat = [[-1] * m for _ in range(m)]
        seen = 0
        for u, v, c in edges:
            if not (1 <= u <= m and 1 <= v <= m) or u == v:
                raise InfeasibleParams(f"bad edge ({u},{v}) for K_{m}")
            if c < 0:
                raise InfeasibleParams(f"negative color {c} on edge ({u},{v})")
            if mat[u - 1][v - 1] != -1:
                raise InfeasibleParams(f"duplicate edge ({u},{v})")
            mat[u - 1][v - 1] = mat[v - 1][u - 1] = c
            seen += 1
        if seen != m * (m - 1) // 2:
            raise InfeasibleParams(
                f"K_{m} needs {m * (m - 1) // 2} edges, got {seen}"
            )
        g = cls(m, tuple(tuple(row) for row in mat), len({c for _, _, c in edges}))
        _check_proper(g)
        return g


def _check_proper(g: EdgeColoredGraph) -> None:
    for u in range(g.m):
        seen: dict[int, int] = {}
        for v in range(g.m):
            if v == u:
                continue
            c = g.matrix[u][v]
            if c in seen:
                raise NotProper(
                    f"vertex {u + 1}: edges to {seen[c] + 1} and {v + 1} share color {c}"
                )
            seen[c] = v


# --- edge-colored graph text format (.ecg) --------------------------------
#
# '#' comment lines; first line m; then one "u v c" line per edge of K_m
# (all m(m-1)/2 required), 1-based vertices, non-negative integer colors.


def parse_graph(text: str) -> EdgeColoredGraph:
    body: list[tuple[int, str]] = []
    for no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        body.append((no, stripped))
    if not body:
        raise ParseError("no data lines")
    no, head = body[0]
    try:
        m = int(head)
    except ValueError:
        raise ParseError(f"expected vertex count, got {head!r}", line=no) from None
    edges = []
    for no, line in body[1:]:
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"expected 'u v c', got {line!r}", line=no)
        try:
            u, v, c = (int(p) for p in parts)
        except ValueError:
            raise ParseError(f"bad integer in {line!r}", line=no) from None
        edges.append((u, v, c))
    try:
        return EdgeColoredGraph.from_edges(m, edges)
    except (InfeasibleParams, NotProper) as exc:
        raise ParseError(str(exc)) from exc


def format_graph(g: EdgeColoredGraph) -> str:
    lines = [str(g.m)]
    for u, v, c in g.edges():
        lines.append(f"{u} {v} {c}")
    return "\n".join(lines) + "\n"


def circle_one_factorization(m: int) -> EdgeColoredGraph:
    """Round-robin 1-factorization of K_m (m even): m-1 colors, one per
    round; vertex m sits fixed while the others rotate."""
    if m < 2 or m % 2:
        raise InfeasibleParams(f"circle method needs even m >= 2, got {m}")
    edges = []
    for r in range(m - 1):
        edges.append((m, r + 1, r))
        for k in range(1, m // 2):
            a = (r + k) % (m - 1)
            b = (r - k) % (m - 1)
            edges.append((a + 1, b + 1, r))
    return EdgeColoredGraph.from_edges(m, edges)


def proper_coloring(m: int, colors: int, seed: int) -> EdgeColoredGraph:
    """Seeded proper edge coloring of K_m with exactly `colors` colors.

    Starts from the minimum coloring (circle-method 1-factorization; for
    odd m, the factorization of K_{m+1} restricted to m vertices) and
    recolors random edges with fresh colors until the target count.
    Reproducible for a fixed seed.
    """
    chi = m - 1 if m % 2 == 0 else m
    if colors < chi or colors > m * (m - 1) // 2:
        raise InfeasibleParams(
            f"K_{m} proper colorings use between {chi} and {m * (m - 1) // 2} colors"
        )
    if m % 2 == 0:
        base = circle_one_factorization(m)
        mat = [list(row) for row in base.matrix]
    else:
        big = circle_one_factorization(m + 1)
        mat = [list(row[:m]) for row in big.matrix[:m]]
    rng = random.Random(seed)
    class_size: dict[int, int] = {}
    for u in range(m):
        for v in range(u + 1, m):
            class_size[mat[u][v]] = class_size.get(mat[u][v], 0) + 1
    current = len(class_size)
    fresh = max(class_size) + 1
    while current < colors:
        pool = [
            (u, v)
            for u in range(m)
            for v in range(u + 1, m)
            if class_size[mat[u][v]] >= 2
        ]
        u, v = pool[rng.randrange(len(pool))]
        class_size[mat[u][v]] -= 1
        mat[u][v] = mat[v][u] = fresh
        class_size[fresh] = 1
        fresh += 1
        current += 1
    return EdgeColoredGraph.from_edges(
        m, [(u + 1, v + 1, mat[u][v]) for u in range(m) for v in range(u + 1, m)]
    )


def enumerate_proper_colorings(m: int) -> Iterator[EdgeColoredGraph]:
    """All proper edge colorings of K_m, one per color-relabeling class.

    Colors are assigned to edges in lexicographic order under the
    restricted-growth rule (a new color may only be the smallest unused
    one), which picks exactly one representative per relabeling class.
    Exhaustive at desk scale (m <= 5 is instant, m = 6 takes a while).
    """
    edge_list = [(u, v) for u in range(m) for v in range(u + 1, m)]
    ne = len(edge_list)
    assign = [0] * ne
    vertex_used = [0] * m  # bitmask of colors at each vertex

    def rec(idx: int, cap: int) -> Iterator[EdgeColoredGraph]:
        if idx == ne:
            yield EdgeColoredGraph.from_edges(
                m,
                [
                    (u + 1, v + 1, assign[k])
                    for k, (u, v) in enumerate(edge_list)
                ],
            )
            return
        u, v = edge_list[idx]
        bad = vertex_used[u] | vertex_used[v]
        for c in range(min(cap + 1, ne - 1) + 1):
            b = 1 << c
            if bad & b:
                continue
            assign[idx] = c
            vertex_used[u] |= b
            vertex_used[v] |= b
            yield from rec(idx + 1, max(cap, c))
            vertex_used[u] &= ~b
            vertex_used[v] &= ~b

    yield from rec(0, -1)


def rainbow_one_factor(g: EdgeColoredGraph) -> list[tuple[int, int]] | None:
    """Exhaustive search for a perfect matching with pairwise distinct
    colors; returns 1-based edges or None.  Raises OddVertices on odd m."""
    if g.m % 2:
        raise OddVertices(f"K_{g.m} has no perfect matching")
    mat = g.matrix
    m = g.m

    def rec(unmatched: int, used_colors: set[int], acc: list[tuple[int, int]]):
        if not unmatched:
            return list(acc)
        u = (unmatched & -unmatched).bit_length() - 1
        rest = unmatched & ~(1 << u)
        v_mask = rest
        while v_mask:
            v = (v_mask & -v_mask).bit_length() - 1
            v_mask &= v_mask - 1
            c = mat[u][v]
            if c not in used_colors:
                used_colors.add(c)
                acc.append((u + 1, v + 1))
                res = rec(rest & ~(1 << v), used_colors, acc)
                acc.pop()
                used_colors.discard(c)
                if res is not None:
                    return res
        return None

    return rec((1 << m) - 1, set(), [])


def rainbow_two_factor(
    g: EdgeColoredGraph, min_vertices: int | None = None
) -> list[tuple[int, int]] | None:
    """Exhaustive search for a rainbow disjoint union of cycles covering at
    least min_vertices (default m-1) vertices; None when none exists.

    Cycles have length >= 3.  Candidate vertex sets are the full set and,
    when allowed by min_vertices, every set with one vertex removed.
    """
    m = g.m
    if min_vertices is None:
        min_vertices = m - 1
    if min_vertices > m:
        return None
    full = (1 << m) - 1
    candidates = [full]
    if min_vertices <= m - 1:
        candidates += [full & ~(1 << x) for x in range(m)]
    for mask in candidates:
        res = _cover_cycles(g, mask)
        if res is not None:
            return res
    return None


def _bits(mask: int) -> Iterator[int]:
    while mask:
        b = mask & -mask
        yield b.bit_length() - 1
        mask ^= b


def _cover_cycles(g: EdgeColoredGraph, mask: int) -> list[tuple[int, int]] | None:
    """Rainbow cycle cover of exactly the vertices in mask, or None."""
    mat = g.matrix
    acc: list[tuple[int, int]] = []
    used_colors: set[int] = set()

    def cover(uncovered: int):
        if uncovered == 0:
            return list(acc)
        v0 = (uncovered & -uncovered).bit_length() - 1
        return extend(v0, v0, uncovered & ~(1 << v0), 1, None)

    def extend(v0, last, remaining, length, second):
        for v in _bits(remaining):
            c = mat[last][v]
            if c in used_colors:
                continue
            used_colors.add(c)
            acc.append((last + 1, v + 1))
            if length >= 2:
                cc = mat[v][v0]
                sec = second if second is not None else v
                # canonical orientation: second vertex smaller than closer
                if cc not in used_colors and sec < v:
                    used_colors.add(cc)
                    acc.append((v + 1, v0 + 1))
                    res = cover(remaining & ~(1 << v))
                    if res is not None:
                        return res
                    acc.pop()
                    used_colors.discard(cc)
            res = extend(v0, v, remaining & ~(1 << v), length + 1,
                         second if second is not None else v)
            if res is not None:
                return res
            acc.pop()
            used_colors.discard(c)
        return None

    return cover(mask)


def antiramsey_reduce(g: EdgeColoredGraph) -> Square:
    """Square of order m with cell (i,j) = color of v_i v_j and one fresh
    symbol along the main diagonal.  Properness makes the result a valid
    generalized Latin square with color_count + 1 symbols (asserted)."""
    _check_proper(g)
    m = g.m
    fresh = max(c for _, _, c in g.edges()) + 1
    grid = [
        [g.matrix[i][j] if i != j else fresh for j in range(m)] for i in range(m)
    ]
    sq = validate_square(grid)
    if sq.symbol_count != g.color_count + 1:
        raise AssertionFailure("reduced square must add exactly one symbol")
    return sq


@dataclass(frozen=True)
class TwoFactorExtraction:
    """Edge set pulled back from a rainbow transversal of a reduced square."""

    edges: tuple[tuple[int, int], ...]
    edge_colors: tuple[int, ...]
    covered_vertices: frozenset[int]
    dropped_cell: CellRef | None
    rainbow: bool
    degree_two: bool
    cycles: tuple[tuple[int, ...], ...]

    @property
    def vertex_count(self) -> int:
        return len(self.covered_vertices)


def extract_two_factor(
    transversal: PartialTransversal, g: EdgeColoredGraph
) -> TwoFactorExtraction:
    """Map a rainbow transversal of the reduced square back to K_m edges.

    Cell (k, l) with k != l maps to edge v_k v_l; the at-most-one diagonal
    cell is dropped.  For a rainbow transversal the image has pairwise
    distinct colors, every incident vertex has degree exactly 2, and at
    least m-1 vertices are covered.  A duplicate edge (the image of an
    off-diagonal 2-cycle) raises DegenerateExtraction; equal colors on the
    two cells of a 2-cycle make this impossible for rainbow inputs.
    """
    m = g.m
    if transversal.size != m:
        raise DegenerateExtraction(
            f"transversal has {transversal.size} cells, expected {m}"
        )
    perm: dict[int, int] = {r: c for r, c in transversal.cells}
    diag = [CellRef(r, c) for r, c in transversal.cells if r == c]
    if len(diag) > 1:
        raise DegenerateExtraction(
            f"{len(diag)} diagonal cells; a rainbow transversal carries at most one"
        )
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for r, c in sorted(transversal.cells):
        if r == c:
            continue
        e = (min(r, c), max(r, c))
        if e in seen:
            raise DegenerateExtraction(f"edge {e} extracted twice (2-cycle image)")
        seen.add(e)
        edges.append(e)
    colors = tuple(g.color_of(u, v) for u, v in edges)
    degree: dict[int, int] = {}
    for u, v in edges:
        degree[u] = degree.get(u, 0) + 1
        degree[v] = degree.get(v, 0) + 1
    covered = frozenset(degree)
    cycles = []
    visited: set[int] = set()
    for start in sorted(perm):
        if start in visited or perm[start] == start:
            continue
        cyc = [start]
        visited.add(start)
        nxt = perm[start]
        while nxt != start:
            cyc.append(nxt)
            visited.add(nxt)
            nxt = perm[nxt]
        cycles.append(tuple(cyc))
    return TwoFactorExtraction(
        edges=tuple(edges),
        edge_colors=colors,
        covered_vertices=covered,
        dropped_cell=diag[0] if diag else None,
        rainbow=len(set(colors)) == len(colors),
        degree_two=all(d == 2 for d in degree.values()),
        cycles=tuple(cycles),
    )


def rainbow_factor_search(
    g: EdgeColoredGraph, factor_degree: int, min_vertices: int | None = None
) -> list[tuple[int, int]] | None:
    """Dispatch to the rainbow 1-factor or 2-factor exhaustive search."""
    if factor_degree == 1:
        return rainbow_one_factor(g)
    if factor_degree == 2:
        return rainbow_two_factor(g, min_vertices)
    raise InfeasibleParams(f"factor_degree must be 1 or 2, got {factor_degree}")
