"""Core data model for generalized Latin squares.

A generalized Latin square of order n is an n x n grid of symbols in which
every symbol appears at most once in each row and at most once in each
column; equivalently, a proper edge-coloring of K_{n,n}.  A diagonal picks
one cell from every row and every column; a transversal is a diagonal whose
symbols are pairwise distinct.

Symbols are opaque non-negative integers.  They need not be contiguous;
canonical serialization renumbers them by first occurrence in row-major
order.  Cell coordinates are 1-based in all public objects and reports,
0-based only inside algorithms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence


class GlsError(Exception):
    """Base class for all errors raised by this package."""


class NotSquare(GlsError):
    """Input grid is not an n x n array."""


class RowDuplicate(GlsError):
    """A symbol appears twice in one row."""

    def __init__(self, row: int, symbol: int):
        self.row = row
        self.symbol = symbol
        super().__init__(f"RowDuplicate row {row} symbol {symbol}")


class ColDuplicate(GlsError):
    """A symbol appears twice in one column."""

    def __init__(self, col: int, symbol: int):
        self.col = col
        self.symbol = symbol
        super().__init__(f"ColDuplicate col {col} symbol {symbol}")


class OutOfRange(GlsError):
    """A cell reference points outside the square."""


class PreconditionViolated(GlsError):
    """An operation was called outside its stated precondition."""


class AssertionFailure(GlsError):
    """A step that is guaranteed to succeed failed; implementation bug."""


class NotRegular(GlsError):
    """Bipartite graph is not d-regular."""


class NotProper(GlsError):
    """Edge coloring is not proper."""


class OddVertices(GlsError):
    """Perfect-matching search on an odd number of vertices."""


class InfeasibleParams(GlsError):
    """Constructor parameters admit no valid object."""


class ResourceLimit(GlsError):
    """An explicit node or time budget was exhausted."""

    def __init__(self, message: str, partial=None):
        self.partial = partial
        super().__init__(message)


class DegenerateExtraction(GlsError):
    """Extracted edge multiset contains a duplicate edge."""


class ParseError(GlsError):
    """Malformed square or graph file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CellRef(NamedTuple):
    """1-based (row, col) position of the entry a_ij."""

    row: int
    col: int


@dataclass(frozen=True)
class Square:
    """A validated generalized Latin square.

    Immutable after construction; safe to share across threads.  Use
    :func:`validate_square` (or :meth:`Square.parse`) instead of building
    instances directly.
    """

    n: int
    grid: tuple[tuple[int, ...], ...]
    symbol_count: int

    def __getitem__(self, cell: CellRef | tuple[int, int]) -> int:
        r, c = cell
        if not (1 <= r <= self.n and 1 <= c <= self.n):
            raise OutOfRange(f"cell ({r},{c}) outside order-{self.n} square")
        return self.grid[r - 1][c - 1]

    @property
    def symbols(self) -> frozenset[int]:
        return frozenset(s for row in self.grid for s in row)

    def transpose(self) -> "Square":
        return Square(self.n, tuple(zip(*self.grid)), self.symbol_count)

    def subsquare(self, keep_rows: Sequence[int], keep_cols: Sequence[int]) -> "Square":
        """Square induced by the given 0-based row/column index lists.

        Symbol identifiers are preserved, so multiplicities may differ from
        the parent square; symbol_count is recomputed.
        """
        if len(keep_rows) != len(keep_cols):
            raise NotSquare("subsquare needs equally many rows and columns")
        grid = tuple(
            tuple(self.grid[r][c] for c in keep_cols) for r in keep_rows
        )
        syms = {s for row in grid for s in row}
        return Square(len(keep_rows), grid, len(syms))

    def renumbered(self) -> "Square":
        """Relabel symbols by first occurrence in row-major order."""
        relab: dict[int, int] = {}
        grid = []
        for row in self.grid:
            new_row = []
            for s in row:
                if s not in relab:
                    relab[s] = len(relab)
                new_row.append(relab[s])
            grid.append(tuple(new_row))
        return Square(self.n, tuple(grid), self.symbol_count)

    @classmethod
    def parse(cls, text: str) -> "Square":
        return parse_square(text)

    def format(self, canonical: bool = True) -> str:
        return format_square(self, canonical=canonical)


def validate_square(grid: Sequence[Sequence[int]]) -> Square:
    """Validate a grid of symbols and wrap it as a Square.

    Raises NotSquare / RowDuplicate / ColDuplicate with 1-based indices.
    """
    n = len(grid)
    if n < 1:
        raise NotSquare("empty grid")
    rows = []
    for i, row in enumerate(grid):
        row = tuple(row)
        if len(row) != n:
            raise NotSquare(f"row {i + 1} has {len(row)} entries, expected {n}")
        for s in row:
            if not isinstance(s, int) or isinstance(s, bool) or s < 0:
                raise NotSquare(f"row {i + 1}: symbol {s!r} is not a non-negative integer")
        rows.append(row)
    for i, row in enumerate(rows):
        seen: set[int] = set()
        for s in row:
            if s in seen:
                raise RowDuplicate(i + 1, s)
            seen.add(s)
    for j in range(n):
        seen = set()
        for i in range(n):
            s = rows[i][j]
            if s in seen:
                raise ColDuplicate(j + 1, s)
            seen.add(s)
    symbols = {s for row in rows for s in row}
    return Square(n, tuple(rows), len(symbols))


@dataclass(frozen=True)
class SymbolStats:
    """Occurrence statistics of a square.

    occ[s] is the multiplicity c(s) of symbol s.  row_weight[i] is
    c_i* = (sum of c(a_it) over the row) - n, and col_weight[j] is the
    column analogue; both are 0 exactly when the line consists of symbols
    that occur once in the whole square (singletons).  histogram[k] counts
    symbols of multiplicity k.
    """

    occ: dict[int, int]
    row_weight: tuple[int, ...]
    col_weight: tuple[int, ...]
    singletons: frozenset[int]
    repetitions: frozenset[int]
    histogram: dict[int, int]
    color_density: float

    @property
    def max_multiplicity(self) -> int:
        return max(self.histogram)


def compute_stats(square: Square) -> SymbolStats:
    """Count symbol occurrences and per-line weights of a square."""
    n = square.n
    occ: dict[int, int] = {}
    for row in square.grid:
        for s in row:
            occ[s] = occ.get(s, 0) + 1
    row_weight = tuple(sum(occ[s] for s in row) - n for row in square.grid)
    col_weight = tuple(
        sum(occ[square.grid[i][j]] for i in range(n)) - n for j in range(n)
    )
    singletons = frozenset(s for s, c in occ.items() if c == 1)
    repetitions = frozenset(s for s, c in occ.items() if c >= 2)
    histogram: dict[int, int] = {}
    for c in occ.values():
        histogram[c] = histogram.get(c, 0) + 1
    return SymbolStats(
        occ=occ,
        row_weight=row_weight,
        col_weight=col_weight,
        singletons=singletons,
        repetitions=repetitions,
        histogram=histogram,
        color_density=square.symbol_count / (n * n),
    )


@dataclass(frozen=True)
class PartialTransversal:
    """Cells with pairwise distinct rows, columns, and symbols."""

    cells: tuple[CellRef, ...]

    @property
    def size(self) -> int:
        return len(self.cells)

    def symbols(self, square: Square) -> tuple[int, ...]:
        return tuple(square[c] for c in self.cells)

    def is_transversal(self, square: Square) -> bool:
        return self.size == square.n

    @classmethod
    def from_cells(
        cls, square: Square, cells: Iterable[CellRef | tuple[int, int]]
    ) -> "PartialTransversal":
        """Build and check a partial transversal; raises on violations."""
        refs = tuple(sorted(CellRef(*c) for c in cells))
        ok, why = verify_partial_transversal(square, refs)
        if not ok:
            raise PreconditionViolated(f"not a partial transversal: {why}")
        return cls(refs)


def verify_partial_transversal(
    square: Square, cells: Iterable[CellRef | tuple[int, int]]
) -> tuple[bool, str | None]:
    """Check distinct rows, columns, and symbols; report the first violation.

    Cells are scanned in sorted order so the reported violation is
    deterministic.  Raises OutOfRange for bad indices.
    """
    n = square.n
    refs = sorted(CellRef(*c) for c in cells)
    for r, c in refs:
        if not (1 <= r <= n and 1 <= c <= n):
            raise OutOfRange(f"cell ({r},{c}) outside order-{n} square")
    seen_rows: set[int] = set()
    seen_cols: set[int] = set()
    seen_syms: dict[int, CellRef] = {}
    for ref in refs:
        if ref.row in seen_rows:
            return False, f"row {ref.row} used twice"
        if ref.col in seen_cols:
            return False, f"col {ref.col} used twice"
        s = square[ref]
        if s in seen_syms:
            prev = seen_syms[s]
            return False, (
                f"symbol {s} repeated at ({prev.row},{prev.col}) and ({ref.row},{ref.col})"
            )
        seen_rows.add(ref.row)
        seen_cols.add(ref.col)
        seen_syms[s] = ref
    if len(refs) > n:
        return False, f"{len(refs)} cells exceed order {n}"
    return True, None


# --- square text format (.sq) ---------------------------------------------
#
# Optional '#' comment lines; first non-comment line is the order n; then n
# lines of n whitespace-separated non-negative integers.


def parse_square(text: str) -> Square:
    """Parse the square text format; errors carry 1-based line numbers."""
    lines = text.splitlines()
    body: list[tuple[int, str]] = []
    for no, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        body.append((no, stripped))
    if not body:
        raise ParseError("no data lines")
    no, head = body[0]
    try:
        n = int(head)
    except ValueError:
        raise ParseError(f"expected order n, got {head!r}", line=no) from None
    if n < 1:
        raise ParseError(f"order must be positive, got {n}", line=no)
    if len(body) - 1 < n:
        raise ParseError(f"expected {n} grid lines, found {len(body) - 1}")
    if len(body) - 1 > n:
        raise ParseError(
            f"expected {n} grid lines, found {len(body) - 1}", line=body[n + 1][0]
        )
    grid = []
    for no, line in body[1:]:
        parts = line.split()
        if len(parts) != n:
            raise ParseError(f"expected {n} entries, found {len(parts)}", line=no)
        try:
            row = [int(p) for p in parts]
        except ValueError:
            bad = next(p for p in parts if not p.lstrip("-").isdigit())
            raise ParseError(f"bad symbol {bad!r}", line=no) from None
        for s in row:
            if s < 0:
                raise ParseError(f"negative symbol {s}", line=no)
        grid.append(row)
    try:
        return validate_square(grid)
    except GlsError as exc:
        raise ParseError(str(exc)) from exc


def format_square(square: Square, canonical: bool = True) -> str:
    """Render a square in the text format.

    Canonical output renumbers symbols by first occurrence in row-major
    order, so two squares equal up to relabeling serialize identically.
    """
    sq = square.renumbered() if canonical else square
    width = len(str(max(max(row) for row in sq.grid)))
    lines = [str(sq.n)]
    for row in sq.grid:
        lines.append(" ".join(str(s).rjust(width) for s in row))
    return "\n".join(lines) + "\n"


def cyclic_square(n: int) -> Square:
    """Cayley table of Z_n; the classical transversal-free example for even n."""
    if n < 1:
        raise InfeasibleParams("order must be positive")
    return Square(
        n,
        tuple(tuple((i + j) % n for j in range(n)) for i in range(n)),
        n,
    )
