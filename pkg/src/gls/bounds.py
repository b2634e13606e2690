"""Sufficient-condition certifiers for transversal existence.

The pair certificate: a transversal exists unless some monochromatic pair
of entries a_ij, a_kl satisfies

    (4/3)^3 * (c_i* + c_*j + c_k* + c_*l) > n(n-1),

so certification amounts to checking 64 * weight_sum <= 27 * n * (n-1) for
the heaviest pair.  All comparisons are exact integer arithmetic (multiply
through by the 64/27 and 256 denominators); the only irrational threshold,
n/(4e), is decided against the rational upper bound 4e < 10.8731274, which
can only under-certify (sound direction).
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    CellRef,
    PreconditionViolated,
    Square,
    SymbolStats,
    compute_stats,
)

KIND_LLL = "LLL"
KIND_COROLLARY = "Corollary"
KIND_ERDOS_SPENCER = "ErdosSpencer"
KIND_THEOREM75 = "Theorem75"
KIND_NONE = "None"

# 4e = 10.87312731383618...; certify max_mult <= n/(4e) via the upper bound
_FOUR_E_UPPER_NUM = 108731274
_FOUR_E_UPPER_DEN = 10_000_000


@dataclass(frozen=True)
class MonochromaticPair:
    """Two cells carrying the same symbol, with their line-weight sum."""

    first: CellRef
    second: CellRef
    symbol: int
    weight_sum: int

    @property
    def mean_weight(self) -> float:
        return self.weight_sum / 4.0


@dataclass(frozen=True)
class BoundCertificate:
    """Outcome of one certifier; `details` holds the checked thresholds."""

    kind: str
    certified: bool
    witness: MonochromaticPair | None
    details: dict

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "certified": self.certified}
        if self.witness is not None:
            w = self.witness
            out["witness"] = {
                "cells": [[w.first.row, w.first.col], [w.second.row, w.second.col]],
                "symbol": w.symbol,
                "weight_sum": w.weight_sum,
            }
        else:
            out["witness"] = None
        out.update(self.details)
        return out


def _positions_by_symbol(square: Square) -> dict[int, list[CellRef]]:
    pos: dict[int, list[CellRef]] = {}
    for i, row in enumerate(square.grid):
        for j, s in enumerate(row):
            pos.setdefault(s, []).append(CellRef(i + 1, j + 1))
    return pos


def _cell_weight(stats: SymbolStats, cell: CellRef) -> int:
    return stats.row_weight[cell.row - 1] + stats.col_weight[cell.col - 1]


def worst_monochromatic_pair(
    square: Square, stats: SymbolStats | None = None, method: str = "top2"
) -> MonochromaticPair | None:
    """The monochromatic pair maximizing c_i* + c_*j + c_k* + c_*l.

    method='top2' scans, per symbol, only the two occurrences with the
    largest cell weight (the pair maximum is always their sum since any two
    occurrences form a pair); 'full' enumerates all pairs for validation.
    Ties break toward lexicographically smallest cell coordinates.
    """
    if method not in ("top2", "full"):
        raise PreconditionViolated(f"unknown method {method!r}")
    stats = stats or compute_stats(square)
    best: MonochromaticPair | None = None

    def consider(a: CellRef, b: CellRef, s: int):
        nonlocal best
        if b < a:
            a, b = b, a
        ws = _cell_weight(stats, a) + _cell_weight(stats, b)
        key = (-ws, a, b)
        if best is None or key < (-best.weight_sum, best.first, best.second):
            best = MonochromaticPair(a, b, s, ws)

    for s, cells in sorted(_positions_by_symbol(square).items()):
        if len(cells) < 2:
            continue
        if method == "full":
            for x in range(len(cells)):
                for y in range(x + 1, len(cells)):
                    consider(cells[x], cells[y], s)
        else:
            ranked = sorted(cells, key=lambda c: (-_cell_weight(stats, c), c))
            consider(ranked[0], ranked[1], s)
    return best


def lll_certificate(square: Square, method: str = "top2") -> BoundCertificate:
    """Certify transversal existence via the monochromatic-pair inequality.

    Certified iff every monochromatic pair satisfies
    64 * weight_sum <= 27 * n * (n-1); vacuously certified when no symbol
    repeats.  The witness is the heaviest pair either way.
    """
    n = square.n
    if n <= 1:
        raise PreconditionViolated("pair certificate needs n > 1")
    stats = compute_stats(square)
    pair = worst_monochromatic_pair(square, stats, method=method)
    rhs = 27 * n * (n - 1)
    if pair is None:
        return BoundCertificate(
            KIND_LLL, True, None, {"lhs": None, "rhs": rhs, "vacuous": True}
        )
    lhs = 64 * pair.weight_sum
    return BoundCertificate(
        KIND_LLL,
        lhs <= rhs,
        pair,
        {"lhs": lhs, "rhs": rhs, "vacuous": False},
    )


def threshold_checks(square: Square) -> BoundCertificate:
    """Evaluate the three color-count / multiplicity sufficient conditions.

    (i)  symbol_count >= (1 - 27/256) n^2 + (27/256) n, exact rationals;
    (ii) max multiplicity <= n/(4e), conservative rational comparison;
    (iii) symbol_count >= ceil(0.75 n^2).
    Certified when any holds; `kind` names the first that does.
    """
    n = square.n
    if n <= 1:
        raise PreconditionViolated("threshold checks need n > 1")
    stats = compute_stats(square)
    sc = square.symbol_count
    max_mult = stats.max_multiplicity

    corollary_ok = 256 * sc >= 229 * n * n + 27 * n
    erdos_spencer_ok = _FOUR_E_UPPER_NUM * max_mult <= _FOUR_E_UPPER_DEN * n
    theorem75_ok = 4 * sc >= 3 * n * n

    if corollary_ok:
        kind = KIND_COROLLARY
    elif erdos_spencer_ok:
        kind = KIND_ERDOS_SPENCER
    elif theorem75_ok:
        kind = KIND_THEOREM75
    else:
        kind = KIND_NONE
    details = {
        "symbol_count": sc,
        "max_multiplicity": max_mult,
        "checks": {
            "corollary": {
                "certified": corollary_ok,
                "lhs": 256 * sc,
                "rhs": 229 * n * n + 27 * n,
            },
            "erdos_spencer": {
                "certified": erdos_spencer_ok,
                "lhs": _FOUR_E_UPPER_NUM * max_mult,
                "rhs": _FOUR_E_UPPER_DEN * n,
            },
            "theorem75": {
                "certified": theorem75_ok,
                "lhs": 4 * sc,
                "rhs": 3 * n * n,
            },
        },
    }
    return BoundCertificate(kind, kind != KIND_NONE, None, details)


@dataclass(frozen=True)
class LineReport:
    """Dichotomy for one line: light (pair-bound side) or heavy with a
    lower bound on singletons avoiding the line."""

    kind: str  # "row" | "col"
    index: int  # 1-based
    weight: int
    heavy: bool
    singleton_bound: int | None
    singletons_avoiding: int


@dataclass(frozen=True)
class SingletonReport:
    lines: tuple[LineReport, ...]
    all_light: bool
    certified_by_pair_bound: bool
    max_heavy_bound: int | None

    def to_dict(self) -> dict:
        return {
            "all_light": self.all_light,
            "certified_by_pair_bound": self.certified_by_pair_bound,
            "max_heavy_bound": self.max_heavy_bound,
            "lines": [
                {
                    "kind": ln.kind,
                    "index": ln.index,
                    "weight": ln.weight,
                    "heavy": ln.heavy,
                    "singleton_bound": ln.singleton_bound,
                    "singletons_avoiding": ln.singletons_avoiding,
                }
                for ln in self.lines
            ],
        }


def singleton_lower_bound(square: Square) -> SingletonReport:
    """Per-line dichotomy behind the singleton lower bound.

    A line of weight at most (27/256)(n^2 - n) is light; if every line is
    light the pair certificate applies and a transversal is certified.  For
    a heavy line, over the symbols absent from it, 2*(number of symbols) -
    (number of their occurrences) bounds from below the count of singletons
    avoiding the line.
    """
    n = square.n
    if n <= 1:
        raise PreconditionViolated("singleton dichotomy needs n > 1")
    stats = compute_stats(square)
    lines: list[LineReport] = []
    for kind, weights in (("row", stats.row_weight), ("col", stats.col_weight)):
        for idx, weight in enumerate(weights):
            heavy = 256 * weight > 27 * (n * n - n)
            if kind == "row":
                present = set(square.grid[idx])
            else:
                present = {square.grid[i][idx] for i in range(n)}
            absent_occ = [c for s, c in stats.occ.items() if s not in present]
            bound = 2 * len(absent_occ) - sum(absent_occ) if heavy else None
            avoiding = sum(1 for c in absent_occ if c == 1)
            lines.append(
                LineReport(kind, idx + 1, weight, heavy, bound, avoiding)
            )
    heavy_bounds = [ln.singleton_bound for ln in lines if ln.heavy]
    all_light = not heavy_bounds
    return SingletonReport(
        lines=tuple(lines),
        all_light=all_light,
        certified_by_pair_bound=all_light,
        max_heavy_bound=max(heavy_bounds) if heavy_bounds else None,
    )
