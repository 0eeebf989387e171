"""Association between topic areas against a size-proportional null model.

For a source area the expected count in each other area is that area's
share of all potential target documents times the source's out-of-area
total. Residuals are relative deviations ``(actual - expected) / expected``;
positive ones are read as affinities. Expected counts are exact rationals,
so each row of expected counts sums to the row's actual total exactly.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.stats import chi2

from .corpus import Corpus
from .graph import Network
from .topics import TopicArea, cited_ids

__all__ = [
    "MODES",
    "ChiSquareResult",
    "AssociationMatrix",
    "out_of_area_counts",
    "expected_counts",
    "residual_matrix",
    "association_matrix",
    "affinity_network",
    "residual_table_csv",
    "read_residual_table",
    "heatmap_csv",
]

MODES = ("citation", "author_activity")


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    df: int
    p_value: float


def _area_index(areas: Sequence[TopicArea]) -> dict[str, int]:
    home = {}
    for i, a in enumerate(areas):
        for d in a.doc_ids:
            if d in home:
                raise ValueError(f"document {d} in more than one area")
            home[d] = i
    return home


def out_of_area_counts(areas: Sequence[TopicArea], corpus: Corpus, mode: str) -> np.ndarray:
    """Actual out-of-area counts, rows = source area, columns = target area.

    ``citation``: citations from documents in s to documents in t.
    ``author_activity``: for every author with a publication in s, the number
    of that author's publications in t. The diagonal is always zero.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    k = len(areas)
    home = _area_index(areas)
    actual = np.zeros((k, k), dtype=np.int64)
    if mode == "citation":
        for doc, s in home.items():
            rec = corpus.get(doc)
            if rec is None:
                continue
            for cited in cited_ids(rec):
                t = home.get(cited)
                if t is not None and t != s:
                    actual[s, t] += 1
        return actual
    per_author: dict[str, np.ndarray] = {}
    for doc, i in home.items():
        rec = corpus.get(doc)
        if rec is None:
            continue
        for a in rec.author_keys():
            per_author.setdefault(a, np.zeros(k, dtype=np.int64))[i] += 1
    for counts in per_author.values():
        active = np.flatnonzero(counts)
        for s in active:
            actual[s] += counts
            actual[s, s] -= counts[s]
    return actual


def expected_counts(actual_row: Sequence[int], sizes: Sequence[int], source: int) -> list[Fraction]:
    """Size-proportional expected counts for one source row (source cell is 0)."""
    pool = sum(int(s) for t, s in enumerate(sizes) if t != source)
    if pool <= 0:
        raise ValueError("all potential target areas are empty")
    total = sum(int(a) for t, a in enumerate(actual_row) if t != source)
    return [Fraction(0) if t == source else Fraction(int(s) * total, pool) for t, s in enumerate(sizes)]


def residual_matrix(actual: np.ndarray, expected: Sequence[Sequence[Fraction]]):
    """Residuals, per-row chi-square goodness-of-fit results and row flags.

    A cell with zero expectation has an undefined (NaN) residual; if it also
    has a positive actual count its row is flagged.
    """
    actual = np.asarray(actual)
    k = actual.shape[0]
    if len(expected) != k or any(len(r) != actual.shape[1] for r in expected):
        raise ValueError("actual and expected shapes differ")
    res = np.full(actual.shape, np.nan)
    tests, flags = [], []
    for s in range(k):
        stat = Fraction(0)
        support = 0
        flagged = False
        for t in range(actual.shape[1]):
            if t == s:
                continue
            e, a = Fraction(expected[s][t]), int(actual[s, t])
            if e == 0:
                flagged |= a > 0
                continue
            support += 1
            res[s, t] = float((a - e) / e)
            stat += (a - e) ** 2 / e
        df = max(support - 1, 0)
        statistic = float(stat)
        p = float(chi2.sf(statistic, df)) if df > 0 else 1.0
        tests.append(ChiSquareResult(statistic, df, p))
        flags.append(flagged)
    return res, tests, flags


@dataclass
class AssociationMatrix:
    mode: str
    areas: list[int]
    actual: np.ndarray
    expected: list[list[Fraction]]
    residuals: np.ndarray
    sizes: dict[int, int]
    chi_square: list[ChiSquareResult] = field(default_factory=list)
    row_flags: list[bool] = field(default_factory=list)

    @property
    def expected_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.expected])

    @classmethod
    def from_counts(cls, actual, sizes: Sequence[int], area_ids: Sequence[int] | None = None,
                    mode: str = "citation") -> "AssociationMatrix":
        actual = np.asarray(actual, dtype=np.int64)
        k = actual.shape[0]
        if area_ids is None:
            area_ids = list(range(1, k + 1))
        expected = [expected_counts(actual[s], sizes, s) for s in range(k)]
        res, tests, flags = residual_matrix(actual, expected)
        return cls(mode, list(area_ids), actual, expected, res,
                   dict(zip(area_ids, (int(s) for s in sizes))), tests, flags)

    def affinity_network(self, threshold: float = 0.0) -> Network:
        return affinity_network(self.residuals, self.areas, threshold, self.sizes, self.row_flags)

    def restrict(self, area_ids: Sequence[int], corpus: Corpus | None = None) -> "AssociationMatrix":
        """Sub-matrix over ``area_ids`` with expectations recomputed for that pool."""
        pos = [self.areas.index(a) for a in area_ids]
        sub = self.actual[np.ix_(pos, pos)]
        return AssociationMatrix.from_counts(sub, [self.sizes[a] for a in area_ids], list(area_ids), self.mode)


def association_matrix(areas: Sequence[TopicArea], corpus: Corpus, mode: str) -> AssociationMatrix:
    actual = out_of_area_counts(areas, corpus, mode)
    return AssociationMatrix.from_counts(actual, [a.size for a in areas], [a.area_id for a in areas], mode)


def affinity_network(
    residuals: np.ndarray,
    area_ids: Sequence[int],
    threshold: float = 0.0,
    sizes: dict[int, int] | None = None,
    row_flags: Sequence[bool] | None = None,
) -> Network:
    """Directed network with an edge s->t weighted by every residual above
    ``threshold``.

    Zero affinity does not mean the absence of any links between two areas:
    it covers both the size-scaled background connectivity and negative
    deviations (antagonism).
    """
    residuals = np.asarray(residuals, dtype=float)
    edges = {}
    for s, a in enumerate(area_ids):
        for t, b in enumerate(area_ids):
            r = residuals[s, t]
            if s != t and not np.isnan(r) and r > threshold:
                edges[(a, b)] = float(r)
    attrs = {}
    for i, a in enumerate(area_ids):
        attrs[a] = {}
        if sizes:
            attrs[a]["size"] = sizes[a]
        if row_flags is not None:
            attrs[a]["flagged"] = bool(row_flags[i])
    return Network(area_ids, edges, directed=True, node_attrs=attrs)


def _fmt(x: float, decimals: int | None) -> str:
    if np.isnan(x):
        return "N.A."
    if decimals is None:
        return repr(float(x))
    return f"{x:.{decimals}f}"


def residual_table_csv(m: AssociationMatrix, decimals: int | None = None) -> str:
    """Source rows against target columns in area order, diagonal written as 0."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    labels = [f"a{a}" for a in m.areas]
    w.writerow(["Source areas"] + labels)
    for s, lab in enumerate(labels):
        row = [lab]
        for t in range(len(labels)):
            row.append("0" if s == t else _fmt(m.residuals[s, t], decimals))
        w.writerow(row)
    return buf.getvalue()


def read_residual_table(text: str) -> tuple[list[int], np.ndarray]:
    """Parse a residual table (CSV or tab separated) into area ids and values."""
    dialect = "excel-tab" if "\t" in text.splitlines()[0] else "excel"
    rows = [r for r in csv.reader(io.StringIO(text), dialect=dialect) if r]
    ids = [int(c.strip().lstrip("a")) for c in rows[0][1:]]
    vals = np.full((len(ids), len(ids)), np.nan)
    for s, row in enumerate(rows[1:]):
        for t, cell in enumerate(row[1:]):
            cell = cell.strip()
            if s != t and cell not in ("", "N.A."):
                vals[s, t] = float(cell)
    return ids, vals


def heatmap_csv(m: AssociationMatrix) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["mode", "source", "target", "actual", "expected", "residual"])
    for s, a in enumerate(m.areas):
        for t, b in enumerate(m.areas):
            if s == t:
                continue
            w.writerow([m.mode, a, b, int(m.actual[s, t]), repr(float(m.expected[s][t])),
                        _fmt(m.residuals[s, t], None)])
    return buf.getvalue()
