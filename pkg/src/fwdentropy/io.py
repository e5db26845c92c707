"""Data ingestion, the normal-scores transform and report serialization.

File formats
------------
correlation CSV
    Header row of variable names, then the full symmetric matrix, one row
    per line. Asymmetry beyond ``1e-9`` is rejected.
counts CSV
    Long format: one column per categorical variable holding level labels,
    and a final ``count`` column. Cells absent from the file are zero.
edge list
    One ``nameA,nameB`` pair per line (undirected) or ``nameA->nameB``
    (directed). Blank lines and ``#`` comments are ignored.
data CSV
    Header row of names, then numeric rows. Rows with a missing or
    non-numeric cell are dropped and counted.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.special import ndtri

from .entropy import CorrelationMatrix, ProbabilityTable, to_nats
from .exceptions import DegenerateColumn, InputError
from .forward_diff import DeltaTable
from .graph_scan import Graph, moral_graph, skeleton
from .sets import VariableSet
from .synergy import SynergyFinding

REPORT_DECIMALS = 2


@dataclass
class DataMatrix:
    values: np.ndarray
    names: tuple[str, ...]
    n_dropped: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise InputError("data must be two dimensional")
        if self.names is None:
            self.names = tuple(f"X{i + 1}" for i in range(self.values.shape[1]))
        self.names = tuple(self.names)
        if len(self.names) != self.values.shape[1]:
            raise InputError(f"{len(self.names)} names for {self.values.shape[1]} columns")
        if not np.all(np.isfinite(self.values)):
            raise InputError("data contains missing or non-finite values")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


def normal_scores_array(X: np.ndarray, rng=None) -> np.ndarray:
    """Replace each column by ``Phi^-1(rank / (n + 1))``.

    Ties are ranked in random order: rows are shuffled by ``rng`` before a
    stable sort, so equal seeds give identical output.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if n < 3:
        raise InputError("normal scores need at least 3 rows")
    rng = np.random.default_rng(rng)
    scores = ndtri(np.arange(1, n + 1) / (n + 1.0))
    out = np.empty_like(X)
    for j in range(X.shape[1]):
        col = X[:, j]
        if np.all(col == col[0]):
            raise DegenerateColumn(f"column {j} is constant")
        perm = rng.permutation(n)
        order = perm[np.argsort(col[perm], kind="stable")]
        out[order, j] = scores
    return out


def normal_scores(data: DataMatrix, seed: int | None = 0) -> DataMatrix:
    return DataMatrix(normal_scores_array(data.values, seed), data.names, data.n_dropped)


def empirical_correlation(data: DataMatrix) -> CorrelationMatrix:
    """Product-moment correlation matrix of the columns."""
    X = data.values
    n, p = X.shape
    if p < 2 or n <= p:
        raise InputError(f"need n > p >= 2, got n={n}, p={p}")
    Xc = X - X.mean(axis=0)
    sd = np.sqrt((Xc * Xc).sum(axis=0))
    bad = [data.names[j] for j in np.flatnonzero(sd == 0)]
    if bad:
        raise DegenerateColumn(f"constant column(s): {', '.join(bad)}")
    R = (Xc.T @ Xc) / np.outer(sd, sd)
    R = np.clip((R + R.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(R, 1.0)
    return CorrelationMatrix(R, data.names)


def _rows(path) -> list[list[str]]:
    text = Path(path).read_text()
    return [row for row in csv.reader(io.StringIO(text)) if row and any(c.strip() for c in row)]


def read_data_csv(path) -> DataMatrix:
    rows = _rows(path)
    if not rows:
        raise InputError(f"{path}: empty file")
    names = [c.strip() for c in rows[0]]
    kept, dropped = [], 0
    for row in rows[1:]:
        if len(row) != len(names):
            dropped += 1
            continue
        try:
            vals = [float(c) for c in row]
        except ValueError:
            dropped += 1
            continue
        if not all(math.isfinite(v) for v in vals):
            dropped += 1
            continue
        kept.append(vals)
    if not kept:
        raise InputError(f"{path}: no complete rows")
    return DataMatrix(np.array(kept), tuple(names), dropped)


def read_correlation_csv(path) -> CorrelationMatrix:
    rows = _rows(path)
    if len(rows) < 2:
        raise InputError(f"{path}: expected a header and matrix rows")
    names = [c.strip() for c in rows[0]]
    try:
        values = np.array([[float(c) for c in row] for row in rows[1:]])
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    if values.shape != (len(names), len(names)):
        raise InputError(f"{path}: matrix shape {values.shape} does not match {len(names)} names")
    return CorrelationMatrix(values, names)


def write_correlation_csv(corr: CorrelationMatrix, path) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(corr.names)
    for row in corr.values:
        w.writerow([repr(float(v)) for v in row])
    Path(path).write_text(buf.getvalue())


def read_counts_csv(path) -> ProbabilityTable:
    rows = _rows(path)
    if len(rows) < 2:
        raise InputError(f"{path}: expected a header and count rows")
    header = [c.strip() for c in rows[0]]
    if header[-1] != "count" or len(header) < 2:
        raise InputError(f"{path}: last column must be 'count'")
    names = header[:-1]
    levels: list[list[str]] = [[] for _ in names]
    records = []
    for row in rows[1:]:
        if len(row) != len(header):
            raise InputError(f"{path}: row {row} has {len(row)} fields, expected {len(header)}")
        labels = [c.strip() for c in row[:-1]]
        try:
            count = float(row[-1])
        except ValueError:
            raise InputError(f"{path}: bad count {row[-1]!r}") from None
        if count < 0 or not math.isfinite(count):
            raise InputError(f"{path}: counts must be finite and nonnegative")
        for lv, lab in zip(levels, labels):
            if lab not in lv:
                lv.append(lab)
        records.append((labels, count))
    counts = np.zeros(tuple(len(lv) for lv in levels))
    for labels, count in records:
        counts[tuple(lv.index(lab) for lv, lab in zip(levels, labels))] += count
    return ProbabilityTable.from_counts(counts, names, levels)


def read_edge_list(path, names: Sequence[str], directed: str | None = None) -> Graph:
    """Read an edge list against the given node names.

    Directed arcs (``a->b``) require ``directed="moralize"`` or
    ``directed="skeleton"``; undirected pairs are kept in either case.
    """
    index = {n: i for i, n in enumerate(names)}
    undirected, arcs = [], []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" in line:
            a, b = (s.strip() for s in line.split("->", 1))
            target = arcs
        else:
            parts = [s.strip() for s in line.split(",")]
            if len(parts) != 2:
                raise InputError(f"{path}:{lineno}: expected 'nameA,nameB'")
            a, b = parts
            target = undirected
        for nm in (a, b):
            if nm not in index:
                raise InputError(f"{path}:{lineno}: unknown node {nm!r}")
        target.append((index[a], index[b]))
    if arcs and directed not in ("moralize", "skeleton"):
        raise InputError(f"{path}: directed arcs need --moralize or --skeleton")
    parents = [[] for _ in names]
    for a, b in arcs:
        if a not in parents[b]:
            parents[b].append(a)
    if directed == "moralize":
        g = moral_graph(parents, names)
    else:
        g = skeleton(parents, names)
    return Graph(len(names), list(g.edges) + undirected, names)


def file_fingerprint(*paths) -> str:
    h = hashlib.sha256()
    for p in paths:
        h.update(Path(p).read_bytes())
    return "sha256:" + h.hexdigest()


@dataclass
class ReportDocument:
    """Serializable summary of a computation.

    Millibit values are rounded to two decimals when the document is
    built, so a document read back from disk equals the one written.
    """

    metadata: dict
    delta_records: list[dict] = field(default_factory=list)
    synergy_records: list[dict] = field(default_factory=list)
    entropy_records: list[dict] | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ReportDocument":
        d = json.loads(text)
        return cls(d["metadata"], d["delta_records"], d["synergy_records"], d.get("entropy_records"))

    def write(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def read(cls, path) -> "ReportDocument":
        return cls.from_json(Path(path).read_text())

    def to_text(self) -> str:
        return format_report_text(self)


def _r(x: float, units: str = "mbits") -> float:
    v = to_nats(x) if units == "nats" else x
    out = round(float(v), REPORT_DECIMALS if units == "mbits" else 6)
    return 0.0 if out == 0 else out


def build_report(
    metadata: dict,
    deltas: DeltaTable | None = None,
    findings: Iterable[SynergyFinding] = (),
    sets: Iterable[VariableSet] | None = None,
    min_order: int = 2,
    entropies: dict | None = None,
    units: str = "mbits",
) -> ReportDocument:
    """Project a delta table and findings onto report records.

    ``sets`` restricts the delta records (default: every stored set of
    order at least ``min_order``). Records are sorted by order, then by
    ascending value. ``entropies`` maps sets to millibit entropies.
    """
    if units not in ("mbits", "nats"):
        raise InputError(f"unknown units {units!r}")
    meta = dict(metadata)
    meta["units"] = units
    drecs = []
    if deltas is not None:
        chosen = list(deltas) if sets is None else list(sets)
        for A in chosen:
            if len(A) < min_order:
                continue
            drecs.append({
                "subset": [deltas.names[i] for i in A],
                "order": len(A),
                "delta": _r(deltas[A], units),
            })
    drecs.sort(key=lambda r: (r["order"], r["delta"], r["subset"]))
    srecs = []
    for f in findings:
        srecs.append({
            "triple": [deltas.names[i] for i in f.triple] if deltas is not None else list(f.triple),
            "conditioning": [deltas.names[i] for i in f.conditioning] if deltas is not None else list(f.conditioning),
            "delta": _r(f.delta, units),
            "collider": deltas.names[f.collider] if deltas is not None else f.collider,
            "weakest_pair_info": _r(f.weakest_pair_info, units),
            "suppression_type": f.suppression_type,
        })
    srecs.sort(key=lambda r: (len(r["conditioning"]), r["delta"], r["triple"]))
    erecs = None
    if entropies is not None:
        erecs = sorted(
            ({"subset": [deltas.names[i] for i in A], "order": len(A), "entropy": _r(v, units)}
             for A, v in entropies.items()),
            key=lambda r: (r["order"], r["subset"]),
        )
    return ReportDocument(meta, drecs, srecs, erecs)


def _table(headers: list[str], rows: list[list[str]]) -> list[str]:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(headers)]
    out = ["  ".join(h.rjust(w) if i == len(headers) - 1 else h.ljust(w) for i, (h, w) in enumerate(zip(headers, widths)))]
    out.append("  ".join("-" * w for w in widths))
    for r in rows:
        out.append("  ".join(c.rjust(w) if i == len(r) - 1 else c.ljust(w) for i, (c, w) in enumerate(zip(r, widths))))
    return out


def format_report_text(doc: ReportDocument) -> str:
    units = doc.metadata.get("units", "mbits")
    fmt = "{:.2f}" if units == "mbits" else "{:.6f}"
    lines = []
    for key in sorted(doc.metadata):
        lines.append(f"# {key}: {doc.metadata[key]}")
    if doc.entropy_records:
        lines.append("")
        lines.append(f"entropy ({units})")
        lines.extend(_table(["subset", "h"], [[":".join(r["subset"]), fmt.format(r["entropy"])] for r in doc.entropy_records]))
    if doc.delta_records:
        lines.append("")
        lines.append(f"forward differences ({units})")
        lines.extend(_table(
            ["subset", "order", "delta"],
            [[":".join(r["subset"]), str(r["order"]), fmt.format(r["delta"])] for r in doc.delta_records],
        ))
    lines.append("")
    lines.append(f"synergies: {len(doc.synergy_records)}")
    if doc.synergy_records:
        rows = []
        for r in doc.synergy_records:
            names = [n + "*" if n == r["collider"] else n for n in r["triple"]]
            given = ("|" + ":".join(r["conditioning"])) if r["conditioning"] else ""
            rows.append([" & ".join(names) + given, r["suppression_type"], fmt.format(r["delta"])])
        lines.extend(_table(["triple (collider*)", "suppression", "delta"], rows))
    return "\n".join(lines) + "\n"


def ecdf_points(values: Sequence[float]) -> list[tuple[float, float]]:
    """Empirical CDF as ``(value, fraction <= value)`` steps."""
    v = np.sort(np.asarray(values, dtype=float))
    n = len(v)
    return [(float(x), (i + 1) / n) for i, x in enumerate(v)]


def write_ecdf_csv(values: Sequence[float], path) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["delta", "ecdf"])
    for x, y in ecdf_points(values):
        w.writerow([f"{x:.2f}", f"{y:.6f}"])
    Path(path).write_text(buf.getvalue())
