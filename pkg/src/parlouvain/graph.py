"""Graph containers, edge-list ingestion and CSR construction."""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

VERTEX_DTYPE = np.uint32
WEIGHT_DTYPE = np.float32
OFFSET_DTYPE = np.int64

# Reserved as the empty-slot key in the compact hashtables.
SENTINEL = np.iinfo(VERTEX_DTYPE).max


class GraphFormatError(ValueError):
    """Raised when an input file cannot be parsed."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
        self.path = path
        self.line = line


@dataclass(frozen=True)
class EdgeList:
    """Weighted (source, target, weight) triples over ``num_vertices`` vertices.

    ``symmetric`` records that each off-diagonal entry stands for both
    directions (MatrixMarket ``symmetric`` banner); it only affects how the
    list is written back out.
    """

    num_vertices: int
    sources: np.ndarray
    targets: np.ndarray
    weights: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        src = np.ascontiguousarray(self.sources, dtype=VERTEX_DTYPE)
        dst = np.ascontiguousarray(self.targets, dtype=VERTEX_DTYPE)
        w = np.ascontiguousarray(self.weights, dtype=WEIGHT_DTYPE)
        if not (src.shape == dst.shape == w.shape) or src.ndim != 1:
            raise ValueError("sources, targets and weights must be 1-d arrays of equal length")
        if self.num_vertices < 0:
            raise ValueError("num_vertices must be non-negative")
        if self.num_vertices >= SENTINEL:
            raise ValueError(f"at most {SENTINEL - 1} vertices are supported")
        if src.size:
            if max(int(src.max()), int(dst.max())) >= self.num_vertices:
                raise ValueError("vertex id out of range")
            if not np.all(np.isfinite(w)) or np.any(w < 0):
                raise ValueError("weights must be finite and non-negative")
        object.__setattr__(self, "sources", src)
        object.__setattr__(self, "targets", dst)
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return int(self.sources.size)

    @classmethod
    def from_triples(cls, num_vertices: int, triples, symmetric: bool = False) -> "EdgeList":
        triples = list(triples)
        if not triples:
            return cls(num_vertices, np.empty(0), np.empty(0), np.empty(0), symmetric)
        src, dst, w = zip(*[(t[0], t[1], t[2] if len(t) > 2 else 1.0) for t in triples])
        return cls(num_vertices, np.array(src), np.array(dst), np.array(w), symmetric)

    def triples(self) -> list[tuple[int, int, float]]:
        return [
            (int(s), int(t), float(w))
            for s, t, w in zip(self.sources, self.targets, self.weights)
        ]


@dataclass(frozen=True)
class CsrGraph:
    """Symmetric weighted graph in compressed sparse row form.

    Every undirected edge is stored as two arcs; a self-loop is a single arc.
    ``total_weight`` is m, half the sum of all arc weights.
    """

    offsets: np.ndarray
    edges: np.ndarray
    weights: np.ndarray
    total_weight: float = field(default=-1.0)

    def __post_init__(self):
        offsets = np.ascontiguousarray(self.offsets, dtype=OFFSET_DTYPE)
        edges = np.ascontiguousarray(self.edges, dtype=VERTEX_DTYPE)
        weights = np.ascontiguousarray(self.weights, dtype=WEIGHT_DTYPE)
        if offsets.ndim != 1 or offsets.size < 1 or offsets[0] != 0:
            raise ValueError("offsets must start at 0")
        if offsets[-1] != edges.size or edges.shape != weights.shape:
            raise ValueError("offsets[-1] must equal the number of arcs")
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "weights", weights)
        if self.total_weight < 0:
            object.__setattr__(
                self, "total_weight", float(weights.sum(dtype=np.float64)) / 2.0
            )

    @property
    def num_vertices(self) -> int:
        return int(self.offsets.size - 1)

    @property
    def num_arcs(self) -> int:
        return int(self.edges.size)

    @property
    def num_edges(self) -> int:
        """Undirected edge count, |E| as reported in dataset tables."""
        loops = int(np.count_nonzero(self.edges == self.sources()))
        return (self.num_arcs - loops) // 2 + loops

    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def degree(self, i: int) -> int:
        return int(self.offsets[i + 1] - self.offsets[i])

    def neighbors(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.offsets[i], self.offsets[i + 1]
        return self.edges[lo:hi], self.weights[lo:hi]

    def sources(self) -> np.ndarray:
        """Source vertex of every arc, parallel to ``edges``."""
        return np.repeat(
            np.arange(self.num_vertices, dtype=VERTEX_DTYPE), self.degrees()
        )

    def to_edge_list(self) -> EdgeList:
        """Every arc as a directed triple (already symmetric)."""
        return EdgeList(self.num_vertices, self.sources(), self.edges, self.weights)


@dataclass
class HoleyCsr:
    """Over-allocated CSR: vertex ``i`` owns ``offsets[i]:offsets[i+1]`` but
    only the first ``fill_counts[i]`` slots of that span hold arcs."""

    offsets: np.ndarray
    edges: np.ndarray
    weights: np.ndarray
    fill_counts: np.ndarray

    @classmethod
    def allocate(cls, spans: np.ndarray) -> "HoleyCsr":
        spans = np.asarray(spans, dtype=OFFSET_DTYPE)
        offsets = np.zeros(spans.size + 1, dtype=OFFSET_DTYPE)
        np.cumsum(spans, out=offsets[1:])
        total = int(offsets[-1])
        return cls(
            offsets,
            np.zeros(total, dtype=VERTEX_DTYPE),
            np.zeros(total, dtype=WEIGHT_DTYPE),
            np.zeros(spans.size, dtype=OFFSET_DTYPE),
        )

    @property
    def num_vertices(self) -> int:
        return int(self.offsets.size - 1)

    def check(self) -> None:
        spans = np.diff(self.offsets)
        if np.any(self.fill_counts < 0) or np.any(self.fill_counts > spans):
            raise ValueError("fill count exceeds allocated span")


def compact_holey(h: HoleyCsr, total_weight: float = -1.0) -> CsrGraph:
    """Squeeze out the gaps of a holey CSR, keeping per-vertex arc order."""
    fills = np.asarray(h.fill_counts, dtype=OFFSET_DTYPE)
    offsets = np.zeros(fills.size + 1, dtype=OFFSET_DTYPE)
    np.cumsum(fills, out=offsets[1:])
    starts = np.asarray(h.offsets[:-1], dtype=OFFSET_DTYPE)
    # index of every written slot, in vertex order then slot order
    idx = np.repeat(starts - offsets[:-1], fills) + np.arange(offsets[-1], dtype=OFFSET_DTYPE)
    return CsrGraph(offsets, h.edges[idx], h.weights[idx], total_weight)


def build_csr(el: EdgeList, symmetrize: bool = True) -> CsrGraph:
    """Build a CSR graph; parallel arcs are merged by summing their weights.

    With ``symmetrize`` each off-diagonal triple yields arcs in both
    directions. Without it the triples are taken as arcs verbatim, so the
    caller is responsible for symmetry.
    """
    n = el.num_vertices
    src = el.sources.astype(np.int64)
    dst = el.targets.astype(np.int64)
    w = el.weights.astype(np.float64)
    if symmetrize:
        off = src != dst
        src, dst = np.concatenate([src, dst[off]]), np.concatenate([dst, src[off]])
        w = np.concatenate([w, w[off]])
    key = src * max(n, 1) + dst
    uniq, inverse = np.unique(key, return_inverse=True)
    merged = np.zeros(uniq.size, dtype=np.float64)
    np.add.at(merged, inverse, w)
    arc_src = uniq // max(n, 1)
    arc_dst = uniq % max(n, 1)
    offsets = np.zeros(n + 1, dtype=OFFSET_DTYPE)
    np.cumsum(np.bincount(arc_src, minlength=n), out=offsets[1:])
    return CsrGraph(offsets, arc_dst, merged.astype(WEIGHT_DTYPE), float(merged.sum()) / 2.0)


def vertex_weights(g: CsrGraph) -> np.ndarray:
    """Weighted degree K of every vertex, in 64-bit precision."""
    w = g.weights.astype(np.float64)
    # bincount rather than reduceat: reduceat mishandles empty rows
    k = np.bincount(g.sources(), weights=w, minlength=g.num_vertices)
    return k


# --- file formats -----------------------------------------------------------


def _detect_format(path: str) -> str:
    ext = os.path.splitext(path)[1].lower()
    return "mtx" if ext in (".mtx", ".mm") else "tsv"


def _normalize_format(fmt: str | None, path: str) -> str:
    if fmt is None or fmt == "auto":
        return _detect_format(path)
    fmt = fmt.lower()
    if fmt in ("mtx", "matrix-market", "matrixmarket"):
        return "mtx"
    if fmt in ("tsv", "whitespace-tsv", "txt", "edgelist"):
        return "tsv"
    raise ValueError(f"unknown graph format {fmt!r}")


def _parse_weight(tok: str, path: str, lineno: int) -> float:
    try:
        w = float(tok)
    except ValueError:
        raise GraphFormatError(f"bad weight {tok!r}", path, lineno) from None
    if not np.isfinite(w):
        raise GraphFormatError(f"non-finite weight {tok!r}", path, lineno)
    if w < 0:
        raise GraphFormatError(f"negative weight {tok!r}", path, lineno)
    return w


def _parse_id(tok: str, path: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise GraphFormatError(f"bad vertex id {tok!r}", path, lineno) from None


def _read_mtx(path: str) -> EdgeList:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].lower().startswith("%%matrixmarket"):
        raise GraphFormatError("missing %%MatrixMarket banner", path, 1)
    banner = lines[0].lower().split()
    if len(banner) < 5 or banner[1] != "matrix" or banner[2] != "coordinate":
        raise GraphFormatError("only 'matrix coordinate' files are supported", path, 1)
    field_, symmetry = banner[3], banner[4]
    if field_ not in ("real", "integer", "pattern", "double"):
        raise GraphFormatError(f"unsupported field {field_!r}", path, 1)
    if symmetry not in ("general", "symmetric"):
        raise GraphFormatError(f"unsupported symmetry {symmetry!r}", path, 1)

    size_line = None
    src, dst, wts = [], [], []
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        toks = line.split()
        if size_line is None:
            if len(toks) != 3:
                raise GraphFormatError("expected 'rows cols nnz' size line", path, lineno)
            rows, cols, nnz = (_parse_id(t, path, lineno) for t in toks)
            size_line = (rows, cols, nnz)
            n = max(rows, cols)
            continue
        if len(toks) < 2:
            raise GraphFormatError("expected 'row col [value]'", path, lineno)
        i, j = _parse_id(toks[0], path, lineno), _parse_id(toks[1], path, lineno)
        if not (1 <= i <= n and 1 <= j <= n):
            raise GraphFormatError(f"vertex id out of bounds 1..{n}", path, lineno)
        w = 1.0
        if field_ != "pattern" and len(toks) > 2:
            w = _parse_weight(toks[2], path, lineno)
        src.append(i - 1)
        dst.append(j - 1)
        wts.append(w)
    if size_line is None:
        raise GraphFormatError("missing size line", path, len(lines))
    if len(src) != size_line[2]:
        raise GraphFormatError(
            f"declared {size_line[2]} entries but found {len(src)}", path, len(lines)
        )
    return EdgeList(n, np.array(src), np.array(dst), np.array(wts), symmetry == "symmetric")


def _read_tsv(path: str) -> EdgeList:
    src, dst, wts = [], [], []
    declared = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#") or line.startswith("%"):
                toks = line.lstrip("#%").split()
                if len(toks) == 2 and toks[0] == "vertices" and toks[1].isdigit():
                    declared = int(toks[1])
                continue
            toks = line.split()
            if len(toks) not in (2, 3):
                raise GraphFormatError("expected 'src dst [weight]'", path, lineno)
            i, j = _parse_id(toks[0], path, lineno), _parse_id(toks[1], path, lineno)
            if i < 0 or j < 0:
                raise GraphFormatError("negative vertex id", path, lineno)
            if declared is not None and max(i, j) >= declared:
                raise GraphFormatError(f"vertex id out of bounds 0..{declared - 1}", path, lineno)
            w = _parse_weight(toks[2], path, lineno) if len(toks) == 3 else 1.0
            src.append(i)
            dst.append(j)
            wts.append(w)
    n = max(max(src, default=-1), max(dst, default=-1)) + 1
    if declared is not None:
        n = declared
    return EdgeList(n, np.array(src), np.array(dst), np.array(wts))


def load_edge_list(path: str, format: str | None = None) -> EdgeList:
    """Read a MatrixMarket coordinate file or a whitespace ``src dst [w]`` file.

    Ids come back 0-based; missing weights default to 1. A ``symmetric``
    MatrixMarket banner keeps each off-diagonal entry once.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    fmt = _normalize_format(format, path)
    try:
        return _read_mtx(path) if fmt == "mtx" else _read_tsv(path)
    except GraphFormatError:
        raise
    except ValueError as exc:
        raise GraphFormatError(str(exc), path) from None


def write_matrix_market(el: EdgeList, path: str) -> None:
    symmetry = "symmetric" if el.symmetric else "general"
    with open(path, "w") as fh:
        fh.write(f"%%MatrixMarket matrix coordinate real {symmetry}\n")
        fh.write(f"{el.num_vertices} {el.num_vertices} {len(el)}\n")
        for s, t, w in zip(el.sources, el.targets, el.weights):
            fh.write(f"{int(s) + 1} {int(t) + 1} {float(w):.9g}\n")


def write_tsv(el: EdgeList, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(f"# vertices {el.num_vertices}\n")
        for s, t, w in zip(el.sources, el.targets, el.weights):
            fh.write(f"{int(s)}\t{int(t)}\t{float(w):.9g}\n")


def save_edge_list(el: EdgeList, path: str, format: str | None = None) -> None:
    fmt = _normalize_format(format, path)
    (write_matrix_market if fmt == "mtx" else write_tsv)(el, path)
