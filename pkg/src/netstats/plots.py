"""Deterministic plot-data emitters: named numeric columns plus axis scales.

Each builder returns one or more :class:`PlotSeries`; ``to_tsv`` serializes
a series with a single ``#`` header line naming the kind, columns, scales
and annotations.  Rendering to SVG lives in :mod:`netstats.svg`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import stats as _stats
from .graph import (
    Graph,
    GraphError,
    IncompatibleGraphError,
    WeightType,
    largest_connected_component,
    latest_state,
)
from .spectral import (
    DENSE_LIMIT,
    MatrixKind,
    SPECTRUM_K,
    build_operator,
    eig_general,
    eig_symmetric,
)
from .stats import DEFAULT_OPTIONS, Options, Workspace, format_value

SPECTRUM_BINS = 49  # odd, so no bin boundary sits at zero for the normalized matrix


@dataclass(frozen=True)
class PlotSeries:
    kind: str
    columns: dict[str, np.ndarray]
    scales: dict[str, str] = field(default_factory=dict)
    annotations: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise GraphError("plot columns must have equal length")

    def __len__(self):
        return len(next(iter(self.columns.values()))) if self.columns else 0

    def to_tsv(self) -> str:
        names = ",".join(self.columns)
        scales = ",".join(f"{k}:{v}" for k, v in sorted(self.scales.items()))
        notes = "".join(
            f"\t{k}={v}" for k, v in sorted(self.annotations.items())
        )
        header = f"# kind={self.kind}\tcolumns={names}\tscales={scales}{notes}"
        lines = [header]
        cols = list(self.columns.values())
        for i in range(len(self)):
            lines.append("\t".join(format_value(_py(c[i])) for c in cols))
        return "\n".join(lines) + "\n"


def _py(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    return x


def _static(g: Graph) -> Graph:
    return latest_state(g) if g.weights is WeightType.DYNAMIC else g


def plot_temporal(g: Graph, bins: int = 100) -> PlotSeries:
    """Edge counts per uniform time bin over [min, max] timestamp."""
    if g.timestamp is None:
        raise IncompatibleGraphError("temporal distribution requires timestamps")
    ts = g.timestamp
    lo, hi = float(ts.min()), float(ts.max())
    if lo == hi:
        return PlotSeries(
            "temporal-distribution",
            {"time": np.array([lo]), "count": np.array([len(ts)])},
            {"x": "linear", "y": "linear"},
            {"bins": "1"},
        )
    counts, edges = np.histogram(ts, bins=bins, range=(lo, hi))
    return PlotSeries(
        "temporal-distribution",
        {"time": edges[:-1], "count": counts},
        {"x": "linear", "y": "linear"},
        {"bins": str(bins)},
    )


def plot_weight(g: Graph) -> PlotSeries:
    """Frequency of each distinct raw edge weight (ratings stay uncentered)."""
    if not (g.weights.has_weight_column and g.weight is not None):
        raise IncompatibleGraphError("no edge weights to plot")
    values, counts = np.unique(g.weight, return_counts=True)
    return PlotSeries(
        "weight-distribution",
        {"weight": values, "count": counts},
        {"x": "linear", "y": "linear"},
    )


def plot_multiplicity(g: Graph) -> PlotSeries:
    """Frequency of per-pair edge multiplicities, on doubly logarithmic scales."""
    if not g.weights.allows_multi:
        raise IncompatibleGraphError("multiplicity distribution requires multi-edges")
    u, v = g.endpoints()
    if not g.is_directed:
        u, v = np.minimum(u, v), np.maximum(u, v)
    key = u.astype(np.int64) * (g.n + 1) + v
    order = np.argsort(key, kind="stable")
    _, start = np.unique(key[order], return_index=True)
    mult = np.add.reduceat(g.multiplicities[order], np.sort(start))
    values, counts = np.unique(mult, return_counts=True)
    return PlotSeries(
        "multiplicity-distribution",
        {"multiplicity": values, "count": counts},
        {"x": "log", "y": "log"},
    )


def plot_weight_or_multiplicity(g: Graph) -> PlotSeries:
    if g.weights is WeightType.UNWEIGHTED:
        raise IncompatibleGraphError("unweighted networks have no weight distribution")
    if g.weights.has_weight_column:
        return plot_weight(g)
    return plot_multiplicity(g)


def plot_degree(g: Graph) -> tuple[PlotSeries, PlotSeries]:
    """Degree frequency plot and strictly-greater-than cumulative plot."""
    g = _static(g)
    deg = g.degrees
    n = len(deg)
    values, counts = np.unique(deg, return_counts=True)
    nz = values > 0  # zero degree cannot appear on the log axis
    dist = PlotSeries(
        "degree-distribution",
        {"degree": values[nz], "count": counts[nz]},
        {"x": "log", "y": "log"},
        {"zero_degree_nodes": str(int(counts[~nz].sum()))},
    )
    # evaluate P(d > n) at the step points of the curve: each distinct
    # degree and the integer just below it
    sorted_deg = np.sort(deg)
    points = np.unique(np.concatenate([values, values - 1]))
    points = points[points >= 0]
    frac = 1 - np.searchsorted(sorted_deg, points, side="right") / n
    keep = frac > 0
    points, frac = points[keep], frac[keep]
    scales = {"x": "log", "y": "log"}
    notes = {"semantics": "strictly-greater", "zero_tail_dropped": "1"}
    if len(points) == 0 or points.min() <= 0:  # degenerate for log axes
        scales = {"x": "linear", "y": "linear"}
        notes["scale_fallback"] = "nonpositive-values"
    cumulative = PlotSeries(
        "cumulative-degree-distribution",
        {"degree": points, "fraction_greater": frac},
        scales,
        notes,
    )
    return dist, cumulative


def plot_lorenz(g: Graph) -> PlotSeries:
    g = _static(g)
    x, y = _stats.lorenz_curve(g.degrees)
    return PlotSeries(
        "lorenz",
        {"node_fraction": x, "edge_fraction": y},
        {"x": "linear", "y": "linear"},
    )


def plot_out_in(g: Graph) -> PlotSeries:
    g = _static(g)
    if not g.is_directed:
        raise IncompatibleGraphError("out/in comparison requires a directed graph")
    nodes = np.arange(1, g.n + 1)
    return PlotSeries(
        "out-in-comparison",
        {"node": nodes, "outdegree": g.out_degrees, "indegree": g.in_degrees},
        {"x": "linear", "y": "linear"},
    )


def plot_assortativity(g: Graph) -> PlotSeries:
    """Degree vs. the average degree of neighbors, per non-isolated node."""
    ws = Workspace(g)
    pattern = ws.pattern
    deg = ws.g.degrees.astype(np.float64)
    sdeg = np.diff(pattern.indptr)
    neighbor_sum = pattern @ deg
    keep = sdeg > 0
    avg = neighbor_sum[keep] / sdeg[keep]
    return PlotSeries(
        "assortativity-plot",
        {
            "node": np.arange(1, ws.g.n + 1)[keep],
            "degree": deg[keep],
            "neighbor_avg_degree": avg,
        },
        {"x": "log", "y": "log"},
        {"isolated_dropped": str(int((~keep).sum()))},
    )


def plot_clustering_distribution(g: Graph) -> PlotSeries:
    ws = Workspace(g)
    if ws.g.is_bipartite:
        raise IncompatibleGraphError("clustering is undefined for bipartite graphs")
    values = np.sort(_stats._local_clustering_values(ws.pattern))
    distinct, counts = np.unique(values, return_counts=True)
    fraction = np.cumsum(counts) / len(values)
    return PlotSeries(
        "clustering-distribution",
        {"local_clustering": distinct, "fraction_at_most": fraction},
        {"x": "linear", "y": "linear"},
    )


_SPECTRUM_MATRICES = {
    "adjacency": (MatrixKind.ADJACENCY, "largest-absolute"),
    "normalized": (MatrixKind.NORMALIZED, "largest-absolute"),
    "laplacian": (MatrixKind.LAPLACIAN, "smallest"),
}


def plot_spectrum(
    g: Graph,
    matrix: str = "adjacency",
    k: int = SPECTRUM_K,
    opts: Options = DEFAULT_OPTIONS,
) -> tuple[PlotSeries, PlotSeries]:
    """Top-k eigenvalue plot and 49-bin cumulative spectral distribution.

    The cumulative distribution is exact (full dense spectrum) up to the
    dense limit; above it, per-bin [min, max] counts bracket where the
    unresolved eigenvalues can fall.
    """
    topk, cumulative, _ = spectrum_with_result(g, matrix, k, opts)
    return topk, cumulative


def spectrum_with_result(
    g: Graph,
    matrix: str = "adjacency",
    k: int = SPECTRUM_K,
    opts: Options = DEFAULT_OPTIONS,
):
    """Like :func:`plot_spectrum` but also returns the raw eigensolver result."""
    if matrix not in _SPECTRUM_MATRICES:
        raise GraphError(f"unknown spectrum matrix {matrix!r}")
    kind, order = _SPECTRUM_MATRICES[matrix]
    base = _static(g)
    if kind is MatrixKind.LAPLACIAN:
        base = largest_connected_component(base)
    op = build_operator(base, kind)
    k = min(k, op.dim)
    exact = op.dim <= DENSE_LIMIT
    res = eig_symmetric(op, op.dim if exact else k, order,
                        tol=opts.tol, seed=opts.seed)
    values = np.real(res.values)
    shown = values[:k]
    topk = PlotSeries(
        "spectrum-topk",
        {
            "index": np.arange(1, len(shown) + 1),
            "abs_value": np.abs(shown),
            "sign": np.sign(shown).astype(np.int64),
        },
        {"x": "linear", "y": "linear"},
        {"matrix": matrix, "order": order},
    )
    cumulative = _spectrum_cumulative(op, values, exact, matrix)
    return topk, cumulative, res


def _spectrum_cumulative(op, values, exact, matrix) -> PlotSeries:
    dim = op.dim
    if exact:
        lo, hi = float(values.min()), float(values.max())
        unresolved = 0
        region = (0.0, 0.0)
    else:
        bound = op.norm_bound()
        if matrix == "adjacency":
            lo, hi = -bound, bound
            a = float(np.min(np.abs(values)))
            region = (-a, a)
        elif matrix == "normalized":
            lo, hi = -1.0, 1.0
            a = float(np.min(np.abs(values)))
            region = (-a, a)
        else:  # laplacian, smallest-first
            lo, hi = 0.0, bound
            region = (float(values.max()), hi)
        unresolved = dim - len(values)
    if hi == lo:
        hi = lo + 1.0
    edges = np.linspace(lo, hi, SPECTRUM_BINS + 1)
    counts, _ = np.histogram(values, bins=edges)
    cum = np.cumsum(counts)
    right = edges[1:]
    if unresolved:
        cum_min = cum + np.where(right >= region[1], unresolved, 0)
        cum_max = cum + np.where(right >= region[0], unresolved, 0)
        # the final bin always contains every eigenvalue
        cum_min[-1] = cum_max[-1] = dim
    else:
        cum_min = cum_max = cum
    return PlotSeries(
        "spectrum-cumulative",
        {"bin_right": right, "cum_count_min": cum_min, "cum_count_max": cum_max},
        {"x": "linear", "y": "linear"},
        {
            "matrix": matrix,
            "bins": str(SPECTRUM_BINS),
            "method": "exact" if exact else "estimated",
            "unresolved": str(unresolved),
        },
    )


def plot_complex_eigenvalues(
    g: Graph, k: int = SPECTRUM_K, opts: Options = DEFAULT_OPTIONS
) -> PlotSeries:
    """Top-k complex adjacency eigenvalues of a directed graph."""
    g = _static(g)
    if not g.is_directed:
        raise IncompatibleGraphError("complex eigenvalues require a directed graph")
    op = build_operator(g, MatrixKind.ADJACENCY)
    res = eig_general(op, min(k, op.dim), tol=opts.tol, seed=opts.seed)
    return PlotSeries(
        "complex-eigenvalues",
        {"real": res.values.real, "imag": res.values.imag},
        {"x": "linear", "y": "linear"},
        {"k": str(len(res.values))},
    )


def plot_distance_distribution(
    g: Graph,
    snapshots: list[float] | None = None,
    opts: Options = DEFAULT_OPTIONS,
) -> PlotSeries:
    """Cumulative fraction of node pairs within each hop count.

    With snapshot timestamps, the same curve is computed on the graph cut
    at each time, long-format: (time, hop, fraction).
    """
    if snapshots is None:
        ws = Workspace(g, opts)
        data = ws.hops
        frac = np.cumsum(data.counts) / data.counts.sum()
        return PlotSeries(
            "distance-distribution",
            {"hop": np.arange(len(data.counts)), "fraction_within": frac},
            {"x": "linear", "y": "linear"},
            {
                "includes_self_pairs": "true",
                "method": "exact" if data.exact else "estimated",
            },
        )
    if g.timestamp is None:
        raise IncompatibleGraphError("temporal distance plot requires timestamps")
    times, hops, fracs = [], [], []
    method = "exact"
    for cut in snapshots:
        keep = g.timestamp <= cut
        sub = Graph(
            fmt=g.fmt, weights=g.weights, n1=g.n1, n2=g.n2,
            src=g.src[keep], dst=g.dst[keep],
            weight=g.weight[keep] if g.weight is not None else None,
            timestamp=g.timestamp[keep], tags=g.tags,
        )
        if len(sub.src) == 0:
            continue
        ws = Workspace(sub, opts)
        data = ws.hops
        frac = np.cumsum(data.counts) / data.counts.sum()
        if not data.exact:
            method = "estimated"
        for h, f in enumerate(frac):
            times.append(cut)
            hops.append(h)
            fracs.append(f)
    return PlotSeries(
        "temporal-distance-distribution",
        {"time": np.array(times), "hop": np.array(hops), "fraction_within": np.array(fracs)},
        {"x": "linear", "y": "linear"},
        {"includes_self_pairs": "true", "method": method},
    )


_DRAWING_MATRICES = {
    "A": (MatrixKind.ADJACENCY, "drawing-A"),
    "N": (MatrixKind.NORMALIZED, "drawing-N"),
    "L": (MatrixKind.LAPLACIAN, "drawing-L"),
}


def draw_graph(g: Graph, matrix: str = "A", opts: Options = DEFAULT_OPTIONS) -> PlotSeries:
    """Spectral layout: two eigenvectors give the (x, y) node coordinates.

    Adjacency and normalized layouts use the two eigenvectors of largest
    absolute eigenvalue; the Laplacian layout uses the eigenvectors of the
    two smallest nonzero eigenvalues.  Disconnected inputs are drawn on
    their largest component (annotated).
    """
    if matrix not in _DRAWING_MATRICES:
        raise GraphError(f"unknown drawing matrix {matrix!r}")
    kind, plot_kind = _DRAWING_MATRICES[matrix]
    base = _static(g)
    restricted = largest_connected_component(base)
    annotations = {"matrix": matrix}
    if restricted.n != base.n:
        annotations["restricted_to_lcc"] = "true"
    op = build_operator(restricted, kind)
    if op.dim < 3:
        raise IncompatibleGraphError("spectral drawings need at least 3 nodes")
    if kind is MatrixKind.LAPLACIAN:
        res = eig_symmetric(op, 3, "smallest", tol=opts.tol, seed=opts.seed)
        vx, vy = res.vectors[:, 1], res.vectors[:, 2]  # skip the zero eigenvector
    else:
        res = eig_symmetric(op, 2, "largest-absolute", tol=opts.tol, seed=opts.seed)
        vx, vy = res.vectors[:, 0], res.vectors[:, 1]
    vx, vy = _fix_sign(vx), _fix_sign(vy)
    node_ids = op.nodes
    if restricted.node_origin is not None:
        node_ids = restricted.node_origin[node_ids - 1]
    return PlotSeries(
        plot_kind,
        {"node": node_ids, "x": vx, "y": vy},
        {"x": "linear", "y": "linear"},
        annotations,
    )


def _fix_sign(vec: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(vec)))
    return -vec if vec[i] < 0 else vec.copy()
