"""The network statistics catalog, node features and distance machinery.

Every statistic is addressed by its internal name (``"clusco"``,
``"alcon"``, ...) through :func:`compute` / :func:`compute_all`, and returns
a :class:`StatisticValue` that records which transform of the graph it was
computed on and whether it was estimated.  Dynamic event logs are replayed
to their latest state before anything is measured.

Count statistics (wedges, claws, crosses, triangles, squares, 4-tours)
operate on the underlying simple loopless graph; distance and algebraic
statistics operate on the largest connected component, ignoring edge
directions for connectivity and shortest paths.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components, dijkstra

from . import spectral
from .graph import (
    Format,
    Graph,
    GraphError,
    IncompatibleGraphError,
    WeightType,
    largest_connected_component,
    latest_state,
    strip_weights,
)
from .spectral import MatrixKind, build_operator, eig_symmetric

FULL = "full graph"
LCC = "largest component"
SIMPLE = "underlying simple graph"


@dataclass(frozen=True)
class Options:
    """Thresholds shared by the estimated statistics; all deterministic."""

    exact_threshold: int = 20000  # all-pairs BFS above this many nodes is sampled
    sample_sources: int = 1000
    tol: float = 1e-8
    seed: int = 42
    frustration_budget: float = 5.0  # seconds for the branch-and-bound search


DEFAULT_OPTIONS = Options()


@dataclass(frozen=True)
class StatisticValue:
    name: str
    value: float
    computed_on: str = FULL
    method: str = "exact"
    parameters: dict = field(default_factory=dict)


_REGISTRY: dict[str, "callable"] = {}


def statistic(name):
    """Register a statistic; the wrapped function accepts a Graph or Workspace."""

    def deco(fn):
        def wrapper(arg, opts: Options = DEFAULT_OPTIONS):
            ws = arg if isinstance(arg, Workspace) else Workspace(arg, opts)
            return fn(ws)

        wrapper.__name__ = fn.__name__
        wrapper.__doc__ = fn.__doc__
        _REGISTRY[name] = wrapper
        return wrapper

    return deco


def statistic_names() -> tuple[str, ...]:
    return tuple(_REGISTRY)


def compute(g: Graph, name: str, opts: Options = DEFAULT_OPTIONS) -> StatisticValue:
    """Compute one statistic by internal name."""
    if name not in _REGISTRY:
        raise KeyError(name)
    return _REGISTRY[name](Workspace(g, opts))


def compute_all(
    g: Graph, opts: Options = DEFAULT_OPTIONS, names=None
) -> list[tuple[str, StatisticValue | Exception]]:
    """Compute many statistics over one shared workspace.

    Inapplicable or failing statistics are reported as the raised exception
    instead of aborting the batch.
    """
    ws = Workspace(g, opts)
    rows = []
    for name in names or statistic_names():
        fn = _REGISTRY.get(name)
        if fn is None:
            raise KeyError(name)
        try:
            rows.append((name, fn(ws)))
        except Exception as exc:  # batch runs must not abort
            rows.append((name, exc))
    return rows


class Workspace:
    """Shared per-graph caches so a batch run does each heavy pass once."""

    def __init__(self, g: Graph, opts: Options = DEFAULT_OPTIONS):
        if g.n == 0:
            raise GraphError("statistics are undefined for the empty graph")
        self.raw = g
        self.opts = opts

    @cached_property
    def g(self) -> Graph:
        return latest_state(self.raw) if self.raw.weights is WeightType.DYNAMIC else self.raw

    @cached_property
    def pattern(self):
        return self.g.pattern

    @cached_property
    def sdeg(self) -> np.ndarray:
        return np.diff(self.pattern.indptr).astype(np.int64)

    @cached_property
    def lcc(self) -> Graph:
        return largest_connected_component(self.g)

    @cached_property
    def sym_lcc(self) -> Graph:
        """Largest component with edge orientations folded away."""
        return _as_undirected(self.lcc)

    @cached_property
    def hops(self) -> "HopData":
        return _hop_data(self.lcc.pattern, self.opts)

    @cached_property
    def bip_base(self) -> Graph:
        """Largest component, weights stripped and loops dropped (bipartivity base)."""
        return _drop_loops(strip_weights(self.sym_lcc))

    @cached_property
    def triangle_count(self) -> int:
        return _triangle_count(self.pattern)

    @cached_property
    def tour4_trace(self) -> int:
        return _tour4_trace(self.pattern)

    @cached_property
    def wedge_count(self) -> int:
        return _binom_sum(np.bincount(self.sdeg), 2)


def _as_undirected(g: Graph) -> Graph:
    """Forget edge orientations; reciprocal edge pairs become parallel edges."""
    if not g.is_directed:
        return g
    remap = {
        WeightType.UNWEIGHTED: WeightType.POSITIVE,
        WeightType.POSWEIGHTED: WeightType.MULTIPOSWEIGHTED,
        WeightType.SIGNED: WeightType.MULTISIGNED,
        WeightType.WEIGHTED: WeightType.MULTIWEIGHTED,
    }
    return Graph(
        fmt=Format.UNDIRECTED,
        weights=remap.get(g.weights, g.weights),
        n1=g.n1, n2=g.n2, src=g.src, dst=g.dst,
        weight=g.weight, timestamp=g.timestamp, tags=g.tags,
    )


def _drop_loops(g: Graph) -> Graph:
    if g.is_bipartite or not len(g.src) or not np.any(g.src == g.dst):
        return g
    keep = g.src != g.dst
    return Graph(
        fmt=g.fmt, weights=g.weights, n1=g.n1, n2=g.n2,
        src=g.src[keep], dst=g.dst[keep],
        weight=g.weight[keep] if g.weight is not None else None,
        timestamp=g.timestamp[keep] if g.timestamp is not None else None,
        tags=g.tags,
    )


def _unique_pair_count(g: Graph) -> int:
    if not len(g.src):
        return 0
    u, v = g.endpoints()
    if not g.is_directed:
        u, v = np.minimum(u, v), np.maximum(u, v)
    return len(np.unique(u.astype(np.int64) * (g.n + 1) + v))


def _nan(name, computed_on=FULL, **params) -> StatisticValue:
    return StatisticValue(name, float("nan"), computed_on, "exact", params)


# -- basic statistics --------------------------------------------------------


@statistic("size")
def stat_size(ws) -> StatisticValue:
    g = ws.g
    params = {"n1": g.n1, "n2": g.n2} if g.is_bipartite else {}
    return StatisticValue("size", g.n, parameters=params)


@statistic("volume")
def stat_volume(ws) -> StatisticValue:
    return StatisticValue("volume", ws.g.m)


@statistic("uniquevolume")
def stat_uniquevolume(ws) -> StatisticValue:
    return StatisticValue("uniquevolume", _unique_pair_count(ws.g))


@statistic("weight")
def stat_weight(ws) -> StatisticValue:
    return StatisticValue("weight", float(np.abs(ws.g.effective_weights).sum()))


@statistic("avgdegree")
def stat_avgdegree(ws) -> StatisticValue:
    g = ws.g
    params = {}
    if g.is_bipartite:
        params = {"d1": g.m / g.n1 if g.n1 else float("nan"),
                  "d2": g.m / g.n2 if g.n2 else float("nan")}
    return StatisticValue("avgdegree", 2 * g.m / g.n, parameters=params)


@statistic("fill")
def stat_fill(ws) -> StatisticValue:
    g = ws.g
    unique_m = _unique_pair_count(g)
    loops = g.allows_loops or (len(g.src) and not g.is_bipartite
                               and bool(np.any(g.src == g.dst)))
    n = g.n
    if g.is_bipartite:
        possible = g.n1 * g.n2
        value = unique_m / possible if possible else float("nan")
    elif g.is_directed:
        possible = n * n if loops else n * (n - 1)
        value = unique_m / possible if possible else float("nan")
    else:
        possible = n * (n + 1) if loops else n * (n - 1)
        value = 2 * unique_m / possible if possible else float("nan")
    return StatisticValue("fill", value)


@statistic("maxdegree")
def stat_maxdegree(ws) -> StatisticValue:
    return StatisticValue("maxdegree", int(ws.g.degrees.max()))


@statistic("relmaxdegree")
def stat_relmaxdegree(ws) -> StatisticValue:
    g = ws.g
    avg = 2 * g.m / g.n
    value = float(g.degrees.max()) / avg if avg else float("nan")
    return StatisticValue("relmaxdegree", value)


@statistic("reciprocity")
def stat_reciprocity(ws) -> StatisticValue:
    g = ws.g
    if not g.is_directed:
        raise IncompatibleGraphError("reciprocity requires a directed graph")
    if g.m == 0:
        return _nan("reciprocity")
    pairs = set(zip(g.src.tolist(), g.dst.tolist()))
    mult = g.multiplicities
    reciprocated = sum(
        int(mult[i])
        for i, (u, v) in enumerate(zip(g.src.tolist(), g.dst.tolist()))
        if (v, u) in pairs
    )
    return StatisticValue("reciprocity", reciprocated / g.m)


@statistic("negativity")
def stat_negativity(ws) -> StatisticValue:
    g = ws.g
    if not g.weights.allows_negative:
        raise IncompatibleGraphError("negativity requires signed or rating weights")
    if g.m == 0:
        return _nan("negativity")
    return StatisticValue("negativity", float(np.sum(g.effective_weights < 0)) / g.m)


# -- connectivity ------------------------------------------------------------


@statistic("coco")
def stat_coco(ws) -> StatisticValue:
    sizes = np.bincount(ws.g.component_labels)
    return StatisticValue("coco", int(sizes.max()))


@statistic("cocorel")
def stat_cocorel(ws) -> StatisticValue:
    return StatisticValue("cocorel", stat_coco(ws).value / ws.g.n)


@statistic("cocorelinv")
def stat_cocorelinv(ws) -> StatisticValue:
    return StatisticValue("cocorelinv", 1 - stat_coco(ws).value / ws.g.n)


@statistic("cocos")
def stat_cocos(ws) -> StatisticValue:
    g = ws.g
    if not g.is_directed:
        raise IncompatibleGraphError("strong components require a directed graph")
    adj = sparse.coo_array(
        (np.ones(len(g.src)), (g.src - 1, g.dst - 1)), shape=(g.n, g.n)
    ).tocsr()
    _, labels = connected_components(adj, directed=True, connection="strong")
    return StatisticValue("cocos", int(np.bincount(labels).max()))


# -- count statistics --------------------------------------------------------


def _binom_sum(degree_hist, k) -> int:
    return sum(int(cnt) * math.comb(int(d), k) for d, cnt in enumerate(degree_hist) if cnt)


@statistic("twostars")
def stat_twostars(ws) -> StatisticValue:
    return StatisticValue("twostars", ws.wedge_count, SIMPLE)


@statistic("threestars")
def stat_threestars(ws) -> StatisticValue:
    hist = np.bincount(ws.sdeg)
    return StatisticValue("threestars", _binom_sum(hist, 3), SIMPLE)


@statistic("fourstars")
def stat_fourstars(ws) -> StatisticValue:
    hist = np.bincount(ws.sdeg)
    return StatisticValue("fourstars", _binom_sum(hist, 4), SIMPLE)


@statistic("triangles")
def stat_triangles(ws) -> StatisticValue:
    return StatisticValue("triangles", ws.triangle_count, SIMPLE)


@statistic("squares")
def stat_squares(ws) -> StatisticValue:
    return StatisticValue("squares", _square_count(ws), SIMPLE)


@statistic("tour4")
def stat_tour4(ws) -> StatisticValue:
    q = _square_count(ws)
    m = ws.pattern.nnz // 2
    return StatisticValue("tour4", 8 * q + 4 * ws.wedge_count + 2 * m, SIMPLE)


_CHUNK_WORK = 4_000_000  # bound on intermediate sparse-product entries


def _row_chunks(work: np.ndarray):
    n = len(work)
    start = 0
    while start < n:
        end = start + 1
        acc = int(work[start])
        while end < n and acc + work[end] <= _CHUNK_WORK:
            acc += int(work[end])
            end += 1
        yield start, end
        start = end


def _triangle_count(pattern) -> int:
    """Exact triangle count via a degree-ordered orientation."""
    n = pattern.shape[0]
    if pattern.nnz == 0:
        return 0
    upper = sparse.triu(pattern, k=1).tocoo()
    i, j = upper.row, upper.col
    deg = np.diff(pattern.indptr)
    swap = (deg[i] > deg[j]) | ((deg[i] == deg[j]) & (i > j))
    a = np.where(swap, j, i)
    b = np.where(swap, i, j)
    fwd = sparse.coo_array(
        (np.ones(len(a), dtype=np.int64), (a, b)), shape=(n, n)
    ).tocsr()
    out_work = fwd @ np.diff(fwd.indptr).astype(np.int64)
    total = 0
    for lo, hi in _row_chunks(out_work):
        block = fwd[lo:hi] @ fwd
        total += int(block.multiply(fwd[lo:hi]).sum())
    return total


def _tour4_trace(pattern) -> int:
    """Tr(A^4) of the simple loopless graph = sum of squared wedge counts."""
    if pattern.nnz == 0:
        return 0
    deg = np.diff(pattern.indptr).astype(np.int64)
    work = pattern @ deg
    total = 0
    for lo, hi in _row_chunks(work):
        block = pattern[lo:hi] @ pattern
        total += int(np.sum(block.data.astype(np.int64) ** 2))
    return total


def _square_count(ws) -> int:
    m = ws.pattern.nnz // 2
    q, rem = divmod(ws.tour4_trace - 4 * ws.wedge_count - 2 * m, 8)
    assert rem == 0, "tour identity violated"
    return q


def _triangles_per_node(pattern) -> np.ndarray:
    if pattern.nnz == 0:
        return np.zeros(pattern.shape[0], dtype=np.int64)
    deg = np.diff(pattern.indptr).astype(np.int64)
    work = pattern @ deg
    out = np.zeros(pattern.shape[0], dtype=np.int64)
    for lo, hi in _row_chunks(work):
        block = pattern[lo:hi] @ pattern
        paired = block.multiply(pattern[lo:hi]).sum(axis=1)
        out[lo:hi] = np.asarray(paired).ravel() // 2
    return out


# -- degree distribution -----------------------------------------------------


@statistic("power")
def stat_power(ws) -> StatisticValue:
    deg = ws.g.degrees
    deg = deg[deg > 0]
    if len(deg) == 0:
        return _nan("power")
    dmin = int(deg.min())
    logsum = float(np.log(deg / dmin).sum())
    value = float("inf") if logsum == 0 else 1 + len(deg) / logsum
    return StatisticValue("power", value, parameters={"dmin": dmin})


@statistic("gini")
def stat_gini(ws) -> StatisticValue:
    deg = np.sort(ws.g.degrees)
    n = len(deg)
    total = deg.sum()
    if total == 0:
        return _nan("gini")
    ranks = np.arange(1, n + 1, dtype=np.float64)
    return StatisticValue("gini", float(2 * (ranks * deg).sum() / (n * total) - (n + 1) / n))


@statistic("dentropyn")
def stat_dentropyn(ws) -> StatisticValue:
    deg = ws.g.degrees.astype(np.float64)
    two_m = deg.sum()
    n = len(deg)
    if two_m == 0 or n < 2:
        return _nan("dentropyn")
    p = deg[deg > 0] / two_m
    return StatisticValue("dentropyn", float(-(p * np.log(p)).sum() / math.log(n)))


def lorenz_curve(degrees: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vertices (X, Y) of the Lorenz curve of a degree sequence, from (0,0) to (1,1)."""
    deg = np.sort(np.asarray(degrees, dtype=np.float64))
    n = len(deg)
    total = deg.sum()
    if n == 0 or total == 0:
        raise GraphError("Lorenz curve needs a nonzero degree sequence")
    x = np.arange(n + 1) / n
    y = np.concatenate([[0.0], np.cumsum(deg) / total])
    return x, y


@statistic("own")
def stat_own(ws) -> StatisticValue:
    deg = ws.g.degrees
    if deg.sum() == 0:
        return _nan("own")
    x, y = lorenz_curve(deg)
    # intersection of the curve with y = 1 - x; g(x) = y(x) + x - 1 is increasing
    gvals = y + x - 1
    i = int(np.searchsorted(gvals > 0, True))
    if i == 0:
        return StatisticValue("own", float(y[0]))
    x0, x1, y0, y1 = x[i - 1], x[i], y[i - 1], y[i]
    slope = (y1 - y0) / (x1 - x0)
    xi = (1 - y0 + slope * x0) / (1 + slope)
    return StatisticValue("own", float(1 - xi))


@statistic("assortativity")
def stat_assortativity(ws) -> StatisticValue:
    g = ws.g
    if g.is_bipartite:
        raise IncompatibleGraphError("assortativity is undefined for bipartite graphs")
    if g.m == 0:
        return _nan("assortativity")
    w = g.multiplicities.astype(np.float64)
    if g.is_directed:
        x = g.out_degrees[g.src - 1].astype(np.float64)
        y = g.in_degrees[g.dst - 1].astype(np.float64)
    else:
        deg = g.degrees.astype(np.float64)
        x = np.concatenate([deg[g.src - 1], deg[g.dst - 1]])
        y = np.concatenate([deg[g.dst - 1], deg[g.src - 1]])
        w = np.concatenate([w, w])
    return StatisticValue("assortativity", _weighted_pearson(x, y, w))


def _weighted_pearson(x, y, w) -> float:
    total = w.sum()
    mx, my = (w * x).sum() / total, (w * y).sum() / total
    cov = (w * (x - mx) * (y - my)).sum() / total
    vx = (w * (x - mx) ** 2).sum() / total
    vy = (w * (y - my) ** 2).sum() / total
    if vx <= 0 or vy <= 0:
        return float("nan")
    return float(cov / math.sqrt(vx * vy))


# -- clustering --------------------------------------------------------------


def _require_unipartite(g, what):
    if g.is_bipartite:
        raise IncompatibleGraphError(f"{what} is undefined for bipartite graphs")


@statistic("clusco")
def stat_clusco(ws) -> StatisticValue:
    _require_unipartite(ws.g, "the clustering coefficient")
    s = ws.wedge_count
    value = float("nan") if s == 0 else 3 * ws.triangle_count / s
    return StatisticValue("clusco", value, SIMPLE)


@statistic("clusco2")
def stat_clusco2(ws) -> StatisticValue:
    _require_unipartite(ws.g, "the clustering coefficient")
    values = _local_clustering_values(ws.pattern)
    return StatisticValue("clusco2", float(values.mean()), SIMPLE)


def _local_clustering_values(pattern, min_degree_two: bool = False) -> np.ndarray:
    deg = np.diff(pattern.indptr).astype(np.int64)
    tri = _triangles_per_node(pattern)
    wedges = deg * (deg - 1) // 2
    out = np.zeros(len(deg), dtype=np.float64)
    mask = wedges > 0
    out[mask] = tri[mask] / wedges[mask]
    if min_degree_two:
        return out[mask]
    return out


def local_clustering(g: Graph, u: int) -> float:
    """Probability that two distinct neighbors of u are connected; 0 when d(u) <= 1."""
    ws = Workspace(g)
    pattern = ws.pattern
    i = ws.g._check_node(u)
    nbrs = pattern.indices[pattern.indptr[i] : pattern.indptr[i + 1]]
    d = len(nbrs)
    if d <= 1:
        return 0.0
    links = pattern[nbrs][:, nbrs].nnz // 2
    return links / (d * (d - 1) / 2)


def _signed_simple_adjacency(g: Graph):
    """Sign of the aggregated pair weight on the simple loopless structure."""
    signs = sparse.csr_array(g.adjacency, copy=True)
    signs.setdiag(0)
    signs.eliminate_zeros()
    signs.data = np.sign(signs.data)
    return signs


@statistic("clusco_signed")
def stat_clusco_signed(ws) -> StatisticValue:
    g = ws.g
    _require_unipartite(g, "the signed clustering coefficient")
    if not g.weights.allows_negative:
        raise IncompatibleGraphError("signed clustering requires signed or rating weights")
    s = ws.wedge_count
    if s == 0:
        return _nan("clusco_signed", SIMPLE)
    signs = _signed_simple_adjacency(_as_undirected(g))
    tr3 = _signed_triple_trace(signs)
    return StatisticValue("clusco_signed", tr3 / (2 * s), SIMPLE)


@statistic("clusco_signed_rel")
def stat_clusco_signed_rel(ws) -> StatisticValue:
    g = ws.g
    _require_unipartite(g, "the signed clustering coefficient")
    if not g.weights.allows_negative:
        raise IncompatibleGraphError("signed clustering requires signed or rating weights")
    t = ws.triangle_count
    if t == 0:
        return _nan("clusco_signed_rel", SIMPLE)
    signs = _signed_simple_adjacency(_as_undirected(g))
    balance = _signed_triple_trace(signs) / 6
    return StatisticValue("clusco_signed_rel", balance / t, SIMPLE)


def _signed_triple_trace(signs) -> float:
    if signs.nnz == 0:
        return 0.0
    deg = np.diff(signs.indptr).astype(np.int64)
    work = np.abs(signs) @ deg
    total = 0.0
    for lo, hi in _row_chunks(work):
        block = signs[lo:hi] @ signs
        total += float(block.multiply(signs[lo:hi]).sum())
    return total


# -- distances ---------------------------------------------------------------


@dataclass(frozen=True)
class HopData:
    counts: np.ndarray  # ordered-pair count per hop (scaled estimate when sampled)
    eccentricities: np.ndarray  # per sampled source
    n: int
    sources: int
    exact: bool


def _hop_data(pattern, opts: Options) -> HopData:
    n = pattern.shape[0]
    if n == 0:
        raise GraphError("no nodes")
    exact = n <= opts.exact_threshold
    if exact:
        sources = np.arange(n, dtype=np.int64)
    else:
        rng = np.random.default_rng(opts.seed)
        sources = np.sort(
            rng.choice(n, size=min(opts.sample_sources, n), replace=False)
        ).astype(np.int64)
    counts, eccs = _bfs_counts(pattern, sources)
    if not exact:
        counts = counts * (n / len(sources))
    return HopData(counts=counts, eccentricities=eccs, n=n,
                   sources=len(sources), exact=exact)


def _bfs_counts(pattern, sources) -> tuple[np.ndarray, np.ndarray]:
    """Hop histogram and eccentricity per source, over every reachable node."""
    kernel = _bfs_kernel()
    if kernel is not None:
        counts, eccs, full = kernel(
            pattern.indptr.astype(np.int64),
            pattern.indices.astype(np.int64),
            sources,
            pattern.shape[0],
        )
        if not full:
            raise GraphError("distance pass requires a connected graph")
        return counts[: int(eccs.max()) + 1].astype(np.float64), eccs
    return _bfs_counts_scipy(pattern, sources)


_KERNEL = None


def _bfs_kernel():
    """Compiled BFS loop; None when numba is unavailable (scipy fallback)."""
    global _KERNEL
    if _KERNEL is not None:
        return _KERNEL if _KERNEL is not False else None
    try:
        from numba import njit
    except ImportError:
        _KERNEL = False
        return None

    @njit(cache=False)
    def kernel(indptr, indices, sources, n):
        counts = np.zeros(n + 1, np.int64)
        eccs = np.zeros(len(sources), np.int64)
        dist = np.full(n, -1, np.int32)
        queue = np.empty(n, np.int64)
        full = True
        for si in range(len(sources)):
            head, tail = 0, 1
            queue[0] = sources[si]
            dist[sources[si]] = 0
            ecc = 0
            while head < tail:
                u = queue[head]
                head += 1
                du = dist[u]
                counts[du] += 1
                if du > ecc:
                    ecc = du
                for j in range(indptr[u], indptr[u + 1]):
                    v = indices[j]
                    if dist[v] < 0:
                        dist[v] = du + 1
                        queue[tail] = v
                        tail += 1
            eccs[si] = ecc
            if tail != n:
                full = False
            for i in range(tail):  # reset only touched entries
                dist[queue[i]] = -1
        return counts, eccs, full

    _KERNEL = kernel
    return kernel


def _bfs_counts_scipy(pattern, sources) -> tuple[np.ndarray, np.ndarray]:
    n = pattern.shape[0]
    counts = np.zeros(1, dtype=np.float64)
    eccs = np.zeros(len(sources), dtype=np.int64)
    batch = max(1, int(4_000_000 // max(n, 1)))
    for lo in range(0, len(sources), batch):
        idx = sources[lo : lo + batch]
        dist = np.atleast_2d(
            dijkstra(pattern, directed=False, unweighted=True, indices=idx)
        )
        if np.any(np.isinf(dist)):
            raise GraphError("distance pass requires a connected graph")
        hops = dist.astype(np.int64)
        eccs[lo : lo + len(idx)] = hops.max(axis=1)
        chunk = np.bincount(hops.ravel())
        if len(chunk) > len(counts):
            counts = np.pad(counts, (0, len(chunk) - len(counts)))
        counts[: len(chunk)] += chunk
    return counts, eccs


def distance_histogram(g: Graph, opts: Options = DEFAULT_OPTIONS) -> dict[int, float]:
    """Ordered node-pair count per hop on the largest connected component.

    Includes the n pairs (u, u) at hop 0.  Counts are exact below the
    all-pairs threshold and scaled sample estimates above it.
    """
    ws = Workspace(g, opts)
    data = ws.hops
    return {
        h: (int(c) if data.exact else float(c))
        for h, c in enumerate(data.counts)
        if c > 0 or h == 0
    }


def _dist_params(ws) -> dict:
    if ws.hops.exact:
        return {}
    return {"sources": ws.hops.sources, "seed": ws.opts.seed}


def _dist_method(data: HopData) -> str:
    return "exact" if data.exact else "estimated"


@statistic("diam")
def stat_diam(ws) -> StatisticValue:
    data = ws.hops
    return StatisticValue("diam", int(data.eccentricities.max()), LCC,
                          _dist_method(data), _dist_params(ws))


@statistic("radius")
def stat_radius(ws) -> StatisticValue:
    data = ws.hops
    return StatisticValue("radius", int(data.eccentricities.min()), LCC,
                          _dist_method(data), _dist_params(ws))


@statistic("meandist")
def stat_meandist(ws) -> StatisticValue:
    data = ws.hops
    hops = np.arange(len(data.counts))
    total = data.counts.sum()
    value = float((hops * data.counts).sum() / total)
    return StatisticValue("meandist", value, LCC, _dist_method(data), _dist_params(ws))


@statistic("mediandist")
def stat_mediandist(ws) -> StatisticValue:
    data = ws.hops
    cum = np.cumsum(data.counts)
    threshold = (cum[-1] + 1) // 2 if data.exact else cum[-1] / 2  # lower median
    value = int(np.searchsorted(cum, threshold))
    return StatisticValue("mediandist", value, LCC, _dist_method(data), _dist_params(ws))


@statistic("diam_eff")
def stat_diam_eff(ws) -> StatisticValue:
    data = ws.hops
    counts = data.counts.copy()
    counts[0] = 0  # pairs (u, u) are excluded from the 90% reach
    value = _interpolate_quantile(counts, 0.9)
    return StatisticValue("diam_eff", value, LCC, _dist_method(data), _dist_params(ws))


def _interpolate_quantile(counts: np.ndarray, q: float) -> float:
    """Linear interpolation on the cumulative hop curve anchored at (0, 0)."""
    total = counts.sum()
    if total == 0:
        return 0.0
    cum = np.cumsum(counts) / total
    h = int(np.searchsorted(cum, q))
    prev = cum[h - 1] if h > 0 else 0.0
    if cum[h] == prev:
        return float(h)
    return float(h - 1 + (q - prev) / (cum[h] - prev))


def eccentricity(g: Graph, u: int) -> int:
    """Maximal hop distance from u to any node reachable from it."""
    ws = Workspace(g)
    i = ws.g._check_node(u)
    dist = dijkstra(ws.pattern, directed=False, unweighted=True, indices=i)
    finite = dist[np.isfinite(dist)]
    return int(finite.max())


# -- algebraic statistics ----------------------------------------------------


@statistic("snorm")
def stat_snorm(ws) -> StatisticValue:
    g = ws.g
    if g.m == 0:
        return _nan("snorm")
    if g.is_directed:
        a = build_operator(g, MatrixKind.ADJACENCY).matrix
        value = _operator_norm(a, ws.opts)
    else:
        op = build_operator(g, MatrixKind.ADJACENCY)
        res = eig_symmetric(op, 1, "largest-absolute",
                            tol=ws.opts.tol, seed=ws.opts.seed)
        value = float(abs(res.values[0]))
    return StatisticValue("snorm", value)


def _operator_norm(a, opts) -> float:
    if max(a.shape) <= spectral.DENSE_LIMIT:
        return float(np.linalg.svd(a.toarray(), compute_uv=False)[0])
    from scipy.sparse.linalg import svds

    s = svds(a.astype(np.float64), k=1, return_singular_vectors=False,
             v0=np.random.default_rng(opts.seed).standard_normal(min(a.shape)))
    return float(s[0])


@statistic("alcon")
def stat_alcon(ws) -> StatisticValue:
    g = ws.g
    if g.weights.allows_negative:
        raise IncompatibleGraphError(
            "algebraic connectivity applies to unsigned graphs; see conflict"
        )
    lcc = ws.sym_lcc
    if lcc.n < 2:
        return _nan("alcon", LCC)
    value = _laplacian_smallest(lcc, 2, ws.opts)[1]
    return StatisticValue("alcon", float(value), LCC)


@statistic("conflict")
def stat_conflict(ws) -> StatisticValue:
    g = ws.g
    if not g.weights.allows_negative:
        raise IncompatibleGraphError("algebraic conflict requires signed or rating weights")
    value = _laplacian_smallest(ws.sym_lcc, 1, ws.opts)[0]
    return StatisticValue("conflict", float(value), LCC)


def _laplacian_smallest(g: Graph, k: int, opts: Options) -> np.ndarray:
    op = build_operator(g, MatrixKind.LAPLACIAN)
    res = eig_symmetric(op, min(k, op.dim), "smallest",
                        tol=opts.tol, seed=opts.seed)
    return res.values


# -- bipartivity -------------------------------------------------------------


@statistic("frustration")
def stat_frustration(ws) -> StatisticValue:
    base = _drop_loops(strip_weights(ws.g))
    if base.m == 0:
        return StatisticValue("frustration", 0.0, FULL)
    f, exact = _min_frustrated_edges(base, ws.opts)
    return StatisticValue(
        "frustration", f / base.m, FULL,
        "exact" if exact else "estimated",
        {} if exact else {"bound": "upper"},
    )


def _min_frustrated_edges(g: Graph, opts: Options) -> tuple[int, bool]:
    """Minimum same-side edge weight over all bipartitions, per component."""
    u, v = g.endpoints()
    mult = g.multiplicities
    labels = g.component_labels
    total = 0
    all_exact = True
    for comp in np.unique(labels[np.concatenate([u, v]) - 1]):
        nodes = np.flatnonzero(labels == comp)
        index = {int(x): i for i, x in enumerate(nodes)}
        mask = labels[u - 1] == comp
        ea = np.array([index[int(x)] for x in u[mask] - 1], dtype=np.int64)
        eb = np.array([index[int(x)] for x in v[mask] - 1], dtype=np.int64)
        ew = mult[mask].astype(np.int64)
        ea, eb, ew = _aggregate_pairs(ea, eb, ew)
        nc = len(nodes)
        if len(ea) == 0:
            continue
        if nc <= 20:
            total += _frustration_exact(nc, ea, eb, ew)
        else:
            f, exact = _frustration_search(nc, ea, eb, ew, opts)
            total += f
            all_exact = all_exact and exact
    return total, all_exact


def _aggregate_pairs(a, b, w):
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    key = lo * (max(a.max(), b.max()) + 2) + hi
    order = np.argsort(key, kind="stable")
    key, lo, hi, w = key[order], lo[order], hi[order], w[order]
    uniq, start = np.unique(key, return_index=True)
    sums = np.add.reduceat(w, start)
    return lo[start], hi[start], sums


def _frustration_exact(nc, ea, eb, ew) -> int:
    best = np.iinfo(np.int64).max
    n_masks = 1 << max(nc - 1, 0)
    step = 1 << 20
    for lo in range(0, n_masks, step):
        masks = np.arange(lo, min(lo + step, n_masks), dtype=np.uint64)
        same = np.zeros(len(masks), dtype=np.int64)
        for a, b, w in zip(ea, eb, ew):
            bit_a = (masks >> np.uint64(a - 1)) & np.uint64(1) if a else 0
            bit_b = (masks >> np.uint64(b - 1)) & np.uint64(1) if b else 0
            same += np.where(bit_a == bit_b, w, 0)
        best = min(best, int(same.min()))
    return best


_BB_NODE_CAP = 40  # beyond this the exact search space is hopeless anyway


def _frustration_search(nc, ea, eb, ew, opts) -> tuple[int, bool]:
    """Branch and bound with a time budget; falls back to a spectral bound."""
    upper, _ = _frustration_spectral_bound(nc, ea, eb, ew, opts)
    if upper == 0:
        return 0, True  # a zero upper bound is optimal
    if nc > _BB_NODE_CAP:
        return upper, False
    adj: list[list[tuple[int, int]]] = [[] for _ in range(nc)]
    for a, b, w in zip(ea.tolist(), eb.tolist(), ew.tolist()):
        adj[a].append((b, w))
        adj[b].append((a, w))
    order = sorted(range(nc), key=lambda x: -len(adj[x]))
    best = upper
    assign = np.full(nc, -1, dtype=np.int8)
    deadline = time.monotonic() + opts.frustration_budget
    timed_out = False

    def walk(i, cost):
        nonlocal best, timed_out
        if timed_out or cost >= best:
            return
        if i == nc:
            best = cost
            return
        if i % 4 == 0 and time.monotonic() > deadline:
            timed_out = True
            return
        node = order[i]
        for side in (0, 1) if i else (0,):  # first node's side is symmetric
            assign[node] = side
            extra = sum(w for nb, w in adj[node] if assign[nb] == side)
            walk(i + 1, cost + extra)
            assign[node] = -1

    walk(0, 0)
    if timed_out:
        return best, False
    return best, True


def _frustration_spectral_bound(nc, ea, eb, ew, opts) -> tuple[int, np.ndarray]:
    mat = sparse.coo_array(
        (np.concatenate([ew, ew]).astype(np.float64),
         (np.concatenate([ea, eb]), np.concatenate([eb, ea]))),
        shape=(nc, nc),
    ).tocsr()
    deg = np.asarray(np.abs(mat).sum(axis=1)).ravel()
    k = sparse.dia_array((deg[np.newaxis, :], [0]), shape=(nc, nc)).tocsr() + mat
    op = spectral.Operator(MatrixKind.SIGNLESS_LAPLACIAN, sparse.csr_array(k),
                           nodes=np.arange(1, nc + 1))
    try:
        # a loose tolerance is fine: the eigenvector only seeds the rounding
        res = eig_symmetric(op, 1, "smallest", tol=1e-4, seed=opts.seed)
        sides = (res.vectors[:, 0] >= 0).astype(np.int8)
    except Exception:
        sides = np.zeros(nc, dtype=np.int8)
    sides, cost = _greedy_flip(sides, ea, eb, ew, nc)
    return cost, sides


def _bipartition_cost(sides, ea, eb, ew) -> int:
    return int(np.sum(np.where(sides[ea] == sides[eb], ew, 0)))


def _greedy_flip(sides, ea, eb, ew, nc, max_flips: int = 50) -> tuple[np.ndarray, int]:
    """Flip the single most profitable node until no flip reduces the cost."""
    ew = ew.astype(np.float64)
    for _ in range(max_flips):
        same = sides[ea] == sides[eb]
        same_w = (
            np.bincount(ea[same], weights=ew[same], minlength=nc)
            + np.bincount(eb[same], weights=ew[same], minlength=nc)
        )
        cross_w = (
            np.bincount(ea[~same], weights=ew[~same], minlength=nc)
            + np.bincount(eb[~same], weights=ew[~same], minlength=nc)
        )
        gain = same_w - cross_w  # cost drop when this node switches sides
        node = int(gain.argmax())
        if gain[node] <= 0:
            break
        sides[node] ^= 1
    return sides, _bipartition_cost(sides, ea, eb, ew)


@statistic("anticonflict")
def stat_anticonflict(ws) -> StatisticValue:
    base = ws.bip_base
    if base.m == 0:
        return StatisticValue("anticonflict", 0.0, LCC)
    op = build_operator(base, MatrixKind.SIGNLESS_LAPLACIAN)
    res = eig_symmetric(op, 1, "smallest", tol=ws.opts.tol, seed=ws.opts.seed)
    value = base.n / (8 * base.m) * float(res.values[0])
    return StatisticValue("anticonflict", value, LCC)


@statistic("nonbip")
def stat_nonbip(ws) -> StatisticValue:
    base = ws.bip_base
    if base.m == 0:
        return _nan("nonbip", LCC)
    op = build_operator(base, MatrixKind.ADJACENCY)
    lo, hi = _extreme_eigs(op, ws.opts)
    return StatisticValue("nonbip", 1 - abs(lo / hi), LCC)


@statistic("nonbipn")
def stat_nonbipn(ws) -> StatisticValue:
    base = ws.bip_base
    if base.m == 0:
        return _nan("nonbipn", LCC)
    op = build_operator(base, MatrixKind.NORMALIZED)
    res = eig_symmetric(op, min(1, op.dim), "smallest",
                        tol=ws.opts.tol, seed=ws.opts.seed)
    return StatisticValue("nonbipn", float(res.values[0]) + 1, LCC)


def _extreme_eigs(op, opts) -> tuple[float, float]:
    if op.dim <= spectral.DENSE_LIMIT:
        vals = np.linalg.eigvalsh(op.matrix.toarray())
        return float(vals[0]), float(vals[-1])
    lo = eig_symmetric(op, 1, "smallest", tol=opts.tol, seed=opts.seed).values[0]
    hi_res = eig_symmetric(op, 1, "largest-absolute", tol=opts.tol, seed=opts.seed)
    hi = float(np.max(hi_res.values))
    if hi <= 0:  # largest-absolute may return the negative extreme
        hi = float(-np.min(hi_res.values))
    return float(lo), hi


# -- serialization -----------------------------------------------------------


def format_value(v) -> str:
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if v == int(v) and abs(v) < 1e15:
            return str(int(v))
        return repr(v)
    return str(v)


def statistics_tsv(rows: list[tuple[str, StatisticValue | Exception]]) -> str:
    """TSV with columns name, value, computed_on, method, parameters.

    Exceptions render as NA rows carrying the failure reason.
    """
    lines = ["name\tvalue\tcomputed_on\tmethod\tparameters"]
    for name, res in rows:
        if isinstance(res, Exception):
            lines.append(f"{name}\tNA\t-\t-\treason={res}")
            continue
        params = ";".join(
            f"{k}={format_value(v)}" for k, v in sorted(res.parameters.items())
        ) or "-"
        lines.append(
            f"{res.name}\t{format_value(res.value)}\t{res.computed_on}"
            f"\t{res.method}\t{params}"
        )
    return "\n".join(lines) + "\n"
