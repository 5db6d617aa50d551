"""In-memory graph model: formats, weight types, per-node quantities and transforms.

A :class:`Graph` is an immutable edge table plus bookkeeping.  Node ids are
1-based.  Bipartite graphs keep raw left/right ids in the edge table
(left ids in ``1..n1``, right ids in ``1..n2``); everywhere a single "node"
argument is taken, the combined id space is used, in which right node ``j``
is addressed as ``n1 + j``.

Undirected edges are stored once; every operation treats ``{u, v}``
symmetrically.  Loops contribute 2 to the degree (and node weight) of their
endpoint, which keeps the handshake identity ``sum(d) == 2m``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components


class GraphError(Exception):
    """Base class for graph construction and usage errors."""


class InvalidNodeError(GraphError):
    """A node id outside the graph's id range."""


class IncompatibleGraphError(GraphError):
    """Operation not defined for this graph's format or weight type."""


class Format(enum.Enum):
    """Network format; the value is the on-disk internal name."""

    UNDIRECTED = "sym"
    DIRECTED = "asym"
    BIPARTITE = "bip"

    @classmethod
    def from_internal(cls, name: str) -> "Format":
        try:
            return cls(name)
        except ValueError:
            raise GraphError(f"unknown format name {name!r}") from None


class WeightType(enum.Enum):
    """Edge weight / multiplicity class; the value is the on-disk internal name."""

    UNWEIGHTED = "unweighted"
    POSITIVE = "positive"  # multiple unweighted edges (multigraph)
    POSWEIGHTED = "posweighted"
    SIGNED = "signed"
    MULTISIGNED = "multisigned"
    WEIGHTED = "weighted"  # ratings, interval scale
    MULTIWEIGHTED = "multiweighted"
    DYNAMIC = "dynamic"
    MULTIPOSWEIGHTED = "multiposweighted"

    @classmethod
    def from_internal(cls, name: str) -> "WeightType":
        try:
            return cls(name)
        except ValueError:
            raise GraphError(f"unknown weight type name {name!r}") from None

    @property
    def allows_multi(self) -> bool:
        return self in _MULTI

    @property
    def is_rating(self) -> bool:
        return self in _RATING

    @property
    def allows_negative(self) -> bool:
        return self in _NEGATIVE

    @property
    def has_weight_column(self) -> bool:
        """True when the third file column is a proper weight (not a count/event)."""
        return self in _WEIGHT_COL


_MULTI = frozenset(
    {
        WeightType.POSITIVE,
        WeightType.MULTISIGNED,
        WeightType.MULTIWEIGHTED,
        WeightType.DYNAMIC,
        WeightType.MULTIPOSWEIGHTED,
    }
)
_RATING = frozenset({WeightType.WEIGHTED, WeightType.MULTIWEIGHTED})
_NEGATIVE = frozenset(
    {
        WeightType.SIGNED,
        WeightType.MULTISIGNED,
        WeightType.WEIGHTED,
        WeightType.MULTIWEIGHTED,
    }
)
_WEIGHT_COL = frozenset(
    {
        WeightType.POSWEIGHTED,
        WeightType.SIGNED,
        WeightType.MULTISIGNED,
        WeightType.WEIGHTED,
        WeightType.MULTIWEIGHTED,
        WeightType.MULTIPOSWEIGHTED,
    }
)

KNOWN_TAGS = frozenset(
    {
        "#acyclic",
        "#incomplete",
        "#join",
        "#kcore",
        "#missingorientation",
        "#lcc",
        "#loop",
        "#nonreciprocal",
        "#regenerate",
        "#zeroweight",
    }
)


def _frozen(arr, dtype):
    out = np.ascontiguousarray(arr, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False, repr=False)
class Graph:
    """An immutable loaded network.

    ``src``/``dst`` hold the edge table as parsed (one row per file line);
    ``weight`` is the raw third column (multiplicity count, weight, rating,
    or +/-1 event marker depending on ``weights``) and ``timestamp`` the raw
    fourth column.  All derived quantities are cached lazily; the instance
    is safe to share between threads after construction.
    """

    fmt: Format
    weights: WeightType
    n1: int
    n2: int | None  # right side size; None unless bipartite
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray | None = None
    timestamp: np.ndarray | None = None
    tags: frozenset[str] = frozenset()
    node_origin: np.ndarray | None = None  # set by largest_connected_component

    def __post_init__(self):
        object.__setattr__(self, "src", _frozen(self.src, np.int64))
        object.__setattr__(self, "dst", _frozen(self.dst, np.int64))
        if len(self.src) == 0:  # zero-record graphs have no columns
            object.__setattr__(self, "weight", None)
            object.__setattr__(self, "timestamp", None)
        if self.weight is not None:
            object.__setattr__(self, "weight", _frozen(self.weight, np.float64))
        if self.timestamp is not None:
            object.__setattr__(self, "timestamp", _frozen(self.timestamp, np.float64))
        object.__setattr__(self, "tags", frozenset(self.tags))
        if (self.fmt is Format.BIPARTITE) != (self.n2 is not None):
            raise GraphError("n2 must be given exactly for bipartite graphs")
        if len(self.src) != len(self.dst):
            raise GraphError("src/dst length mismatch")
        for col in (self.weight, self.timestamp):
            if col is not None and len(col) != len(self.src):
                raise GraphError("weight/timestamp column length mismatch")
        if self.timestamp is not None and self.weight is None:
            raise GraphError("timestamp column requires the weight column")
        if self.n1 < 0 or (self.n2 or 0) < 0:
            raise GraphError("negative node count")
        if len(self.src):
            hi_src = int(self.src.max())
            hi_dst = int(self.dst.max())
            lo = min(int(self.src.min()), int(self.dst.min()))
            if lo < 1:
                raise GraphError("node ids must be >= 1")
            max_src = self.n1
            max_dst = self.n2 if self.fmt is Format.BIPARTITE else self.n1
            if hi_src > max_src or hi_dst > max_dst:
                raise GraphError("edge references node id beyond declared count")
            if self.fmt is not Format.BIPARTITE and not self.allows_loops:
                if np.any(self.src == self.dst):
                    raise GraphError("loops present without the #loop tag")

    # -- basic shape ----------------------------------------------------

    @property
    def n(self) -> int:
        """Total node count (both sides for bipartite graphs)."""
        return self.n1 + (self.n2 or 0)

    @property
    def is_directed(self) -> bool:
        return self.fmt is Format.DIRECTED

    @property
    def is_bipartite(self) -> bool:
        return self.fmt is Format.BIPARTITE

    @property
    def allows_loops(self) -> bool:
        return "#loop" in self.tags and self.fmt is not Format.BIPARTITE

    @property
    def has_timestamps(self) -> bool:
        return self.timestamp is not None

    @cached_property
    def multiplicities(self) -> np.ndarray:
        """Edge count represented by each record (aggregated-line expansion)."""
        if (
            self.weights in (WeightType.UNWEIGHTED, WeightType.POSITIVE)
            and self.weight is not None
            and self.timestamp is None
        ):
            return _frozen(np.rint(self.weight), np.int64)
        return _frozen(np.ones(len(self.src)), np.int64)

    @property
    def m(self) -> int:
        """Number of edges, multiplicities included (events for dynamic graphs)."""
        return int(self.multiplicities.sum())

    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge endpoints in the combined 1-based id space."""
        if self.is_bipartite:
            return self.src, self.dst + self.n1
        return self.src, self.dst

    def __repr__(self):
        side = f"{self.n1}+{self.n2}" if self.is_bipartite else str(self.n1)
        return (
            f"Graph({self.fmt.value!r}, {self.weights.value!r}, "
            f"n={side}, records={len(self.src)})"
        )

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.fmt is other.fmt
            and self.weights is other.weights
            and self.n1 == other.n1
            and self.n2 == other.n2
            and self.tags == other.tags
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
            and _col_eq(self.weight, other.weight)
            and _col_eq(self.timestamp, other.timestamp)
        )

    __hash__ = object.__hash__

    # -- per-edge / per-node quantities ----------------------------------

    @cached_property
    def rating_mean(self) -> float:
        """Mean rating over all edge records (rating networks only)."""
        if not self.weights.is_rating:
            raise IncompatibleGraphError("rating mean requires a rating network")
        if self.weight is None or not len(self.weight):
            return 0.0
        return float(self.weight.mean())

    @cached_property
    def effective_weights(self) -> np.ndarray:
        """w(e) per record: 1 (times aggregation) for unweighted classes,
        the stored weight for weighted classes, r - mu for ratings."""
        if self.weights.is_rating:
            return _frozen(self.weight - self.rating_mean, np.float64)
        if self.weights.has_weight_column and self.weight is not None:
            return self.weight
        return _frozen(self.multiplicities, np.float64)

    @cached_property
    def degrees(self) -> np.ndarray:
        """Degree per node (index = combined id - 1); loops count twice."""
        u, v = self.endpoints()
        mult = self.multiplicities
        return _frozen(
            np.bincount(u - 1, weights=mult, minlength=self.n)
            + np.bincount(v - 1, weights=mult, minlength=self.n),
            np.int64,
        )

    @cached_property
    def out_degrees(self) -> np.ndarray:
        if not self.is_directed:
            raise IncompatibleGraphError("out-degrees require a directed graph")
        return _frozen(
            np.bincount(self.src - 1, weights=self.multiplicities, minlength=self.n),
            np.int64,
        )

    @cached_property
    def in_degrees(self) -> np.ndarray:
        if not self.is_directed:
            raise IncompatibleGraphError("in-degrees require a directed graph")
        return _frozen(
            np.bincount(self.dst - 1, weights=self.multiplicities, minlength=self.n),
            np.int64,
        )

    @cached_property
    def node_weights(self) -> np.ndarray:
        """Sum of absolute effective edge weights incident to each node."""
        u, v = self.endpoints()
        aw = np.abs(self.effective_weights)
        return _frozen(
            np.bincount(u - 1, weights=aw, minlength=self.n)
            + np.bincount(v - 1, weights=aw, minlength=self.n),
            np.float64,
        )

    def _check_node(self, u: int) -> int:
        if not 1 <= u <= self.n:
            raise InvalidNodeError(f"node {u} outside 1..{self.n}")
        return u - 1

    def degree(self, u: int) -> int:
        return int(self.degrees[self._check_node(u)])

    def in_out_degree(self, u: int) -> tuple[int, int]:
        """(outdegree, indegree) of a node in a directed graph."""
        i = self._check_node(u)
        return int(self.out_degrees[i]), int(self.in_degrees[i])

    def node_weight(self, u: int) -> float:
        return float(self.node_weights[self._check_node(u)])

    def pair_weight(self, u: int, v: int) -> float:
        """Aggregated weight w(u, v); 0 when the nodes are not connected."""
        i, j = self._check_node(u), self._check_node(v)
        return float(self.adjacency[i, j])

    # -- matrix views ----------------------------------------------------

    @cached_property
    def adjacency(self) -> sparse.csr_array:
        """Pair-weight adjacency over the combined node space (n x n).

        Symmetric for undirected and bipartite graphs, asymmetric for
        directed ones.  Parallel edges aggregate per the weight type;
        dynamic graphs use their latest state.
        """
        if self.weights is WeightType.DYNAMIC:
            return latest_state(self).adjacency
        u, v = self.endpoints()
        w = self.effective_weights
        if self.weights in (WeightType.UNWEIGHTED, WeightType.POSITIVE):
            w = self.multiplicities.astype(np.float64)
        rows, cols, vals = u - 1, v - 1, w
        if not self.is_directed:
            off = rows != cols
            rows = np.concatenate([rows, cols[off]])
            cols = np.concatenate([cols, (u - 1)[off]])
            vals = np.concatenate([vals, w[off]])
        mat = sparse.coo_array((vals, (rows, cols)), shape=(self.n, self.n))
        return mat.tocsr()

    @cached_property
    def pattern(self) -> sparse.csr_array:
        """0/1 symmetric adjacency of the underlying simple loopless graph."""
        if self.weights is WeightType.DYNAMIC:
            return latest_state(self).pattern
        u, v = self.endpoints()
        keep = u != v
        a = np.minimum(u[keep], v[keep]) - 1
        b = np.maximum(u[keep], v[keep]) - 1
        pairs = np.unique(np.stack([a, b], axis=1), axis=0)
        if len(pairs) == 0:
            return sparse.csr_array((self.n, self.n))
        rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
        cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
        data = np.ones(len(rows), dtype=np.int64)
        return sparse.coo_array((data, (rows, cols)), shape=(self.n, self.n)).tocsr()

    @cached_property
    def component_labels(self) -> np.ndarray:
        """Weakly connected component label per node (0-based combined index)."""
        if self.n == 0:
            return np.zeros(0, dtype=np.int64)
        _, labels = connected_components(self.pattern, directed=False)
        return _frozen(labels, np.int64)


def _col_eq(a, b):
    if a is None or b is None:
        return a is None and b is None
    return np.array_equal(a, b)


# -- transforms ------------------------------------------------------------


def strip_weights(g: Graph) -> Graph:
    """The corresponding unweighted graph (multiplicities are kept)."""
    if g.weights is WeightType.DYNAMIC:
        return latest_state(g)
    if g.weights in (WeightType.UNWEIGHTED, WeightType.POSITIVE):
        return g
    kind = WeightType.POSITIVE if g.weights.allows_multi else WeightType.UNWEIGHTED
    weight = None
    if g.timestamp is not None:
        weight = np.ones(len(g.src))  # timestamps require the weight column
    return Graph(
        fmt=g.fmt,
        weights=kind,
        n1=g.n1,
        n2=g.n2,
        src=g.src,
        dst=g.dst,
        weight=weight,
        timestamp=g.timestamp,
        tags=g.tags,
    )


def dedupe(g: Graph) -> Graph:
    """The unweighted simple graph on the set underlying the edge multiset.

    Simple (single-edge) graphs map to themselves unchanged.
    """
    if not g.weights.allows_multi:
        return g
    if g.weights is WeightType.DYNAMIC:
        return latest_state(g)
    u, v = g.src, g.dst
    if not g.is_directed and not g.is_bipartite:
        a, b = np.minimum(u, v), np.maximum(u, v)
    else:
        a, b = u, v
    _, first = np.unique(np.stack([a, b], axis=1), axis=0, return_index=True)
    first.sort()
    return Graph(
        fmt=g.fmt,
        weights=WeightType.UNWEIGHTED,
        n1=g.n1,
        n2=g.n2,
        src=g.src[first],
        dst=g.dst[first],
        tags=g.tags,
    )


def absolute(g: Graph) -> Graph:
    """The unsigned graph |G|: every effective weight replaced by its absolute value."""
    if not g.weights.allows_negative:
        raise IncompatibleGraphError("absolute value requires a signed or rating graph")
    w = np.abs(g.effective_weights)
    kind = (
        WeightType.MULTIPOSWEIGHTED if g.weights.allows_multi else WeightType.POSWEIGHTED
    )
    tags = g.tags
    if np.any(w == 0):
        tags = tags | {"#zeroweight"}
    return Graph(
        fmt=g.fmt,
        weights=kind,
        n1=g.n1,
        n2=g.n2,
        src=g.src,
        dst=g.dst,
        weight=w,
        timestamp=g.timestamp,
        tags=tags,
    )


def negate(g: Graph) -> Graph:
    """The negative graph -G: every effective weight negated.

    Unweighted and positively weighted inputs become signed.
    """
    if g.weights is WeightType.DYNAMIC:
        raise IncompatibleGraphError("dynamic event logs cannot be negated")
    src, dst, ts = g.src, g.dst, g.timestamp
    if g.weights in (WeightType.UNWEIGHTED, WeightType.POSITIVE):
        mult = g.multiplicities
        if np.any(mult > 1):  # expand aggregated lines into parallel edges
            src = np.repeat(src, mult)
            dst = np.repeat(dst, mult)
            ts = np.repeat(ts, mult) if ts is not None else None
        w = -np.ones(len(src))
    else:
        w = -g.effective_weights
    kind = WeightType.MULTISIGNED if g.weights.allows_multi else WeightType.SIGNED
    return Graph(
        fmt=g.fmt,
        weights=kind,
        n1=g.n1,
        n2=g.n2,
        src=src,
        dst=dst,
        weight=w,
        timestamp=ts,
        tags=g.tags,
    )


def latest_state(g: Graph) -> Graph:
    """Replay a dynamic network's event log; keep edges whose last event adds.

    Events are ordered by timestamp, ties broken by input order.
    """
    if g.weights is not WeightType.DYNAMIC:
        raise IncompatibleGraphError("latest state is defined for dynamic networks")
    if len(g.src) == 0:
        return Graph(fmt=g.fmt, weights=WeightType.UNWEIGHTED, n1=g.n1, n2=g.n2,
                     src=g.src, dst=g.dst, tags=g.tags)
    order = (
        np.argsort(g.timestamp, kind="stable")
        if g.timestamp is not None
        else np.arange(len(g.src))
    )
    u, v = g.src[order], g.dst[order]
    if not g.is_directed and not g.is_bipartite:
        a, b = np.minimum(u, v), np.maximum(u, v)
    else:
        a, b = u, v
    key = a.astype(np.int64) * (max(g.n, 1) + 1) + b
    # first occurrence in the reversed stream = last event per pair
    rev_key = key[::-1]
    _, first_rev = np.unique(rev_key, return_index=True)
    last = len(key) - 1 - first_rev
    signs = g.weight[order] if g.weight is not None else np.ones(len(key))
    added = last[signs[last] > 0]
    added.sort()
    return Graph(
        fmt=g.fmt,
        weights=WeightType.UNWEIGHTED,
        n1=g.n1,
        n2=g.n2,
        src=u[added],
        dst=v[added],
        tags=g.tags,
    )


def largest_connected_component(g: Graph) -> Graph:
    """Induced subgraph on the largest weakly connected component.

    Node ids are re-consecutivized; the returned graph's ``node_origin``
    maps new combined ids (index + 1) back to the old combined ids.
    """
    if g.n == 0:
        raise GraphError("empty graph has no connected component")
    labels = g.component_labels
    sizes = np.bincount(labels)
    best = int(sizes.argmax())  # ties resolve to the smallest label
    nodes = np.flatnonzero(labels == best)  # ascending: left block, then right
    mapping = np.full(g.n, -1, dtype=np.int64)
    if g.is_bipartite:
        left = nodes[nodes < g.n1]
        right = nodes[nodes >= g.n1]
        mapping[left] = np.arange(len(left))
        mapping[right] = np.arange(len(right))
        n1, n2 = len(left), len(right)
    else:
        mapping[nodes] = np.arange(len(nodes))
        n1, n2 = len(nodes), None
    keep = mapping[g.src - 1] >= 0  # both endpoints share a weak component
    return Graph(
        fmt=g.fmt,
        weights=g.weights,
        n1=n1,
        n2=n2,
        src=mapping[g.src[keep] - 1] + 1,
        dst=mapping[(g.dst[keep] - 1) + (g.n1 if g.is_bipartite else 0)] + 1,
        weight=g.weight[keep] if g.weight is not None else None,
        timestamp=g.timestamp[keep] if g.timestamp is not None else None,
        tags=g.tags,
        node_origin=nodes + 1,
    )
