"""Random dataset generation shared by round-trip and acceptance tests."""

from __future__ import annotations

import numpy as np

from netstats.graph import Format, Graph, WeightType

ALL_COMBOS = [(f, w) for f in Format for w in WeightType]


def random_graph(rng: np.random.Generator, fmt: Format, weights: WeightType,
                 n_max: int = 30, m_max: int = 80) -> Graph:
    """A structurally valid random graph of the requested format/weight type."""
    if fmt is Format.BIPARTITE:
        n1 = int(rng.integers(1, n_max))
        n2 = int(rng.integers(1, n_max))
    else:
        n1 = int(rng.integers(2, n_max + 2))
        n2 = None
    tags = set()
    loops = fmt is not Format.BIPARTITE and rng.random() < 0.3
    if loops:
        tags.add("#loop")

    m = int(rng.integers(0, m_max))
    single = not weights.allows_multi
    pairs = []
    seen = set()
    for _ in range(m):
        u = int(rng.integers(1, n1 + 1))
        hi = n2 if fmt is Format.BIPARTITE else n1
        v = int(rng.integers(1, hi + 1))
        if u == v and fmt is not Format.BIPARTITE and not loops:
            continue
        key = (min(u, v), max(u, v)) if fmt is Format.UNDIRECTED else (u, v)
        if single and key in seen:
            continue
        seen.add(key)
        pairs.append((u, v))
    if fmt is Format.DIRECTED and weights is not WeightType.DYNAMIC:
        # keep validate() happy: at least two reciprocal pairs unless #acyclic
        tags.add("#acyclic")
    src = np.array([p[0] for p in pairs], dtype=np.int64)
    dst = np.array([p[1] for p in pairs], dtype=np.int64)
    k = len(pairs)

    weight = None
    timestamp = None
    temporal = weights is WeightType.DYNAMIC or rng.random() < 0.4
    if weights is WeightType.UNWEIGHTED:
        weight = np.ones(k) if rng.random() < 0.5 else None
    elif weights is WeightType.POSITIVE:
        if temporal:
            weight = np.ones(k)
        else:
            weight = rng.integers(1, 5, size=k).astype(np.float64)
    elif weights in (WeightType.POSWEIGHTED, WeightType.MULTIPOSWEIGHTED):
        weight = np.round(rng.uniform(0.5, 9.5, size=k), 3)
    elif weights in (WeightType.SIGNED, WeightType.MULTISIGNED):
        weight = rng.choice([-2.0, -1.0, 1.0, 2.0], size=k)
    elif weights in (WeightType.WEIGHTED, WeightType.MULTIWEIGHTED):
        weight = rng.integers(1, 6, size=k).astype(np.float64)
    elif weights is WeightType.DYNAMIC:
        weight = rng.choice([1.0, -1.0], size=k)
        if k:
            weight[0] = 1.0
    if temporal and weight is not None:
        timestamp = np.sort(rng.integers(10**9, 10**9 + 10**6, size=k)).astype(np.float64)
    return Graph(fmt=fmt, weights=weights, n1=n1, n2=n2, src=src, dst=dst,
                 weight=weight, timestamp=timestamp, tags=frozenset(tags))


def random_simple_undirected(rng: np.random.Generator, n: int, p: float) -> Graph:
    """Erdos-Renyi style simple loopless undirected graph."""
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(len(iu)) < p
    return Graph(fmt=Format.UNDIRECTED, weights=WeightType.UNWEIGHTED,
                 n1=n, n2=None, src=iu[keep] + 1, dst=ju[keep] + 1)


def graph_from_pairs(pairs, n, fmt=Format.UNDIRECTED,
                     weights=WeightType.UNWEIGHTED, w=None, n2=None, tags=()):
    src = np.array([p[0] for p in pairs], dtype=np.int64)
    dst = np.array([p[1] for p in pairs], dtype=np.int64)
    weight = None if w is None else np.asarray(w, dtype=np.float64)
    return Graph(fmt=fmt, weights=weights, n1=n, n2=n2, src=src, dst=dst,
                 weight=weight, tags=frozenset(tags))
