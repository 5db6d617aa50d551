"""Characteristic matrices as sparse operators and their eigen/singular solvers.

Matrices are built over the combined node space from the pair-weight
adjacency A and the diagonal node-weight matrix D:

    N = D^{-1/2} A D^{-1/2}      Z = I - N       L = D - A
    P = D^{-1}   A               S = I - P       K = D + A

Zero-weight nodes are dropped before building the kinds that need D
inverses; the surviving original node ids are carried on the operator.
Solvers use a dense direct decomposition up to ``DENSE_LIMIT`` rows and a
Krylov iteration (ARPACK) above, seeded deterministically.
"""

from __future__ import annotations

import enum
import io as _io
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import ArpackNoConvergence, eigs, eigsh, svds

from .graph import Graph, GraphError, IncompatibleGraphError, WeightType, latest_state

DENSE_LIMIT = 500
DEFAULT_TOL = 1e-8
DEFAULT_SEED = 42
SPECTRUM_K = 49  # matches the 49-bin spectral distribution plots


class SpectralError(GraphError):
    """Solver failure; carries the residuals achieved so far, when any."""

    def __init__(self, message: str, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class MatrixKind(enum.Enum):
    ADJACENCY = "adjacency"
    BIADJACENCY = "biadjacency"
    DEGREE = "degree"
    NORMALIZED = "normalized"
    LAPLACIAN = "laplacian"
    NORM_LAPLACIAN = "norm-laplacian"
    STOCHASTIC = "stochastic"  # row stochastic, D^-1 A
    STOCHASTIC_COL = "stochastic-col"  # column stochastic, A D^-1
    STOCHASTIC_LAPLACIAN = "stochastic-laplacian"
    SIGNLESS_LAPLACIAN = "signless-laplacian"

_NEEDS_INVERSE = {
    MatrixKind.NORMALIZED,
    MatrixKind.NORM_LAPLACIAN,
    MatrixKind.STOCHASTIC,
    MatrixKind.STOCHASTIC_COL,
    MatrixKind.STOCHASTIC_LAPLACIAN,
    MatrixKind.SIGNLESS_LAPLACIAN,
}

_SYMMETRIC_KINDS = {
    MatrixKind.ADJACENCY,
    MatrixKind.DEGREE,
    MatrixKind.NORMALIZED,
    MatrixKind.LAPLACIAN,
    MatrixKind.NORM_LAPLACIAN,
    MatrixKind.SIGNLESS_LAPLACIAN,
}


@dataclass(frozen=True)
class Operator:
    """A characteristic matrix restricted to its operable nodes.

    ``nodes`` maps matrix rows to original combined node ids; for the
    biadjacency matrix, rows are left nodes and ``col_nodes`` right ones.
    """

    kind: MatrixKind
    matrix: sparse.csr_array
    nodes: np.ndarray
    col_nodes: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_symmetric(self) -> bool:
        return self.kind in _SYMMETRIC_KINDS and self.col_nodes is None

    def norm_bound(self) -> float:
        """Inf-norm upper bound on the spectral norm, used to scale residuals."""
        m = self.matrix
        if m.nnz == 0:
            return 1.0
        rowsum = np.abs(m).sum(axis=1)
        return float(max(np.max(rowsum), 1e-30))


@dataclass(frozen=True)
class SpectralResult:
    kind: MatrixKind
    order: str  # largest-absolute | smallest | largest-modulus | singular
    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    nodes: np.ndarray
    method: str  # dense | iterative
    right_vectors: np.ndarray | None = None
    col_nodes: np.ndarray | None = None

    def values_tsv(self) -> str:
        out = _io.StringIO()
        out.write("# index\treal\timag\tresidual\n")
        for i, v in enumerate(self.values):
            c = complex(v)
            out.write(f"{i}\t{c.real!r}\t{c.imag!r}\t{self.residuals[i]!r}\n")
        return out.getvalue()

    def vectors_tsv(self) -> str:
        out = _io.StringIO()
        cols = "\t".join(f"v{i}" for i in range(self.vectors.shape[1]))
        out.write(f"# node\t{cols}\n")
        for r, node in enumerate(self.nodes):
            row = "\t".join(repr(float(np.real(x))) for x in self.vectors[r])
            out.write(f"{int(node)}\t{row}\n")
        return out.getvalue()


def _static(g: Graph) -> Graph:
    return latest_state(g) if g.weights is WeightType.DYNAMIC else g


def build_operator(g: Graph, kind: MatrixKind) -> Operator:
    """Assemble the requested characteristic matrix as a sparse CSR operator."""
    g = _static(g)
    if kind is MatrixKind.BIADJACENCY:
        if not g.is_bipartite:
            raise IncompatibleGraphError("biadjacency requires a bipartite graph")
        a = g.adjacency
        b = a[: g.n1, g.n1 :]
        return Operator(kind, sparse.csr_array(b),
                        nodes=np.arange(1, g.n1 + 1),
                        col_nodes=np.arange(g.n1 + 1, g.n + 1))

    a = g.adjacency
    w = g.node_weights.copy()
    nodes = np.arange(1, g.n + 1)
    if kind in _NEEDS_INVERSE:
        if kind is MatrixKind.STOCHASTIC and g.is_directed:
            w = _directed_weight(g, out_side=True)
        elif kind is MatrixKind.STOCHASTIC_COL and g.is_directed:
            w = _directed_weight(g, out_side=False)
        keep = w > 0
        if not np.all(keep):
            idx = np.flatnonzero(keep)
            if len(idx) == 0:
                raise SpectralError(f"no nonzero-weight nodes left for {kind.value}")
            a = a[idx][:, idx]
            w = w[idx]
            nodes = nodes[idx]
    n = len(nodes)

    if kind is MatrixKind.ADJACENCY:
        mat = a
    elif kind is MatrixKind.DEGREE:
        mat = sparse.dia_array((w[np.newaxis, :], [0]), shape=(n, n)).tocsr()
    elif kind is MatrixKind.LAPLACIAN:
        mat = _diag(w) - a
    elif kind is MatrixKind.SIGNLESS_LAPLACIAN:
        mat = _diag(w) + a
    elif kind is MatrixKind.NORMALIZED:
        mat = _scale(a, w, -0.5, -0.5)
    elif kind is MatrixKind.NORM_LAPLACIAN:
        mat = sparse.eye_array(n, format="csr") - _scale(a, w, -0.5, -0.5)
    elif kind is MatrixKind.STOCHASTIC:
        mat = _scale(a, w, -1.0, 0.0)
    elif kind is MatrixKind.STOCHASTIC_COL:
        mat = _scale(a, w, 0.0, -1.0)
    elif kind is MatrixKind.STOCHASTIC_LAPLACIAN:
        mat = sparse.eye_array(n, format="csr") - _scale(a, w, -1.0, 0.0)
    else:  # pragma: no cover
        raise ValueError(kind)
    return Operator(kind, sparse.csr_array(mat), nodes=nodes)


def _directed_weight(g: Graph, out_side: bool) -> np.ndarray:
    aw = np.abs(g.effective_weights)
    side = g.src if out_side else g.dst
    return np.bincount(side - 1, weights=aw, minlength=g.n)


def _diag(w: np.ndarray) -> sparse.csr_array:
    n = len(w)
    return sparse.dia_array((w[np.newaxis, :], [0]), shape=(n, n)).tocsr()


def _scale(a, w, lexp, rexp):
    left = w**lexp if lexp else np.ones_like(w)
    right = w**rexp if rexp else np.ones_like(w)
    out = sparse.csr_array(a, copy=True).astype(np.float64)
    out.data = out.data * left[_row_of(out)] * right[out.indices]
    return out


def _row_of(csr) -> np.ndarray:
    return np.repeat(np.arange(csr.shape[0]), np.diff(csr.indptr))


def _seed_vector(dim: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).standard_normal(dim)


def _diagonal_entries(matrix) -> np.ndarray | None:
    """The diagonal when the matrix has no off-diagonal entries, else None."""
    coo = matrix.tocoo()
    if np.any(coo.row != coo.col):
        return None
    diag = np.zeros(matrix.shape[0])
    diag[coo.row] = coo.data
    return diag


def _eig_diagonal(op: Operator, k: int, order: str, diag: np.ndarray) -> SpectralResult:
    # Krylov iteration cannot separate repeated eigenvalues of a diagonal
    # operator; selecting entries directly is exact
    if order == "smallest":
        idx = np.argsort(diag, kind="stable")[:k]
    else:
        idx = np.argsort(-np.abs(diag), kind="stable")[:k]
    vals = diag[idx]
    vecs = np.zeros((op.dim, k))
    vecs[idx, np.arange(k)] = 1.0
    return SpectralResult(
        kind=op.kind, order=order, values=vals, vectors=vecs,
        residuals=np.zeros(k), nodes=op.nodes, method="diagonal",
    )


def eig_symmetric(
    op: Operator,
    k: int,
    order: str = "largest-absolute",
    strategy: str = "auto",
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
) -> SpectralResult:
    """Top-k eigenpairs of a symmetric operator.

    ``order`` selects by largest absolute value or smallest algebraic value.
    A dense decomposition is used up to DENSE_LIMIT rows unless ``strategy``
    forces the Krylov path.  Residuals are relative to the operator norm.
    """
    if order not in ("largest-absolute", "smallest"):
        raise ValueError(f"unknown order {order!r}")
    if not op.is_symmetric:
        raise IncompatibleGraphError(f"{op.kind.value} is not symmetric")
    n = op.dim
    if k < 1 or k > n:
        raise GraphError(f"k={k} out of range for dimension {n}")
    diag = _diagonal_entries(op.matrix)
    if diag is not None:
        return _eig_diagonal(op, k, order, diag)
    dense = strategy == "dense" or (strategy == "auto" and n <= DENSE_LIMIT)
    if not dense and k >= n:
        dense = True  # Lanczos cannot produce a full spectrum

    if dense:
        vals, vecs = np.linalg.eigh(op.matrix.toarray())
        method = "dense"
    else:
        # Lanczos targets extreme magnitudes; for the smallest eigenvalues,
        # shifting by an upper bound on the largest one maps them onto the
        # extremes, which converges far faster than ARPACK's "SA" mode
        shift = op.norm_bound() if order == "smallest" else 0.0
        matrix = op.matrix
        if shift:
            matrix = (matrix - sparse.eye_array(n, format="csr") * shift).tocsr()
        try:
            vals, vecs = eigsh(
                matrix,
                k=min(k, n - 1),
                which="LM",
                v0=_seed_vector(n, seed),
                maxiter=max(1000, 50 * k),
                tol=tol / 10,
            )
        except ArpackNoConvergence as exc:
            raise SpectralError(
                f"eigensolver did not converge for {op.kind.value}: {exc}",
                residuals=getattr(exc, "eigenvalues", None),
            ) from exc
        vals = vals + shift
        method = "iterative"

    if order == "largest-absolute":
        idx = np.argsort(-np.abs(vals), kind="stable")
    else:
        idx = np.argsort(vals, kind="stable")
    idx = idx[:k]
    vals, vecs = vals[idx], vecs[:, idx]
    residuals = _residuals(op, vals, vecs)
    _check_residuals(op, residuals, tol, method)
    return SpectralResult(
        kind=op.kind, order=order, values=vals, vectors=vecs,
        residuals=residuals, nodes=op.nodes, method=method,
    )


def eig_general(
    op: Operator,
    k: int,
    strategy: str = "auto",
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
) -> SpectralResult:
    """Top-k eigenvalues by modulus of a square (possibly asymmetric) operator.

    The returned set is closed under complex conjugation.
    """
    n = op.dim
    if op.col_nodes is not None:
        raise IncompatibleGraphError("general eigenvalues need a square operator")
    if k < 1 or k > n:
        raise GraphError(f"k={k} out of range for dimension {n}")
    dense = strategy == "dense" or (strategy == "auto" and n <= DENSE_LIMIT)
    if not dense and k >= n - 1:
        dense = True  # ARPACK needs k < n-1 for general problems
    if dense:
        vals, vecs = np.linalg.eig(op.matrix.toarray())
        method = "dense"
    else:
        try:
            vals, vecs = eigs(
                op.matrix,
                k=min(k, n - 2),
                which="LM",
                v0=_seed_vector(n, seed),
                maxiter=max(1000, 50 * k),
                tol=tol / 100,
            )
        except ArpackNoConvergence as exc:
            raise SpectralError(
                f"eigensolver did not converge for {op.kind.value}: {exc}"
            ) from exc
        method = "iterative"
    idx = np.argsort(-np.abs(vals), kind="stable")[:k]
    vals, vecs = vals[idx], vecs[:, idx]
    vals, vecs = _conjugate_close(vals, vecs, op.norm_bound() * 1e-9)
    residuals = _residuals(op, vals, vecs)
    _check_residuals(op, residuals, tol, method)
    return SpectralResult(
        kind=op.kind, order="largest-modulus", values=vals, vectors=vecs,
        residuals=residuals, nodes=op.nodes, method=method,
    )


def svd_biadjacency(
    g: Graph,
    k: int,
    strategy: str = "auto",
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
) -> SpectralResult:
    """Top-k singular triplets of the biadjacency matrix of a bipartite graph."""
    op = build_operator(g, MatrixKind.BIADJACENCY)
    n1, n2 = op.matrix.shape
    if k < 1 or k > min(n1, n2):
        raise GraphError(f"k={k} out of range for shape {op.matrix.shape}")
    dense = strategy == "dense" or (strategy == "auto" and max(n1, n2) <= DENSE_LIMIT)
    if not dense and k >= min(n1, n2):
        dense = True
    if dense:
        u, s, vt = np.linalg.svd(op.matrix.toarray(), full_matrices=False)
        method = "dense"
    else:
        try:
            u, s, vt = svds(
                op.matrix.astype(np.float64),
                k=min(k, min(n1, n2) - 1),
                v0=_seed_vector(min(n1, n2), seed),
                maxiter=max(1000, 50 * k),
                tol=tol / 100,
            )
        except ArpackNoConvergence as exc:
            raise SpectralError(f"SVD did not converge: {exc}") from exc
        method = "iterative"
    idx = np.argsort(-s, kind="stable")[:k]
    u, s, v = u[:, idx], s[idx], vt[idx].T
    b = op.matrix
    scale = max(op.norm_bound(), 1e-30)
    res = np.maximum(
        np.linalg.norm(b @ v - u * s, axis=0),
        np.linalg.norm(b.T @ u - v * s, axis=0),
    ) / scale
    _check_residuals(op, res, tol, method)
    return SpectralResult(
        kind=op.kind, order="singular", values=s, vectors=u,
        residuals=res, nodes=op.nodes, method=method,
        right_vectors=v, col_nodes=op.col_nodes,
    )


def _residuals(op: Operator, vals, vecs) -> np.ndarray:
    mv = op.matrix @ vecs
    res = np.linalg.norm(mv - vecs * vals[np.newaxis, :], axis=0)
    return res / max(op.norm_bound(), 1e-30)


def _check_residuals(op, residuals, tol, method):
    # the dense path is trusted to LAPACK accuracy; only gate the iteration
    if method == "iterative" and len(residuals) and np.max(residuals) > tol:
        raise SpectralError(
            f"residuals up to {np.max(residuals):.3g} exceed tolerance {tol:.3g} "
            f"for {op.kind.value}",
            residuals=residuals,
        )


def _conjugate_close(vals, vecs, tol):
    """Ensure complex values come in conjugate pairs (real input matrices)."""
    vals = np.asarray(vals, dtype=np.complex128)
    keep_vals = list(vals)
    keep_vecs = [vecs[:, i] for i in range(vecs.shape[1])]
    for i, v in enumerate(vals):
        if abs(v.imag) <= tol:
            keep_vals[i] = complex(v.real, 0.0)
            continue
        has_conj = any(abs(w - v.conjugate()) <= 10 * max(tol, 1e-12 * abs(v)) for w in vals)
        if not has_conj:
            keep_vals.append(v.conjugate())
            keep_vecs.append(np.conjugate(keep_vecs[i]))
    order = np.argsort(-np.abs(np.array(keep_vals)), kind="stable")
    vals = np.array([keep_vals[i] for i in order])
    vecs = np.stack([keep_vecs[i] for i in order], axis=1)
    return vals, vecs
