"""Build an :class:`~fmc.core.EigenPartition` from a Hermitian reference operator.

The pipeline is eigendecomposition followed by clustering of numerically
coincident eigenvalues: each cluster becomes one block whose eigenvalue is the
cluster mean and whose basis is the corresponding eigenvector columns,
re-orthonormalized within the block by modified Gram-Schmidt.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    AmbientSpace,
    EigenBlock,
    EigenPartition,
    NumericalContractError,
    as_square_matrix,
)

__all__ = [
    "HERMITIAN_TOL",
    "ClusteringPolicy",
    "hermitian_eigendecompose",
    "cluster_eigenvalues",
    "partition_from_operator",
]

#: Entrywise tolerance (relative to max(1, largest entry)) for accepting an
#: operator as Hermitian before symmetrizing.
HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class ClusteringPolicy:
    """Merge thresholds for grouping nearly equal eigenvalues into one block.

    Consecutive ascending values ``v <= w`` land in the same block iff
    ``w - v <= max(abs_tol, rel_tol * max(|v|, |w|))``.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12

    def __post_init__(self) -> None:
        if self.rel_tol < 0 or self.abs_tol < 0:
            raise ValueError("clustering tolerances must be nonnegative")
        if self.rel_tol == 0 and self.abs_tol == 0:
            raise ValueError("at least one clustering tolerance must be positive")

    def merges(self, v: float, w: float) -> bool:
        return abs(w - v) <= max(self.abs_tol, self.rel_tol * max(abs(v), abs(w)))


def hermitian_eigendecompose(op) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of ``op``.

    ``op`` must be Hermitian to within :data:`HERMITIAN_TOL`; it is replaced
    by ``(op + op*)/2`` before decomposition so the returned data is exactly
    that of a Hermitian matrix.

    Raises
    ------
    NumericalContractError
        If ``op`` is non-Hermitian beyond tolerance or the decomposition
        fails to converge.
    """
    mat = as_square_matrix(op, name="operator")
    scale = max(1.0, float(np.max(np.abs(mat))))
    defect = float(np.max(np.abs(mat - mat.conj().T)))
    if defect > HERMITIAN_TOL * scale:
        raise NumericalContractError(
            f"operator is not Hermitian: max |E - E*| = {defect:.3e} "
            f"exceeds {HERMITIAN_TOL:g} * max(1, |E|_max)"
        )
    mat = (mat + mat.conj().T) / 2.0
    try:
        values, vectors = np.linalg.eigh(mat)
    except np.linalg.LinAlgError as exc:
        raise NumericalContractError(f"eigendecomposition did not converge: {exc}") from exc
    return values, vectors


def _orthonormalize_columns(cols: np.ndarray) -> np.ndarray:
    # Modified Gram-Schmidt; input columns are already near-orthonormal, this
    # just pins the block basis deterministically.
    q = np.array(cols, dtype=np.complex128)
    for k in range(q.shape[1]):
        for i in range(k):
            q[:, k] -= (q[:, i].conj() @ q[:, k]) * q[:, i]
        nrm = np.linalg.norm(q[:, k])
        if nrm == 0.0:
            raise NumericalContractError("degenerate block basis during re-orthonormalization")
        q[:, k] /= nrm
    return q


def cluster_eigenvalues(values, vectors, policy: ClusteringPolicy | None = None) -> EigenPartition:
    """Group an ascending eigensystem into blocks of coincident eigenvalues.

    Each maximal run of consecutive values within the policy's merge threshold
    becomes one block; the block eigenvalue is the mean of its members and the
    block basis is the matching eigenvector columns.  Clustering is total: any
    ascending input yields a valid partition.
    """
    if policy is None:
        policy = ClusteringPolicy()
    vals = np.asarray(values, dtype=float)
    if vals.ndim != 1 or vals.size < 1:
        raise ValueError("eigenvalues must be a nonempty 1-D array")
    if np.any(np.diff(vals) < 0):
        raise ValueError("eigenvalues must be ascending")
    vecs = np.asarray(vectors, dtype=np.complex128)
    if vecs.ndim != 2 or vecs.shape[1] != vals.size:
        raise ValueError(
            f"eigenvector array shape {vecs.shape} does not match {vals.size} eigenvalues"
        )

    blocks = []
    start = 0
    for i in range(1, vals.size + 1):
        if i < vals.size and policy.merges(vals[i - 1], vals[i]):
            continue
        lam = float(np.mean(vals[start:i]))
        basis = _orthonormalize_columns(vecs[:, start:i])
        blocks.append(EigenBlock(lam, basis))
        start = i
    return EigenPartition(AmbientSpace(vecs.shape[0]), tuple(blocks))


def partition_from_operator(op, policy: ClusteringPolicy | None = None) -> EigenPartition:
    """Eigendecompose a Hermitian operator and cluster it into a partition.

    The returned partition satisfies all :class:`~fmc.core.EigenPartition`
    invariants (validated on construction) and reconstructs the symmetrized
    operator as the eigenvalue-weighted sum of its block projections.
    """
    values, vectors = hermitian_eigendecompose(op)
    return cluster_eigenvalues(values, vectors, policy)
