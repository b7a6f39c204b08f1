"""Core containers for block-diagonal spectral calculus on a finite Hilbert space.

The ambient space is ``C^N`` with the sesquilinear inner product
``(f, g) = sum_i f[i] * conj(g[i])`` (linear in the first argument, conjugate
linear in the second).  An :class:`EigenPartition` decomposes ``C^N`` into an
orthogonal direct sum of blocks, each carrying a real eigenvalue, a
multiplicity and an orthonormal basis stored as the columns of an ``(N, d)``
matrix.  Relative to a partition, vectors decompose into per-block coefficient
columns (:class:`CoefficientVector`) and block-preserving operators into
per-block square matrices (:class:`MatrixSymbol`).  Dense operators are plain
complex ``(N, N)`` ndarrays throughout.

All containers are immutable after construction (backing arrays are marked
read-only) and every operation is pure.  Reductions over blocks run in
ascending block order, so results do not depend on evaluation strategy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "IDENTITY_TOL",
    "SPECTRAL_TOL",
    "NumericalContractError",
    "AmbientSpace",
    "EigenBlock",
    "EigenPartition",
    "CoefficientVector",
    "MatrixSymbol",
    "agrees",
    "as_complex_vector",
    "as_square_matrix",
    "project",
    "coefficients",
    "synthesize",
]

#: Default tolerance for exact algebraic identities (round trips, Plancherel).
IDENTITY_TOL = 1e-10

#: Default tolerance for quantities derived from eigen/singular value solvers.
SPECTRAL_TOL = 1e-8


class NumericalContractError(ValueError):
    """An input violates a numerical contract (Hermiticity, unitarity, ...)."""


def agrees(a, b, tol: float = IDENTITY_TOL) -> bool:
    """Hybrid absolute/relative test: ``|a - b| <= tol * max(1, |a|, |b|)``."""
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def as_complex_vector(f, dim: int | None = None, name: str = "vector") -> np.ndarray:
    """Coerce to a 1-D complex128 array, optionally checking its length."""
    arr = np.asarray(f, dtype=np.complex128)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ValueError(f"{name} has length {arr.shape[0]}, expected {dim}")
    return arr


def as_square_matrix(a, dim: int | None = None, name: str = "matrix") -> np.ndarray:
    """Coerce to a square complex128 matrix, optionally checking its side."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ValueError(f"{name} has side {arr.shape[0]}, expected {dim}")
    return arr


def _frozen_copy(a, dtype=np.complex128) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class AmbientSpace:
    """The ``N``-dimensional coordinate model of the Hilbert space.

    ``labels`` optionally names the coordinates (used e.g. by the torus model
    to record which lattice frequency each coordinate represents).
    """

    dim: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"ambient dimension must be >= 1, got {self.dim}")
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != self.dim:
                raise ValueError(f"{len(labels)} labels for dimension {self.dim}")
            object.__setattr__(self, "labels", labels)


@dataclass(frozen=True, eq=False)
class EigenBlock:
    """One orthogonal block: a real eigenvalue plus an orthonormal basis.

    ``basis`` has shape ``(N, d)`` with the block's basis vectors as columns.
    """

    eigenvalue: float
    basis: np.ndarray

    def __post_init__(self) -> None:
        basis = np.asarray(self.basis)
        if basis.ndim != 2 or basis.shape[1] < 1:
            raise ValueError(
                f"block basis must be (N, d) with d >= 1, got shape {basis.shape}"
            )
        object.__setattr__(self, "eigenvalue", float(self.eigenvalue))
        object.__setattr__(self, "basis", _frozen_copy(basis))

    @property
    def multiplicity(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True, eq=False)
class EigenPartition:
    """Orthogonal direct-sum decomposition of the ambient space.

    Invariants, checked on construction:

    * block eigenvalues strictly increase,
    * block multiplicities sum to the ambient dimension,
    * the Gram matrix of the concatenated basis equals the identity to
      within ``IDENTITY_TOL`` entrywise.
    """

    ambient: AmbientSpace
    blocks: tuple[EigenBlock, ...]

    def __post_init__(self) -> None:
        blocks = tuple(self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if not blocks:
            raise ValueError("partition needs at least one block")
        n = self.ambient.dim
        for blk in blocks:
            if blk.basis.shape[0] != n:
                raise ValueError(
                    f"block basis has {blk.basis.shape[0]} rows, ambient dim is {n}"
                )
        lams = [blk.eigenvalue for blk in blocks]
        if any(b <= a for a, b in zip(lams, lams[1:])):
            raise ValueError("block eigenvalues must be strictly increasing")
        if sum(blk.multiplicity for blk in blocks) != n:
            raise ValueError(
                "block multiplicities must sum to the ambient dimension "
                f"({sum(b.multiplicity for b in blocks)} != {n})"
            )
        full = np.hstack([blk.basis for blk in blocks])
        full.setflags(write=False)
        object.__setattr__(self, "_full_basis", full)
        defect = float(np.max(np.abs(full.conj().T @ full - np.eye(n))))
        if defect > IDENTITY_TOL:
            raise ValueError(f"partition basis is not orthonormal (Gram defect {defect:.3e})")

    @property
    def dim(self) -> int:
        return self.ambient.dim

    @property
    def nblocks(self) -> int:
        return len(self.blocks)

    @property
    def eigenvalues(self) -> tuple[float, ...]:
        return tuple(blk.eigenvalue for blk in self.blocks)

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(blk.multiplicity for blk in self.blocks)

    def block_basis(self, j: int) -> np.ndarray:
        return self.blocks[j].basis

    def full_basis(self) -> np.ndarray:
        """All basis columns side by side, ascending blocks: an (N, N) unitary."""
        return self._full_basis

    def block_offsets(self) -> tuple[int, ...]:
        """Starting coordinate of each block in the concatenated basis."""
        offsets = []
        pos = 0
        for blk in self.blocks:
            offsets.append(pos)
            pos += blk.multiplicity
        return tuple(offsets)


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """Per-block coefficient columns of a vector relative to a partition.

    Block ``j`` is a complex column of length ``d_j``; the squared lengths of
    all blocks sum to the squared norm of the synthesized vector.
    """

    blocks: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        cleaned = []
        for i, blk in enumerate(self.blocks):
            arr = np.asarray(blk)
            if arr.ndim != 1 or arr.shape[0] < 1:
                raise ValueError(f"coefficient block {i} must be a nonempty 1-D array")
            cleaned.append(_frozen_copy(arr))
        object.__setattr__(self, "blocks", tuple(cleaned))

    @property
    def block_dims(self) -> tuple[int, ...]:
        return tuple(blk.shape[0] for blk in self.blocks)

    def norm(self) -> float:
        """The square-summed norm over all blocks, in ascending block order."""
        return math.sqrt(
            math.fsum(float(abs(z)) ** 2 for blk in self.blocks for z in blk)
        )


@dataclass(frozen=True, eq=False)
class MatrixSymbol:
    """Blockwise matrix representation of a block-preserving operator.

    Block ``j`` is a complex ``d_j x d_j`` matrix giving the operator's action
    on block ``j`` in the partition's basis.
    """

    blocks: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        cleaned = []
        for i, blk in enumerate(self.blocks):
            arr = np.asarray(blk)
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
                raise ValueError(
                    f"symbol block {i} must be square and nonempty, got shape {arr.shape}"
                )
            cleaned.append(_frozen_copy(arr))
        object.__setattr__(self, "blocks", tuple(cleaned))

    @property
    def block_dims(self) -> tuple[int, ...]:
        return tuple(blk.shape[0] for blk in self.blocks)


def check_aligned(block_dims: Sequence[int], partition: EigenPartition, what: str) -> None:
    """Raise if per-block dimensions do not match the partition multiplicities."""
    if tuple(block_dims) != partition.multiplicities:
        raise ValueError(
            f"{what} blocks {tuple(block_dims)} do not match partition "
            f"multiplicities {partition.multiplicities}"
        )


def project(f, j: int, partition: EigenPartition) -> np.ndarray:
    """Orthogonal projection of ``f`` onto block ``j`` of the partition.

    Returns ``sum_k (f, e_k) e_k`` over the block's basis vectors; idempotent,
    and annihilated by projection onto any other block.
    """
    vec = as_complex_vector(f, partition.dim)
    if not 0 <= j < partition.nblocks:
        raise IndexError(f"block index {j} out of range [0, {partition.nblocks})")
    basis = partition.blocks[j].basis
    return basis @ (basis.conj().T @ vec)


def coefficients(f, partition: EigenPartition) -> CoefficientVector:
    """Analyse ``f`` into per-block coefficient columns.

    Entry ``k`` of block ``j`` is the inner product of ``f`` with the block's
    ``k``-th basis vector (conjugate linear in the basis vector).
    """
    vec = as_complex_vector(f, partition.dim)
    return CoefficientVector(
        tuple(blk.basis.conj().T @ vec for blk in partition.blocks)
    )


def synthesize(coeffs: CoefficientVector, partition: EigenPartition) -> np.ndarray:
    """Rebuild the ambient vector from per-block coefficients.

    Left inverse of :func:`coefficients`: exact by completeness of the
    partition basis, up to floating-point roundoff.
    """
    check_aligned(coeffs.block_dims, partition, "coefficient")
    out = np.zeros(partition.dim, dtype=np.complex128)
    for blk, col in zip(partition.blocks, coeffs.blocks):
        out += blk.basis @ col
    return out
