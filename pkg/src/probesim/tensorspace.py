"""Tensor-product space bookkeeping and elementary operators.

Convention: the first-listed subsystem is the slowest-varying (leftmost)
Kronecker factor. Every operator and state carries a reference to the
CompositeSpace it lives on so dimension mismatches fail loudly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-10
POSITIVITY_TOL = -1e-8


class InvalidDimensionError(ValueError):
    pass


class SpaceMismatchError(ValueError):
    pass


class InvalidStateError(ValueError):
    pass


@dataclass(frozen=True)
class SubsystemSpec:
    """A single factor of the tensor product: a truncated boson mode or a qubit."""

    kind: str  # "boson" or "qubit"
    dim: int
    label: str

    def __post_init__(self):
        if self.kind not in ("boson", "qubit"):
            raise ValueError(f"unknown subsystem kind {self.kind!r}")
        if self.kind == "qubit" and self.dim != 2:
            raise InvalidDimensionError("qubit subsystem must have dimension 2")
        if self.kind == "boson" and self.dim < 2:
            raise InvalidDimensionError(
                f"boson truncation must be >= 2, got {self.dim}"
            )


def boson(dim: int, label: str) -> SubsystemSpec:
    return SubsystemSpec("boson", dim, label)


def qubit(label: str) -> SubsystemSpec:
    return SubsystemSpec("qubit", 2, label)


@dataclass(frozen=True)
class CompositeSpace:
    """Ordered list of subsystems defining the composite Hilbert space."""

    subsystems: tuple[SubsystemSpec, ...]
    total_dim: int = field(init=False)

    def __post_init__(self):
        if not self.subsystems:
            raise ValueError("CompositeSpace needs at least one subsystem")
        object.__setattr__(self, "subsystems", tuple(self.subsystems))
        labels = [s.label for s in self.subsystems]
        if len(set(labels)) != len(labels):
            raise ValueError(f"subsystem labels must be unique, got {labels}")
        object.__setattr__(
            self, "total_dim", int(np.prod([s.dim for s in self.subsystems]))
        )

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.subsystems)

    @property
    def n_subsystems(self) -> int:
        return len(self.subsystems)

    def check_site(self, site: int):
        if not 0 <= site < len(self.subsystems):
            raise IndexError(
                f"site {site} out of range for {len(self.subsystems)} subsystems"
            )


@dataclass(frozen=True)
class OperatorMatrix:
    """Complex square matrix tagged with the space it acts on.

    Entries may be a dense ndarray or a scipy CSR matrix; sparse storage
    pays off for operators on large composite spaces while states stay dense.
    """

    space: CompositeSpace
    entries: np.ndarray

    def __post_init__(self):
        if sp.issparse(self.entries):
            m = sp.csr_matrix(self.entries, dtype=complex)
        else:
            m = np.asarray(self.entries, dtype=complex)
            if m.ndim != 2:
                raise InvalidDimensionError(f"operator must be 2-d, got {m.ndim}-d")
        if m.shape[0] != m.shape[1]:
            raise InvalidDimensionError(f"operator must be square, got {m.shape}")
        if m.shape[0] != self.space.total_dim:
            raise SpaceMismatchError(
                f"operator dim {m.shape[0]} != space dim {self.space.total_dim}"
            )
        object.__setattr__(self, "entries", m)

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.entries)

    def to_dense(self) -> np.ndarray:
        return self.entries.toarray() if self.is_sparse else self.entries

    def dagger(self) -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.entries.conj().T)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if other.space is not self.space and other.space != self.space:
            raise SpaceMismatchError("operator product across different spaces")
        return OperatorMatrix(self.space, self.entries @ other.entries)

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if other.space != self.space:
            raise SpaceMismatchError("operator sum across different spaces")
        return OperatorMatrix(self.space, self.entries + other.entries)

    def __mul__(self, scalar) -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.entries * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite operator on a CompositeSpace.

    `check=False` skips validation; used internally by the integrator where
    the invariants are tracked as diagnostics rather than enforced.
    """

    space: CompositeSpace
    entries: np.ndarray
    check: bool = True

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.shape != (self.space.total_dim, self.space.total_dim):
            raise SpaceMismatchError(
                f"state shape {m.shape} != space dim {self.space.total_dim}"
            )
        object.__setattr__(self, "entries", m)
        if self.check:
            herm = np.max(np.abs(m - m.conj().T))
            if herm > HERMITICITY_TOL:
                raise InvalidStateError(f"state not Hermitian: max |rho-rho^| = {herm:g}")
            tr = np.trace(m)
            if abs(tr - 1.0) > TRACE_TOL:
                raise InvalidStateError(f"state trace {tr} not within {TRACE_TOL} of 1")
            lam_min = float(np.linalg.eigvalsh(m)[0])
            if lam_min < POSITIVITY_TOL:
                raise InvalidStateError(f"state has eigenvalue {lam_min:g} < {POSITIVITY_TOL}")

    @property
    def dim(self) -> int:
        return self.space.total_dim


def single_site_space(spec: SubsystemSpec) -> CompositeSpace:
    return CompositeSpace((spec,))


def annihilation_op(d: int, label: str = "mode") -> OperatorMatrix:
    """Truncated bosonic annihilation operator: A[i, i+1] = sqrt(i+1)."""
    if d < 2:
        raise InvalidDimensionError(f"annihilation operator needs d >= 2, got {d}")
    a = np.diag(np.sqrt(np.arange(1, d, dtype=float)), k=1).astype(complex)
    return OperatorMatrix(single_site_space(boson(d, label)), a)


def creation_op(d: int, label: str = "mode") -> OperatorMatrix:
    return annihilation_op(d, label).dagger()


_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "minus": np.array([[0, 1], [0, 0]], dtype=complex),  # |0><1|
    "plus": np.array([[0, 0], [1, 0]], dtype=complex),  # |1><0|
}


def pauli_op(which: str, label: str = "qubit") -> OperatorMatrix:
    """Pauli / ladder matrix in the {|0>, |1>} basis; sigma_minus maps |1> -> |0>."""
    if which not in _PAULI:
        raise ValueError(f"unknown Pauli {which!r}; expected one of {sorted(_PAULI)}")
    return OperatorMatrix(single_site_space(qubit(label)), _PAULI[which].copy())


def embed(op: OperatorMatrix, site: int, space: CompositeSpace) -> OperatorMatrix:
    """Embed a single-subsystem operator at `site`, identities elsewhere."""
    space.check_site(site)
    d = space.subsystems[site].dim
    if op.entries.shape[0] != d:
        raise SpaceMismatchError(
            f"operator dim {op.entries.shape[0]} != subsystem dim {d} at site {site}"
        )
    dims = space.dims
    d_left = int(np.prod(dims[:site], initial=1))
    d_right = int(np.prod(dims[site + 1:], initial=1))
    full = np.kron(np.kron(np.eye(d_left), op.entries), np.eye(d_right))
    return OperatorMatrix(space, full)


def identity_op(space: CompositeSpace) -> OperatorMatrix:
    return OperatorMatrix(space, np.eye(space.total_dim, dtype=complex))


def ground_state(space: CompositeSpace) -> DensityMatrix:
    """|0...0><0...0| on the composite space."""
    m = np.zeros((space.total_dim, space.total_dim), dtype=complex)
    m[0, 0] = 1.0
    return DensityMatrix(space, m)
