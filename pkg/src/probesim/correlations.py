"""Reduced states and correlation measures: purity, entropy, negativity,
mutual information and two-qubit quantum discord.

Entropic quantities are in bits (log base 2) unless `log_base` says
otherwise. Eigenvalues in [-1e-12, 0] are clamped to zero before
negativity sums; anything below -1e-8 in a state is treated as a fault.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .tensorspace import CompositeSpace, DensityMatrix, InvalidStateError

NEGATIVITY_CUTOFF = 1e-12
EIGENVALUE_FAULT = -1e-8


@dataclass(frozen=True)
class Bipartition:
    side_a: tuple[int, ...]
    side_b: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "side_a", tuple(self.side_a))
        object.__setattr__(self, "side_b", tuple(self.side_b))
        if set(self.side_a) & set(self.side_b):
            raise ValueError("bipartition sides must be disjoint")
        if not self.side_a or not self.side_b:
            raise ValueError("both sides of a bipartition must be non-empty")

    def validate_full(self, space: CompositeSpace):
        covered = set(self.side_a) | set(self.side_b)
        if covered != set(range(space.n_subsystems)):
            raise ValueError(
                f"bipartition {sorted(covered)} must cover all "
                f"{space.n_subsystems} subsystems"
            )


def _as_tensor(rho: DensityMatrix) -> np.ndarray:
    dims = rho.space.dims
    return rho.entries.reshape(dims + dims)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Reduced state on `keep` (subsystem indices), in their original order."""
    keep = sorted(set(keep))
    n = rho.space.n_subsystems
    if not keep:
        raise ValueError("keep set must be non-empty")
    if any(k < 0 or k >= n for k in keep):
        raise IndexError(f"keep indices {keep} out of range for {n} subsystems")
    t = _as_tensor(rho)
    traced = [i for i in range(n) if i not in keep]
    for offset, i in enumerate(traced):
        ax = i - sum(1 for j in traced[:offset] if j < i)
        nkept = t.ndim // 2
        t = np.trace(t, axis1=ax, axis2=ax + nkept)
    dims = tuple(rho.space.dims[k] for k in keep)
    d = int(np.prod(dims))
    sub = CompositeSpace(tuple(rho.space.subsystems[k] for k in keep))
    return DensityMatrix(sub, t.reshape(d, d), check=False)


def partial_transpose(rho: DensityMatrix, part: Bipartition) -> np.ndarray:
    """Transpose the side_b factors only; returns a Hermitian matrix."""
    part.validate_full(rho.space)
    n = rho.space.n_subsystems
    t = _as_tensor(rho)
    perm = list(range(2 * n))
    for b in part.side_b:
        perm[b], perm[b + n] = perm[b + n], perm[b]
    d = rho.space.total_dim
    return t.transpose(perm).reshape(d, d)


def negativity(rho: DensityMatrix, part: Bipartition) -> float:
    """N = sum |negative eigenvalues of rho^{T_B}|."""
    pt = partial_transpose(rho, part)
    lam = np.linalg.eigvalsh(pt)
    neg = lam[lam < -NEGATIVITY_CUTOFF]
    return float(-neg.sum()) if neg.size else 0.0


def purity(rho: DensityMatrix) -> float:
    m = rho.entries
    return float(np.real(np.einsum("ij,ji->", m, m)))


def _entropy_from_eigs(lam: np.ndarray, log_base: float) -> float:
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < EIGENVALUE_FAULT):
        raise InvalidStateError(f"eigenvalue {lam.min():g} below {EIGENVALUE_FAULT}")
    lam = np.clip(lam, 0.0, 1.0)
    nz = lam[lam > 0.0]
    return float(-(nz * (np.log(nz) / np.log(log_base))).sum())


def von_neumann_entropy(rho: DensityMatrix, log_base: float = 2.0) -> float:
    return _entropy_from_eigs(np.linalg.eigvalsh(rho.entries), log_base)


def mutual_information(rho: DensityMatrix, part: Bipartition, log_base: float = 2.0) -> float:
    part.validate_full(rho.space)
    s_a = von_neumann_entropy(partial_trace(rho, part.side_a), log_base)
    s_b = von_neumann_entropy(partial_trace(rho, part.side_b), log_base)
    s_ab = von_neumann_entropy(rho, log_base)
    return max(s_a + s_b - s_ab, 0.0)


def _projector_grid(n_theta: int, n_phi: int) -> np.ndarray:
    """Stack of rank-1 projectors (I + n.sigma)/2 over a Bloch hemisphere grid."""
    theta = np.linspace(0.0, np.pi / 2, n_theta)
    phi = np.linspace(0.0, 2 * np.pi, n_phi, endpoint=False)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    return _projectors(tt.ravel(), pp.ravel())


def _projectors(theta, phi) -> np.ndarray:
    theta = np.atleast_1d(theta)
    phi = np.atleast_1d(phi)
    nx = np.sin(theta) * np.cos(phi)
    ny = np.sin(theta) * np.sin(phi)
    nz = np.cos(theta)
    p = np.empty((theta.size, 2, 2), dtype=complex)
    p[:, 0, 0] = (1 + nz) / 2
    p[:, 1, 1] = (1 - nz) / 2
    p[:, 0, 1] = (nx - 1j * ny) / 2
    p[:, 1, 0] = (nx + 1j * ny) / 2
    return p


def _binary_entropy_stack(states: np.ndarray, log_base: float) -> np.ndarray:
    """Entropy of a stack of 2x2 density matrices (already unit trace)."""
    lam = np.linalg.eigvalsh(states)
    lam = np.clip(lam, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(lam > 0.0, lam * np.log(lam), 0.0)
    return -terms.sum(axis=-1) / np.log(log_base)


def _classical_correlation(
    rho4: np.ndarray, projs: np.ndarray, measured_side: int, s_other: float, log_base: float
) -> np.ndarray:
    """J for a stack of measurement directions.

    rho4 is the state reshaped to (2, 2, 2, 2) as rho[(a, b), (c, d)].
    The conditional (unnormalized) state of the unmeasured qubit is
    Tr_measured[rho (Pi on measured side)] for each of the two outcomes.
    """
    out = np.zeros(projs.shape[0])
    for pi in (projs, np.eye(2)[None, :, :] - projs):
        if measured_side == 1:
            cond = np.einsum("abcd,gdb->gac", rho4, pi)
        else:
            cond = np.einsum("abcd,gca->gbd", rho4, pi)
        p = np.real(np.einsum("gaa->g", cond))
        p_safe = np.where(p > 1e-15, p, 1.0)
        norm = 0.5 * (cond + np.conj(np.swapaxes(cond, -1, -2))) / p_safe[:, None, None]
        s_cond = _binary_entropy_stack(norm, log_base)
        out += np.where(p > 1e-15, p * s_cond, 0.0)
    return s_other - out


def discord_two_qubit(
    rho: DensityMatrix,
    measured_side: int = 1,
    n_theta: int = 64,
    n_phi: int = 128,
    log_base: float = 2.0,
) -> float:
    """Quantum discord D = I - max_Pi J with projective measurements on
    `measured_side`, via a Bloch-hemisphere grid plus local refinement."""
    if rho.space.dims != (2, 2):
        raise ValueError(f"discord_two_qubit needs a [2, 2] space, got {rho.space.dims}")
    if measured_side not in (0, 1):
        raise ValueError("measured_side must be 0 or 1")
    other = 1 - measured_side
    total_mi = mutual_information(rho, Bipartition((0,), (1,)), log_base)
    s_other = von_neumann_entropy(partial_trace(rho, [other]), log_base)
    rho4 = rho.entries.reshape(2, 2, 2, 2)

    projs = _projector_grid(n_theta, n_phi)
    j_grid = _classical_correlation(rho4, projs, measured_side, s_other, log_base)
    best = int(np.argmax(j_grid))
    theta0 = np.linspace(0.0, np.pi / 2, n_theta)[best // n_phi]
    phi0 = np.linspace(0.0, 2 * np.pi, n_phi, endpoint=False)[best % n_phi]

    def neg_j(x):
        return -float(
            _classical_correlation(
                rho4, _projectors(x[0], x[1]), measured_side, s_other, log_base
            )[0]
        )

    res = minimize(neg_j, [theta0, phi0], method="Nelder-Mead",
                   options={"xatol": 1e-6, "fatol": 1e-10})
    j_best = max(float(j_grid[best]), -float(res.fun))
    d = max(total_mi - j_best, 0.0)
    # same measure cutoff as negativity: sub-1e-12 values are numerical noise
    return 0.0 if d < NEGATIVITY_CUTOFF else d
