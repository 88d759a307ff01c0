"""GKSL generator assembly and time propagation.

Sign convention: drho/dt = -i[H, rho] + sum_a (L_a rho L_a^dag
- 1/2 L_a^dag L_a rho - 1/2 rho L_a^dag L_a), with hbar = 1 and all
frequencies read as angular frequencies.

The superoperator oracle uses the column-stacking convention
vec(rho) = rho.flatten(order='F'), so vec(A X B) = (B^T kron A) vec(X).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .tensorspace import (
    CompositeSpace,
    DensityMatrix,
    HERMITICITY_TOL,
    OperatorMatrix,
    SpaceMismatchError,
)

SUPEROP_DIM_GUARD = 64


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class JumpOperator:
    """A Lindblad jump operator with its rate prefactor already folded in
    (the stored matrix is e.g. sqrt(2*kappa) * a)."""

    matrix: OperatorMatrix


@dataclass(frozen=True)
class LindbladGenerator:
    hamiltonian: OperatorMatrix
    jumps: tuple[JumpOperator, ...]
    space: CompositeSpace

    def __post_init__(self):
        object.__setattr__(self, "jumps", tuple(self.jumps))
        h = self.hamiltonian.entries
        delta = h - h.conj().T
        herm = abs(delta).max() if sp.issparse(delta) else np.max(np.abs(delta))
        if herm > HERMITICITY_TOL:
            raise ValueError(f"Hamiltonian not Hermitian: max deviation {herm:g}")
        if self.hamiltonian.space != self.space:
            raise SpaceMismatchError("Hamiltonian space differs from generator space")
        for j in self.jumps:
            if j.matrix.entries.shape[0] != self.space.total_dim:
                raise SpaceMismatchError("jump operator dimension mismatch")


@dataclass(frozen=True)
class IntegratorConfig:
    t_final: float
    n_samples: int = 200
    method: str = "adaptive_embedded_rk"  # or "fixed_rk4"
    dt_initial: float = 1e-3
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10

    def __post_init__(self):
        if self.method not in ("adaptive_embedded_rk", "fixed_rk4"):
            raise ValueError(f"unknown integrator method {self.method!r}")
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.t_final <= 0:
            raise ValueError("t_final must be positive")
        if self.n_samples < 2:
            raise ValueError("n_samples must be >= 2")


@dataclass
class Trajectory:
    times: np.ndarray
    states: Optional[list[DensityMatrix]]
    trace_drift: float  # max |Tr rho - 1| seen at samples
    hermiticity_drift: float  # max entrywise |rho - rho^dag| before symmetrization
    n_steps: int
    n_rejected: int


class CompiledLiouvillian:
    """One-time sparse compilation of a generator for repeated application.

    Uses H_nh = H - (i/2) sum L^dag L, so each application is two
    sparse-dense products for the coherent/anticommutator part plus two
    per jump, never materializing the dim^2 x dim^2 superoperator.
    """

    def __init__(self, gen: LindbladGenerator):
        self.space = gen.space
        d = gen.space.total_dim
        h = sp.csr_matrix(gen.hamiltonian.entries)
        k = sp.csr_matrix((d, d), dtype=complex)
        for j in gen.jumps:
            m = sp.csr_matrix(j.matrix.entries)
            k = k + m.conj().T @ m
        self._hnh = _kernels.SparseOp(h - 0.5j * k)
        self._jumps = [_kernels.SparseOp(j.matrix.entries) for j in gen.jumps]
        self._buf_a = np.empty((d, d), dtype=complex)
        self._buf_b = np.empty((d, d), dtype=complex)

    def apply(self, rho: np.ndarray, out: Optional[np.ndarray] = None) -> np.ndarray:
        d = rho.shape[0]
        if out is None:
            out = np.empty((d, d), dtype=complex)
        a, b = self._buf_a, self._buf_b
        # -i (H_nh rho - rho H_nh^dag); CSC of H_nh^dag reuses the CSR of conj(H_nh)
        self._hnh.left(rho, a)
        self._hnh.right_dag(rho, b)
        np.subtract(a, b, out=out)
        out *= -1j
        for L in self._jumps:
            L.left(rho, a)
            L.right_dag(a, b)
            out += b
        return out


def liouvillian_apply(gen: LindbladGenerator, rho: DensityMatrix | np.ndarray) -> np.ndarray:
    """drho/dt for a single state; compile once via CompiledLiouvillian for loops."""
    if isinstance(rho, DensityMatrix):
        if rho.space != gen.space:
            raise SpaceMismatchError("state space differs from generator space")
        rho = rho.entries
    return CompiledLiouvillian(gen).apply(np.ascontiguousarray(rho, dtype=complex))


def materialize_superoperator(gen: LindbladGenerator) -> np.ndarray:
    """Explicit superoperator S with vec(drho/dt) = S vec(rho), column stacking."""
    d = gen.space.total_dim
    if d > SUPEROP_DIM_GUARD:
        raise ValueError(
            f"total_dim {d} exceeds superoperator guard {SUPEROP_DIM_GUARD}"
        )
    eye = np.eye(d)
    h = gen.hamiltonian.to_dense()
    s = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for j in gen.jumps:
        m = j.matrix.to_dense()
        mm = m.conj().T @ m
        s += np.kron(m.conj(), m)
        s -= 0.5 * np.kron(eye, mm)
        s -= 0.5 * np.kron(mm.T, eye)
    return s


# Dormand-Prince 5(4) embedded pair.
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


def _error_norm(err: np.ndarray, y0: np.ndarray, y1: np.ndarray, rtol: float, atol: float) -> float:
    scale = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.sqrt(np.mean(np.abs(err / scale) ** 2)))


def _adaptive_steps(
    rhs: Callable[[np.ndarray], np.ndarray],
    rho: np.ndarray,
    sample_times: np.ndarray,
    cfg: IntegratorConfig,
) -> Iterator[tuple[float, np.ndarray, int, int]]:
    """Yield (t_sample, rho, n_steps_so_far, n_rejected_so_far) at each sample.

    Steps are clamped so that every sample time is hit exactly.
    """
    t = 0.0
    dt = min(cfg.dt_initial, cfg.t_final / (cfg.n_samples - 1))
    n_steps = 0
    n_rejected = 0
    dt_min = 1e-14 * cfg.t_final
    yield sample_times[0], rho, n_steps, n_rejected
    k = [None] * 7
    for t_target in sample_times[1:]:
        while t < t_target - 1e-12 * cfg.t_final:
            h = min(dt, t_target - t)
            k[0] = rhs(rho)
            for i in range(1, 7):
                y = rho.copy()
                for j, a in enumerate(_DP_A[i]):
                    if a != 0.0:
                        y += (h * a) * k[j]
                k[i] = rhs(y)
            y5 = rho.copy()
            for i in range(7):
                if _DP_B5[i] != 0.0:
                    y5 += (h * _DP_B5[i]) * k[i]
            err = np.zeros_like(rho)
            for i in range(7):
                db = _DP_B5[i] - _DP_B4[i]
                if db != 0.0:
                    err += (h * db) * k[i]
            enorm = _error_norm(err, rho, y5, cfg.rel_tol, cfg.abs_tol)
            if enorm <= 1.0:
                t += h
                rho = y5
                n_steps += 1
                factor = 5.0 if enorm == 0.0 else min(5.0, 0.9 * enorm ** -0.2)
                dt = h * max(0.2, factor)
            else:
                n_rejected += 1
                dt = h * max(0.2, 0.9 * enorm ** -0.2)
                if dt < dt_min:
                    raise IntegrationError(
                        f"step size underflow at t={t:g} (dt={dt:g})"
                    )
        t = t_target
        yield t_target, rho, n_steps, n_rejected


def _fixed_rk4_steps(
    rhs: Callable[[np.ndarray], np.ndarray],
    rho: np.ndarray,
    sample_times: np.ndarray,
    cfg: IntegratorConfig,
) -> Iterator[tuple[float, np.ndarray, int, int]]:
    n_steps = 0
    yield sample_times[0], rho, n_steps, 0
    for t0, t1 in zip(sample_times[:-1], sample_times[1:]):
        span = t1 - t0
        n_sub = max(1, int(round(span / cfg.dt_initial)))
        h = span / n_sub
        for _ in range(n_sub):
            k1 = rhs(rho)
            k2 = rhs(rho + 0.5 * h * k1)
            k3 = rhs(rho + 0.5 * h * k2)
            k4 = rhs(rho + h * k3)
            rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            n_steps += 1
        yield t1, rho, n_steps, 0


def evolve_samples(
    gen: LindbladGenerator,
    rho0: DensityMatrix,
    cfg: IntegratorConfig,
) -> Iterator[tuple[float, np.ndarray, dict]]:
    """Yield (t, rho, stats) at each of the n_samples uniform sample times.

    Each yielded state is symmetrized ((rho + rho^dag)/2); the pre-symmetrization
    Hermiticity deviation and the trace drift are reported in `stats`. The trace
    is never renormalized.
    """
    if rho0.space != gen.space:
        raise SpaceMismatchError("initial state space differs from generator space")
    rho = np.ascontiguousarray(rho0.entries, dtype=complex)
    sample_times = np.linspace(0.0, cfg.t_final, cfg.n_samples)
    compiled = CompiledLiouvillian(gen)
    rhs = compiled.apply
    stepper = _adaptive_steps if cfg.method == "adaptive_embedded_rk" else _fixed_rk4_steps
    for t, state, n_steps, n_rej in stepper(rhs, rho, sample_times, cfg):
        herm = float(np.max(np.abs(state - state.conj().T)))
        sym = 0.5 * (state + state.conj().T)
        stats = {
            "hermiticity_drift": herm,
            "trace_drift": abs(np.trace(sym) - 1.0),
            "n_steps": n_steps,
            "n_rejected": n_rej,
        }
        yield t, sym, stats


def evolve(gen: LindbladGenerator, rho0: DensityMatrix, cfg: IntegratorConfig) -> Trajectory:
    times = []
    states = []
    trace_drift = 0.0
    herm_drift = 0.0
    n_steps = n_rej = 0
    for t, rho, stats in evolve_samples(gen, rho0, cfg):
        times.append(t)
        states.append(DensityMatrix(gen.space, rho, check=False))
        trace_drift = max(trace_drift, stats["trace_drift"])
        herm_drift = max(herm_drift, stats["hermiticity_drift"])
        n_steps = stats["n_steps"]
        n_rej = stats["n_rejected"]
    return Trajectory(
        times=np.array(times),
        states=states,
        trace_drift=trace_drift,
        hermiticity_drift=herm_drift,
        n_steps=n_steps,
        n_rejected=n_rej,
    )
