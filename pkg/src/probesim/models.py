"""Builders for the two physical systems: light-bacteria and qubit-tardigrade.

Parameters are stored in Hz (as quoted in the literature) and consumed as
angular frequencies by default. Each model carries a `time_scale` that
nondimensionalizes the generator: 1e-15 s for the bacteria model (so
trajectory times are in fs) and 1e-9 s for the tardigrade model (times
in ns).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp

from .lindblad import JumpOperator, LindbladGenerator
from .tensorspace import (
    CompositeSpace,
    OperatorMatrix,
    annihilation_op,
    boson,
    embed,
    pauli_op,
    qubit,
)

NOISE_NONE = "none"
NOISE_DECAY = "decay_only"
NOISE_DECAY_DEPHASING = "decay_and_dephasing"
NOISE_CHANNELS = (NOISE_NONE, NOISE_DECAY, NOISE_DECAY_DEPHASING)

FREQ_ANGULAR = "angular"
FREQ_ORDINARY = "ordinary"


def _check_common(noise_channels: str, frequency_convention: str):
    if noise_channels not in NOISE_CHANNELS:
        raise ValueError(f"noise_channels must be one of {NOISE_CHANNELS}")
    if frequency_convention not in (FREQ_ANGULAR, FREQ_ORDINARY):
        raise ValueError("frequency_convention must be 'angular' or 'ordinary'")


@dataclass(frozen=True)
class BacteriaModelParams:
    """Light modes in a cavity coupled to two effective bacteria modes."""

    n_light_modes: int = 4
    light_truncation: int = 5
    bacteria_dim: int = 2
    omega_light_base: float = 1.37e15  # mode m has omega_m = m * base
    Omega: tuple[float, float] = (2.5e15, 4.1e15)
    G: tuple[float, float] = (0.04e15, 0.2e15)  # G_mn = m * G_n
    kappa: float = 7.5e13
    gamma: tuple[float, float] = (0.78e13, 3.63e13)
    kappa_deph: float | None = None  # defaults to kappa
    gamma_deph: tuple[float, float] | None = None  # defaults to gamma
    noise_channels: str = NOISE_DECAY_DEPHASING
    frequency_convention: str = FREQ_ANGULAR
    time_scale: float = 1e-15  # seconds per time unit (fs)

    def __post_init__(self):
        if self.n_light_modes < 1:
            raise ValueError("need at least one light mode")
        if self.light_truncation < 2 or self.bacteria_dim < 2:
            raise ValueError("subsystem dimensions must be >= 2")
        for r in (self.kappa, *self.gamma):
            if r < 0:
                raise ValueError("rates must be non-negative")
        _check_common(self.noise_channels, self.frequency_convention)

    @property
    def kappa_deph_eff(self) -> float:
        return self.kappa if self.kappa_deph is None else self.kappa_deph

    @property
    def gamma_deph_eff(self) -> tuple[float, float]:
        return self.gamma if self.gamma_deph is None else self.gamma_deph


@dataclass(frozen=True)
class TardigradeModelParams:
    """Transmon qubit and tardigrade mode coupled through cavity light modes."""

    omega_q: float = 3.271e9
    omega_l: float = 4.521e9
    omega_t: float = 2.7e9
    g_ql: float = 0.15e9
    f_tl: float = 0.05e9
    kappa_l: float = 3.7e7
    delta_q: float = 2.5e7
    gamma_t: float = 1.8e7
    kappa_l_deph: float | None = None
    delta_q_deph: float | None = None
    gamma_t_deph: float | None = None
    n_light_modes: int = 1
    n_l: int = 5
    n_t: int = 5
    noise_channels: str = NOISE_DECAY_DEPHASING
    frequency_convention: str = FREQ_ANGULAR
    time_scale: float = 1e-9  # seconds per time unit (ns)

    def __post_init__(self):
        if self.n_light_modes not in (1, 2):
            raise ValueError("n_light_modes must be 1 or 2 (degenerate parameters)")
        if self.n_l < 2 or self.n_t < 2:
            raise ValueError("truncations must be >= 2")
        for r in (self.kappa_l, self.delta_q, self.gamma_t):
            if r < 0:
                raise ValueError("rates must be non-negative")
        _check_common(self.noise_channels, self.frequency_convention)

    @property
    def kappa_l_deph_eff(self) -> float:
        return self.kappa_l if self.kappa_l_deph is None else self.kappa_l_deph

    @property
    def delta_q_deph_eff(self) -> float:
        return self.delta_q if self.delta_q_deph is None else self.delta_q_deph

    @property
    def gamma_t_deph_eff(self) -> float:
        return self.gamma_t if self.gamma_t_deph is None else self.gamma_t_deph


def _freq_factor(convention: str) -> float:
    return 2.0 * math.pi if convention == FREQ_ORDINARY else 1.0


def _sparse_embed(op: np.ndarray, site: int, dims: tuple[int, ...]) -> sp.csr_matrix:
    """Kronecker embedding with identities, in CSR form."""
    d_left = int(np.prod(dims[:site], initial=1))
    d_right = int(np.prod(dims[site + 1:], initial=1))
    out = sp.kron(sp.identity(d_left, format="csr"), sp.csr_matrix(op), format="csr")
    return sp.kron(out, sp.identity(d_right, format="csr"), format="csr")


def _ladder(d: int) -> sp.csr_matrix:
    return sp.csr_matrix(np.diag(np.sqrt(np.arange(1, d, dtype=float)), k=1).astype(complex))


def _jump(space, mat: sp.csr_matrix, rate: float) -> JumpOperator:
    return JumpOperator(OperatorMatrix(space, math.sqrt(2.0 * rate) * mat))


def build_bacteria_model(params: BacteriaModelParams) -> tuple[CompositeSpace, LindbladGenerator]:
    p = params
    scale = p.time_scale * _freq_factor(p.frequency_convention)
    m_count = p.n_light_modes
    subs = [boson(p.light_truncation, f"light{m+1}") for m in range(m_count)]
    subs += [boson(p.bacteria_dim, "bactI"), boson(p.bacteria_dim, "bactII")]
    space = CompositeSpace(tuple(subs))
    dims = space.dims

    a_ops = [_sparse_embed(_ladder(p.light_truncation).toarray(), m, dims)
             for m in range(m_count)]
    b_ops = [_sparse_embed(_ladder(p.bacteria_dim).toarray(), m_count + n, dims)
             for n in range(2)]

    h = sp.csr_matrix((space.total_dim, space.total_dim), dtype=complex)
    for m, a in enumerate(a_ops):
        omega_m = (m + 1) * p.omega_light_base * scale
        h = h + omega_m * (a.conj().T @ a)
    for n, b in enumerate(b_ops):
        h = h + (p.Omega[n] * scale) * (b.conj().T @ b)
    for m, a in enumerate(a_ops):
        x_a = a + a.conj().T
        for n, b in enumerate(b_ops):
            g_mn = (m + 1) * p.G[n] * scale
            x_b = b + b.conj().T
            h = h + g_mn * (x_a @ x_b)

    jumps: list[JumpOperator] = []
    if p.noise_channels != NOISE_NONE:
        for a in a_ops:
            jumps.append(_jump(space, a, p.kappa * scale))
        for n, b in enumerate(b_ops):
            jumps.append(_jump(space, b, p.gamma[n] * scale))
    if p.noise_channels == NOISE_DECAY_DEPHASING:
        for a in a_ops:
            jumps.append(_jump(space, a @ a.conj().T, p.kappa_deph_eff * scale))
        for n in range(2):
            site = m_count + n
            if p.bacteria_dim == 2:
                deph = _sparse_embed(pauli_op("z").entries, site, dims)
            else:
                # sigma_z has no canonical d>2 analogue; use b b^dag like the light modes
                b = b_ops[n]
                deph = b @ b.conj().T
            jumps.append(_jump(space, deph, p.gamma_deph_eff[n] * scale))

    gen = LindbladGenerator(OperatorMatrix(space, h), tuple(jumps), space)
    return space, gen


def build_tardigrade_model(params: TardigradeModelParams) -> tuple[CompositeSpace, LindbladGenerator]:
    p = params
    scale = p.time_scale * _freq_factor(p.frequency_convention)
    subs = [boson(p.n_l, f"light{l+1}") for l in range(p.n_light_modes)]
    subs.append(boson(p.n_t, "tardigrade"))
    subs.append(qubit("qubit"))
    space = CompositeSpace(tuple(subs))
    dims = space.dims
    t_site = p.n_light_modes
    q_site = p.n_light_modes + 1

    a_ops = [_sparse_embed(_ladder(p.n_l).toarray(), l, dims)
             for l in range(p.n_light_modes)]
    b_t = _sparse_embed(_ladder(p.n_t).toarray(), t_site, dims)
    sz = _sparse_embed(pauli_op("z").entries, q_site, dims)
    sx = _sparse_embed(pauli_op("x").entries, q_site, dims)
    sm = _sparse_embed(pauli_op("minus").entries, q_site, dims)

    h = sp.csr_matrix((space.total_dim, space.total_dim), dtype=complex)
    h = h + 0.5 * (p.omega_q * scale) * sz
    x_t = b_t + b_t.conj().T
    h = h + (p.omega_t * scale) * (b_t.conj().T @ b_t)
    for a in a_ops:
        x_a = a + a.conj().T
        h = h + (p.omega_l * scale) * (a.conj().T @ a)
        h = h + (p.g_ql * scale) * (sx @ x_a)
        h = h + (p.f_tl * scale) * (x_t @ x_a)

    jumps: list[JumpOperator] = []
    if p.noise_channels != NOISE_NONE:
        for a in a_ops:
            jumps.append(_jump(space, a, p.kappa_l * scale))
        jumps.append(_jump(space, b_t, p.gamma_t * scale))
        jumps.append(_jump(space, sm, p.delta_q * scale))
    if p.noise_channels == NOISE_DECAY_DEPHASING:
        for a in a_ops:
            jumps.append(_jump(space, a @ a.conj().T, p.kappa_l_deph_eff * scale))
        jumps.append(_jump(space, b_t @ b_t.conj().T, p.gamma_t_deph_eff * scale))
        jumps.append(_jump(space, sz, p.delta_q_deph_eff * scale))

    gen = LindbladGenerator(OperatorMatrix(space, h), tuple(jumps), space)
    return space, gen


def scale_noise(params, factor: float):
    """Multiply every decay and dephasing rate by `factor`.

    Used by the noise-exponent sweep axis: exponent i maps to
    factor 10**(2 - i) relative to the default rates (which sit at the
    1e7 order, i.e. i = 2).
    """
    if isinstance(params, TardigradeModelParams):
        return replace(
            params,
            kappa_l=params.kappa_l * factor,
            delta_q=params.delta_q * factor,
            gamma_t=params.gamma_t * factor,
            kappa_l_deph=params.kappa_l_deph_eff * factor,
            delta_q_deph=params.delta_q_deph_eff * factor,
            gamma_t_deph=params.gamma_t_deph_eff * factor,
        )
    if isinstance(params, BacteriaModelParams):
        return replace(
            params,
            kappa=params.kappa * factor,
            gamma=tuple(g * factor for g in params.gamma),
            kappa_deph=params.kappa_deph_eff * factor,
            gamma_deph=tuple(g * factor for g in params.gamma_deph_eff),
        )
    raise TypeError(f"unknown params type {type(params)!r}")
