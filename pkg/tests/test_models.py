import numpy as np
import pytest

from probesim.lindblad import IntegratorConfig, evolve
from probesim.models import (
    NOISE_DECAY,
    NOISE_DECAY_DEPHASING,
    NOISE_NONE,
    BacteriaModelParams,
    TardigradeModelParams,
    build_bacteria_model,
    build_tardigrade_model,
    scale_noise,
)
from probesim.tensorspace import ground_state


def hermiticity(h):
    return np.max(np.abs(h - h.conj().T))


def test_bacteria_default_dims():
    space, gen = build_bacteria_model(BacteriaModelParams())
    assert space.total_dim == 5**4 * 2**2 == 2500
    assert space.dims == (5, 5, 5, 5, 2, 2)


def test_bacteria_small_hamiltonian_oracle():
    # M=1, truncation 2: build the 8x8 H independently with raw Kroneckers
    p = BacteriaModelParams(n_light_modes=1, light_truncation=2,
                            noise_channels=NOISE_NONE)
    space, gen = build_bacteria_model(p)
    assert space.total_dim == 8
    h = gen.hamiltonian.to_dense()
    assert hermiticity(h) < 1e-12

    s = p.time_scale
    a = np.array([[0, 1], [0, 0]], dtype=complex)
    num = a.conj().T @ a
    x = a + a.conj().T
    eye = np.eye(2)
    ref = p.omega_light_base * s * np.kron(np.kron(num, eye), eye)
    ref += p.Omega[0] * s * np.kron(np.kron(eye, num), eye)
    ref += p.Omega[1] * s * np.kron(np.kron(eye, eye), num)
    ref += p.G[0] * s * np.kron(np.kron(x, x), eye)
    ref += p.G[1] * s * np.kron(np.kron(x, eye), x)
    assert np.allclose(h, ref, atol=1e-12)

    # <1,0,0| H |0,1,0> = G_1I: indices 4 and 2 with dims (2,2,2)
    assert np.isclose(h[4, 2], p.G[0] * s)


def test_bacteria_zero_coupling_block_diagonal():
    p = BacteriaModelParams(n_light_modes=2, light_truncation=3,
                            G=(0.0, 0.0), noise_channels=NOISE_DECAY)
    space, gen = build_bacteria_model(p)
    rho0 = ground_state(space)
    traj = evolve(gen, rho0, IntegratorConfig(t_final=10.0, n_samples=5))
    # uncoupled decay from ground state: state stays |0..0><0..0|
    assert np.allclose(traj.states[-1].entries, rho0.entries, atol=1e-10)


def test_bacteria_jump_counts():
    m = 2
    for channels, expected in ((NOISE_NONE, 0), (NOISE_DECAY, m + 2),
                               (NOISE_DECAY_DEPHASING, 2 * (m + 2))):
        _, gen = build_bacteria_model(
            BacteriaModelParams(n_light_modes=m, light_truncation=3,
                                noise_channels=channels))
        assert len(gen.jumps) == expected


def test_bacteria_permutation_covariance():
    # swapping the roles of the two light modes permutes H by the matching
    # Kronecker permutation
    base = BacteriaModelParams(n_light_modes=2, light_truncation=3,
                               noise_channels=NOISE_NONE)
    space, gen = build_bacteria_model(base)
    d = 3
    # permutation exchanging the two light-mode factors
    perm = np.zeros((space.total_dim, space.total_dim))
    for i in range(d):
        for j in range(d):
            for k in range(4):
                perm[(j * d + i) * 4 + k, (i * d + j) * 4 + k] = 1
    h = gen.hamiltonian.to_dense()
    h_sw = perm @ h @ perm.T
    # mode swap exchanges the mode-dependent coefficients omega_m and G_mn
    s = base.time_scale
    from probesim.tensorspace import annihilation_op, embed

    a1 = embed(annihilation_op(3), 0, space).entries
    a2 = embed(annihilation_op(3), 1, space).entries
    b = [embed(annihilation_op(2), 2 + n, space).entries for n in range(2)]
    ref = np.zeros_like(h)
    # mode 1 gets mode 2's coefficients and vice versa
    for coeff_m, a in ((2, a1), (1, a2)):
        ref += coeff_m * base.omega_light_base * s * (a.conj().T @ a)
        for n in range(2):
            ref += coeff_m * base.G[n] * s * ((a + a.conj().T) @ (b[n] + b[n].conj().T))
    for n in range(2):
        ref += base.Omega[n] * s * (b[n].conj().T @ b[n])
    assert np.allclose(h_sw, ref, atol=1e-12)


def test_tardigrade_default_dims():
    space, gen = build_tardigrade_model(TardigradeModelParams())
    assert space.total_dim == 50
    assert space.dims == (5, 5, 2)


def test_tardigrade_two_modes():
    space, _ = build_tardigrade_model(TardigradeModelParams(n_light_modes=2))
    assert space.total_dim == 250


def test_tardigrade_hermitian():
    _, gen = build_tardigrade_model(TardigradeModelParams())
    assert hermiticity(gen.hamiltonian.to_dense()) < 1e-12


def test_tardigrade_jump_counts():
    for channels, expected in ((NOISE_NONE, 0), (NOISE_DECAY, 3),
                               (NOISE_DECAY_DEPHASING, 6)):
        _, gen = build_tardigrade_model(
            TardigradeModelParams(noise_channels=channels))
        assert len(gen.jumps) == expected


def test_tardigrade_no_direct_qubit_tardigrade_coupling():
    # zeroing the light couplings makes H exactly block-local
    p = TardigradeModelParams(g_ql=0.0, f_tl=0.0, noise_channels=NOISE_NONE)
    space, gen = build_tardigrade_model(p)
    from probesim.tensorspace import annihilation_op, embed, pauli_op

    s = p.time_scale
    a = embed(annihilation_op(5), 0, space).entries
    b = embed(annihilation_op(5), 1, space).entries
    sz = embed(pauli_op("z"), 2, space).entries
    ref = (p.omega_l * s * a.conj().T @ a + p.omega_t * s * b.conj().T @ b
           + 0.5 * p.omega_q * s * sz)
    assert np.allclose(gen.hamiltonian.to_dense(), ref, atol=1e-12)


def test_tardigrade_uncoupled_qubit_population_constant():
    p = TardigradeModelParams(g_ql=0.0, f_tl=0.0, noise_channels=NOISE_NONE)
    space, gen = build_tardigrade_model(p)
    traj = evolve(gen, ground_state(space), IntegratorConfig(t_final=5.0, n_samples=5))
    for state in traj.states:
        assert np.allclose(state.entries, traj.states[0].entries, atol=1e-10)


def test_param_validation():
    with pytest.raises(ValueError):
        BacteriaModelParams(n_light_modes=0)
    with pytest.raises(ValueError):
        BacteriaModelParams(kappa=-1.0)
    with pytest.raises(ValueError):
        TardigradeModelParams(n_light_modes=3)
    with pytest.raises(ValueError):
        TardigradeModelParams(noise_channels="loud")


def test_scale_noise():
    p = TardigradeModelParams()
    q = scale_noise(p, 10.0)
    assert q.kappa_l == pytest.approx(p.kappa_l * 10)
    assert q.delta_q_deph_eff == pytest.approx(p.delta_q * 10)
    b = BacteriaModelParams()
    qb = scale_noise(b, 0.1)
    assert qb.gamma[1] == pytest.approx(b.gamma[1] * 0.1)
    assert qb.kappa_deph_eff == pytest.approx(b.kappa * 0.1)


def test_ordinary_frequency_convention():
    p_ang = TardigradeModelParams(noise_channels=NOISE_NONE)
    p_ord = TardigradeModelParams(noise_channels=NOISE_NONE,
                                  frequency_convention="ordinary")
    _, g_ang = build_tardigrade_model(p_ang)
    _, g_ord = build_tardigrade_model(p_ord)
    assert np.allclose(g_ord.hamiltonian.to_dense(),
                       2 * np.pi * g_ang.hamiltonian.to_dense(), atol=1e-12)
