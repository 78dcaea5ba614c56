import numpy as np
import pytest

from ionpulse import (
    IonCrystal,
    IonEscape,
    NonConvergence,
    TrapConfig,
    chain_energy,
    edge_field,
    edge_field_asymptote,
    solve_equilibrium,
    trap_depth,
    trap_field,
    trap_potential,
)
from ionpulse.crystal import load_crystal, save_crystal


def test_config_invariants():
    cfg = TrapConfig()
    assert cfg.half_length == cfg.n_ions * cfg.delta_z / 2
    with pytest.raises(ValueError):
        TrapConfig(n_ions=0)
    with pytest.raises(ValueError):
        TrapConfig(delta_z=-1e-6)
    with pytest.raises(ValueError):
        TrapConfig(cutoff_s=1.0)
    with pytest.raises(ValueError):
        TrapConfig(scale_r=0.2)


def test_potential_zero_at_center(cfg):
    assert trap_potential(0.0, cfg) == 0.0


def test_potential_even(cfg):
    z = np.linspace(0.0, 1.2 * cfg.half_length, 300)
    np.testing.assert_array_equal(trap_potential(z, cfg), trap_potential(-z, cfg))


def test_field_zero_at_center_and_odd(cfg):
    assert trap_field(0.0, cfg) == 0.0
    z = np.linspace(0.0, 1.2 * cfg.half_length, 300)
    np.testing.assert_array_equal(trap_field(z, cfg), -trap_field(-z, cfg))


def test_field_matches_potential_gradient(cfg):
    # central-difference oracle at h = 1 nm
    h = 1e-9
    z = cfg.half_length / 2
    fd = (trap_potential(z + h, cfg) - trap_potential(z - h, cfg)) / (2 * h)
    assert abs(-fd - trap_field(z, cfg)) < 1e-6 * abs(trap_field(z, cfg))


def test_field_gradient_consistency_across_chain(cfg):
    h = 1e-9
    z = np.linspace(-0.9, 0.9, 181) * cfg.cutoff_s * cfg.half_length
    fd = (trap_potential(z + h, cfg) - trap_potential(z - h, cfg)) / (2 * h)
    field = trap_field(z, cfg)
    scale = np.maximum(np.abs(field), np.abs(field).max() * 1e-3)
    assert np.max(np.abs(field + fd) / scale) < 1e-6


def test_potential_c1_at_cutoff(cfg):
    # value and slope continuous across s*L up to the local linear term
    zc = cfg.cutoff_s * cfg.half_length
    eps = 1e-12
    below = trap_potential(zc - eps, cfg)
    above = trap_potential(zc + eps, cfg)
    slope = -trap_field(zc, cfg)
    assert abs(above - below) <= 2.1 * eps * abs(slope)
    assert abs(trap_field(zc - eps, cfg) - trap_field(zc + eps, cfg)) < 1e-6 * abs(
        trap_field(zc, cfg)
    )


def test_field_clamped_beyond_cutoff(cfg):
    zc = cfg.cutoff_s * cfg.half_length
    assert trap_field(1.5 * zc, cfg) == trap_field(zc, cfg)


def test_trap_depth_barrier(cfg):
    # 1.52 meV reported barrier for the r=0.95, N=50 chain; +/-10%
    depth_mev = trap_depth(cfg) / cfg.charge * 1e3
    assert depth_mev == pytest.approx(1.52, rel=0.10)


def test_edge_field_single_ion():
    cfg = TrapConfig(n_ions=1)
    assert edge_field(cfg) == pytest.approx(
        cfg.coulomb_k * cfg.charge / cfg.delta_z**2, rel=1e-12
    )


def test_edge_field_asymptote_value(cfg):
    # ~260 V/m for 3 um spacing
    assert edge_field_asymptote(cfg) == pytest.approx(260.0, rel=0.05)


def test_edge_field_below_asymptote():
    for n in (1, 2, 5, 50, 500):
        cfg = TrapConfig(n_ions=n)
        assert edge_field(cfg) < edge_field_asymptote(cfg)


def test_edge_field_converges_to_asymptote():
    cfg = TrapConfig(n_ions=5000)
    assert edge_field(cfg) == pytest.approx(edge_field_asymptote(cfg), rel=1e-3)


def test_equilibrium_two_ion_harmonic_hook():
    # force balance oracle: spacing d solves d^3 = 2 k q^2 / (m omega_z^2)
    cfg = TrapConfig(n_ions=2, delta_z=20e-6)
    omega_z = 2 * np.pi * 100e3
    stiffness = cfg.ion_mass * omega_z**2

    def potential(z):
        return 0.5 * stiffness * np.asarray(z) ** 2 / cfg.charge

    def field(z):
        return -stiffness * np.asarray(z) / cfg.charge

    crystal = solve_equilibrium(
        cfg, init_spacing=15e-6, potential=potential, field=field, force_tol=1e-25
    )
    expected = (2 * cfg.coulomb_k * cfg.charge**2 / stiffness) ** (1.0 / 3.0)
    spacing = crystal.positions[1] - crystal.positions[0]
    assert spacing == pytest.approx(expected, rel=1e-6)


def test_equilibrium_default_chain(chain, cfg):
    spacing = chain.spacings
    assert spacing.mean() == pytest.approx(2.9e-6, abs=0.15e-6)
    assert (spacing.max() - spacing.min()) / spacing.mean() < 0.05
    assert chain.residual_force < 1e-20
    assert np.abs(chain.positions).max() < cfg.cutoff_s * cfg.half_length


def test_equilibrium_centered(chain, cfg):
    assert abs(chain.positions.sum()) < 1e-3 * cfg.delta_z


def test_equilibrium_mirror_symmetry(chain, cfg):
    z = chain.positions
    assert np.abs(z + z[::-1]).max() < 1e-3 * cfg.delta_z


def test_energy_descent_monotone(cfg):
    energies = []
    solve_equilibrium(
        cfg, force_tol=1e-19, callback=lambda it, en, fm: energies.append(en)
    )
    energies = np.array(energies)
    assert np.all(np.diff(energies) <= 0)


def test_nonconvergence_raises(cfg):
    with pytest.raises(NonConvergence):
        solve_equilibrium(cfg, max_iter=5)


def test_ion_escape_raises():
    # a trap too weak for its ions: wall field far below the chain's repulsion
    cfg = TrapConfig(n_ions=50, delta_z=3e-6, scale_r=0.5, cutoff_s=0.5)
    with pytest.raises((IonEscape, NonConvergence)):
        solve_equilibrium(cfg, max_iter=200_000)


def test_single_ion_chain():
    crystal = solve_equilibrium(TrapConfig(n_ions=1))
    assert crystal.positions.tolist() == [0.0]


def test_crystal_requires_sorted_positions():
    with pytest.raises(ValueError):
        IonCrystal(positions=np.array([1e-6, 0.0]), residual_force=0.0, iterations=1)


def test_crystal_roundtrip(tmp_path, chain):
    csv_path = tmp_path / "positions.csv"
    json_path = tmp_path / "crystal.json"
    save_crystal(chain, csv_path, json_path)
    loaded = load_crystal(csv_path, json_path)
    np.testing.assert_array_equal(loaded.positions, chain.positions)
    assert loaded.residual_force == chain.residual_force
    assert loaded.iterations == chain.iterations


def test_chain_energy_additivity(cfg):
    # two far-separated ions: energy ~ trap terms + single Coulomb pair
    z = np.array([-10e-6, 10e-6])
    expected = (
        cfg.charge * (trap_potential(z, cfg)).sum()
        + cfg.coulomb_k * cfg.charge**2 / 20e-6
    )
    assert chain_energy(z, cfg) == pytest.approx(expected, rel=1e-12)
