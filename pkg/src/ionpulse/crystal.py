"""Uniform-density axial trap and ion chain equilibrium.

A chain of N ions with target spacing dz is modeled in the continuum limit as
a line charge of density q/dz over [-L, L] with L = N*dz/2. The axial
potential that holds such a charge distribution in place is logarithmic in
(L^2 - z^2), scaled by a dimensionless knob r. Real electrodes cannot produce
the diverging log walls, so the potential is cut at |z| = s*L and continued
linearly (constant field) beyond, keeping it C1 everywhere.

Equilibrium positions are found by descending the total electrostatic energy
(trap plus pairwise Coulomb repulsion) along the net-force direction with an
adaptive step.
"""

import csv
import json
from dataclasses import dataclass

import numpy as np

from .constants import (
    COULOMB_CONSTANT,
    ELEMENTARY_CHARGE,
    RAMAN_WAVELENGTH,
    YB171_MASS,
)


class NonConvergence(Exception):
    """Energy descent exhausted its iteration budget above force tolerance."""


class IonEscape(Exception):
    """An ion moved past the trap cutoff |z| >= s*L during descent."""


@dataclass(frozen=True)
class TrapConfig:
    """Trap, ion and beam parameters. All values SI; frequencies in rad/s.

    half_length is derived as n_ions * delta_z / 2 so it can never disagree
    with the other fields. raman_wavevector is the effective drive
    wavevector entering the Lamb-Dicke parameters; the default 2 pi / 355 nm
    reproduces the reported per-pair entangling power scale and is fully
    configurable (a counter-propagating geometry would double it).
    """

    n_ions: int = 50
    delta_z: float = 3e-6
    scale_r: float = 0.95
    cutoff_s: float = 0.98
    omega_x: float = 2 * np.pi * 3.07e6
    ion_mass: float = YB171_MASS
    charge: float = ELEMENTARY_CHARGE
    coulomb_k: float = COULOMB_CONSTANT
    raman_wavevector: float = 2 * np.pi / RAMAN_WAVELENGTH

    def __post_init__(self):
        if self.n_ions < 1:
            raise ValueError(f"n_ions must be >= 1, got {self.n_ions}")
        if self.delta_z <= 0:
            raise ValueError(f"delta_z must be positive, got {self.delta_z}")
        if not 0.0 < self.cutoff_s < 1.0:
            raise ValueError(f"cutoff_s must lie in (0, 1), got {self.cutoff_s}")
        if not 0.5 <= self.scale_r <= 1.5:
            raise ValueError(f"scale_r must lie in [0.5, 1.5], got {self.scale_r}")
        for name in ("omega_x", "ion_mass", "charge", "coulomb_k", "raman_wavevector"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def half_length(self):
        """Half length L of the modeled chain in meters."""
        return self.n_ions * self.delta_z / 2.0

    @property
    def linear_density(self):
        """Continuum line charge density q/dz in C/m."""
        return self.charge / self.delta_z


@dataclass(frozen=True)
class IonCrystal:
    """Equilibrium axial positions (sorted ascending) plus solver metadata."""

    positions: np.ndarray  # m
    residual_force: float  # N, max per-ion net force at convergence
    iterations: int

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float)  # copy: freezing must not leak
        if np.any(np.diff(pos) <= 0):
            raise ValueError("positions must be strictly increasing")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @property
    def n_ions(self):
        return len(self.positions)

    @property
    def spacings(self):
        """Neighbor spacings in meters."""
        return np.diff(self.positions)


def trap_potential(z, cfg):
    """Axial trap potential in volts at position(s) z.

    Inside |z| < s*L this is r*k*rho0*ln(L^2 / (L^2 - z^2)); beyond the
    cutoff it continues with the boundary slope, so the potential is C1 and
    the field bounded. Even in z and exactly zero at the center.
    """
    z = np.asarray(z, dtype=float)
    L = cfg.half_length
    z_cut = cfg.cutoff_s * L
    pref = cfg.scale_r * cfg.coulomb_k * cfg.linear_density
    az = np.abs(z)
    z_in = np.where(az < z_cut, z, 0.0)
    v_in = pref * np.log(L * L / (L * L - z_in * z_in))
    v_wall = pref * np.log(L * L / (L * L - z_cut * z_cut))
    slope = pref * 2.0 * z_cut / (L * L - z_cut * z_cut)
    out = np.where(az < z_cut, v_in, v_wall + slope * (az - z_cut))
    return out if out.ndim else float(out)


def trap_field(z, cfg):
    """Axial electric field -dV/dz in V/m, clamped to its boundary value beyond s*L."""
    z = np.asarray(z, dtype=float)
    L = cfg.half_length
    z_cut = cfg.cutoff_s * L
    pref = cfg.scale_r * cfg.coulomb_k * cfg.linear_density
    z_eff = np.clip(z, -z_cut, z_cut)
    out = -pref * 2.0 * z_eff / (L * L - z_eff * z_eff)
    return out if out.ndim else float(out)


def edge_field(cfg):
    """Coulomb field in V/m on an end ion from an evenly spaced chain, summed over n = 1..N."""
    n = np.arange(1, cfg.n_ions + 1, dtype=float)
    return float(
        (cfg.coulomb_k * cfg.charge / cfg.delta_z**2) * np.sum(1.0 / (n * n))
    )


def edge_field_asymptote(cfg):
    """Infinite-chain limit (pi^2/6) * k q / dz^2 of edge_field, in V/m."""
    return float((np.pi**2 / 6.0) * cfg.coulomb_k * cfg.charge / cfg.delta_z**2)


def trap_depth(cfg):
    """Energy barrier in joules that an edge ion must climb to leave the log wall.

    The barrier is taken at the cutoff radius s*L where the log potential
    stops: q * (V(s*L) - V(0)). Beyond the cutoff the clamped field keeps
    rising linearly, so the cutoff height is the depth that must at minimum
    be provided by the electrodes.
    """
    return cfg.charge * trap_potential(cfg.cutoff_s * cfg.half_length, cfg)


def chain_energy(positions, cfg, potential=None):
    """Total electrostatic energy in joules of ions at the given axial positions."""
    z = np.asarray(positions, dtype=float)
    v = trap_potential(z, cfg) if potential is None else potential(z)
    energy = cfg.charge * np.sum(v)
    iu, ju = np.triu_indices(len(z), k=1)
    energy += cfg.coulomb_k * cfg.charge**2 * np.sum(1.0 / np.abs(z[iu] - z[ju]))
    return float(energy)


def chain_forces(positions, cfg, field=None):
    """Net axial force in newtons on each ion (trap field plus Coulomb repulsion)."""
    z = np.asarray(positions, dtype=float)
    e = trap_field(z, cfg) if field is None else field(z)
    d = z[:, None] - z[None, :]
    np.fill_diagonal(d, np.inf)
    coulomb = cfg.coulomb_k * cfg.charge**2 * (np.sign(d) / (d * d)).sum(axis=1)
    return cfg.charge * e + coulomb


def solve_equilibrium(
    cfg,
    init_spacing=None,
    *,
    force_tol=1e-20,
    max_iter=1_000_000,
    initial_step=1e-9,
    potential=None,
    field=None,
    callback=None,
):
    """Relax the ion chain to equilibrium by adaptive-step energy descent.

    Ions start on an even lattice of spacing init_spacing (default
    0.95 * delta_z, slightly compressed) centered at zero. Each iteration
    every ion moves along the net force, with the largest-force ion moving
    exactly `step` meters; the step halves whenever the trial move would
    raise the total energy, and grows 1.1x after each accepted move.
    Convergence is declared when the largest per-ion force drops below
    force_tol (newtons), which keeps the criterion independent of N.

    potential/field are optional test hooks replacing the built-in trap
    (callables of z returning volts resp. V/m; supply both or neither). The
    escape check against the s*L cutoff only applies to the built-in trap.

    callback(iteration, energy, max_force), when given, is invoked after
    every accepted move.

    Raises NonConvergence if max_iter is exhausted, IonEscape if an ion
    crosses the cutoff.
    """
    if (potential is None) != (field is None):
        raise ValueError("supply both potential and field hooks, or neither")
    if init_spacing is None:
        init_spacing = 0.95 * cfg.delta_z
    if init_spacing <= 0:
        raise ValueError("init_spacing must be positive")

    n = cfg.n_ions
    z = (np.arange(n) - (n - 1) / 2.0) * init_spacing
    z_cut = cfg.cutoff_s * cfg.half_length
    check_escape = potential is None

    if n == 1:
        # single ion rests at the center of the even potential
        return IonCrystal(positions=np.zeros(1), residual_force=0.0, iterations=0)

    energy = chain_energy(z, cfg, potential)
    forces = chain_forces(z, cfg, field)
    step = initial_step
    for iteration in range(max_iter):
        f_max = float(np.abs(forces).max())
        if f_max < force_tol:
            return IonCrystal(
                positions=np.sort(z), residual_force=f_max, iterations=iteration
            )
        trial = z + step * (forces / f_max)
        trial_energy = chain_energy(trial, cfg, potential)
        if trial_energy <= energy:
            z, energy = trial, trial_energy
            if check_escape and np.abs(z).max() >= z_cut:
                raise IonEscape(
                    f"ion reached |z| >= {z_cut:.3e} m after {iteration} iterations; "
                    "the trap cannot hold this configuration"
                )
            forces = chain_forces(z, cfg, field)
            step *= 1.1
            if callback is not None:
                callback(iteration, energy, float(np.abs(forces).max()))
        else:
            step *= 0.5
    raise NonConvergence(
        f"max residual force {float(np.abs(forces).max()):.3e} N after {max_iter} iterations "
        f"(tolerance {force_tol:.1e} N)"
    )


def save_crystal(crystal, csv_path, json_path):
    """Write positions as CSV (index, z_m) and solver metadata as JSON."""
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "z_m"])
        for i, z in enumerate(crystal.positions, start=1):
            writer.writerow([i, repr(float(z))])
    meta = {
        "n_ions": crystal.n_ions,
        "residual_force_n": crystal.residual_force,
        "iterations": crystal.iterations,
    }
    with open(json_path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_crystal(csv_path, json_path):
    """Rebuild an IonCrystal from the files written by save_crystal."""
    positions = []
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["index", "z_m"]:
            raise ValueError(f"unexpected crystal CSV header: {header}")
        for row in reader:
            positions.append(float(row[1]))
    with open(json_path) as fh:
        meta = json.load(fh)
    return IonCrystal(
        positions=np.array(positions),
        residual_force=float(meta["residual_force_n"]),
        iterations=int(meta["iterations"]),
    )
