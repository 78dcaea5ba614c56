"""Transverse normal modes of the ion chain.

Expanding the radial confinement and the inter-ion Coulomb repulsion to
second order around the axial equilibrium positions gives a symmetric
coupling matrix for the transverse coordinates. Its eigenvectors are the
collective modes; the highest-frequency one is the common (center-of-mass)
mode at exactly omega_x, since each matrix row sums to omega_x^2.
"""

import csv
import json
from dataclasses import dataclass

import numpy as np

from .constants import HBAR


class DegenerateSpacing(Exception):
    """Two ions sit closer than a tenth of the target spacing; the crystal is bad."""


class ImaginaryMode(Exception):
    """A non-positive eigenvalue: the chain is transversely unstable (zigzag regime)."""


@dataclass(frozen=True)
class ModeData:
    """Transverse mode frequencies, vectors and per-ion coupling strengths.

    frequencies are ascending in rad/s. Row k of `vectors` is the orthonormal
    mode vector u_k, so vectors[k, i] is the amplitude of ion i in mode k.
    eta[i, k] is the Lamb-Dicke parameter of ion i driven on mode k. All
    arrays are 0-indexed internally; the public index-based accessors and all
    serialized files use 1-based ion/mode numbering.
    """

    frequencies: np.ndarray  # rad/s, ascending
    vectors: np.ndarray  # (N, N), row k = mode vector u_k
    eta: np.ndarray  # (N, N), [ion, mode]

    def __post_init__(self):
        for name in ("frequencies", "vectors", "eta"):
            arr = np.array(getattr(self, name), dtype=float)  # copy: freezing must not leak
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_modes(self):
        return len(self.frequencies)


def build_transverse_matrix(crystal, cfg):
    """Symmetric transverse coupling matrix in rad^2/s^2.

    Diagonal: omega_x^2 minus the Coulomb softening from all partners;
    off-diagonal (i, j): + k q^2 / (m |z_i - z_j|^3). Each row sums to
    omega_x^2 because the Coulomb terms cancel pairwise.
    """
    z = crystal.positions
    d = z[:, None] - z[None, :]
    np.fill_diagonal(d, np.inf)
    min_gap = np.abs(d).min()
    if min_gap < 0.1 * cfg.delta_z:
        raise DegenerateSpacing(
            f"minimum ion gap {min_gap:.3e} m is below 0.1 * delta_z = "
            f"{0.1 * cfg.delta_z:.3e} m"
        )
    coupling = cfg.coulomb_k * cfg.charge**2 / (cfg.ion_mass * np.abs(d) ** 3)
    matrix = coupling.copy()
    np.fill_diagonal(matrix, cfg.omega_x**2 - coupling.sum(axis=1))
    return matrix


def solve_modes(matrix, cfg):
    """Diagonalize the transverse coupling matrix into ModeData.

    Frequencies come out ascending. Each mode vector is sign-fixed to have a
    non-negative sum (first entry above 1e-8 in magnitude made positive when
    the sum is numerically zero) so serialized output is deterministic.
    """
    eigenvalues, eigenvectors = np.linalg.eigh(matrix)
    if eigenvalues[0] <= 0.0:
        raise ImaginaryMode(
            f"lowest eigenvalue {eigenvalues[0]:.3e} rad^2/s^2 is not positive; "
            "the chain is transversely unstable"
        )
    frequencies = np.sqrt(eigenvalues)
    vectors = eigenvectors.T.copy()  # row k = mode vector
    for k in range(vectors.shape[0]):
        total = vectors[k].sum()
        if abs(total) > 1e-8:
            if total < 0:
                vectors[k] = -vectors[k]
        else:
            lead = vectors[k][np.abs(vectors[k]) > 1e-8]
            if lead.size and lead[0] < 0:
                vectors[k] = -vectors[k]
    scale = cfg.raman_wavevector * np.sqrt(HBAR / (2.0 * cfg.ion_mass * frequencies))
    eta = vectors.T * scale[None, :]
    return ModeData(frequencies=frequencies, vectors=vectors, eta=eta)


def lamb_dicke(modes, ion, mode):
    """Lamb-Dicke parameter of the given ion driven on the given mode (1-based indices)."""
    n = modes.n_modes
    if not 1 <= ion <= n:
        raise IndexError(f"ion index {ion} outside 1..{n}")
    if not 1 <= mode <= n:
        raise IndexError(f"mode index {mode} outside 1..{n}")
    return float(modes.eta[ion - 1, mode - 1])


def mode_frequency(modes, mode):
    """Frequency in rad/s of the given 1-based mode index."""
    if not 1 <= mode <= modes.n_modes:
        raise IndexError(f"mode index {mode} outside 1..{modes.n_modes}")
    return float(modes.frequencies[mode - 1])


def participation_uniformity(modes, mode):
    """min_i |u_ki| / max_i |u_ki| of the given 1-based mode: 1 means all ions move alike."""
    u = np.abs(modes.vectors[mode - 1])
    return float(u.min() / u.max())


def most_uniform_mode(modes):
    """1-based index of the mode with the most even ion participation.

    The common mode is excluded: it is trivially uniform, but the spectrum
    around it is too crowded to resolve one sideband, and it heats fastest.
    Among the rest, the winner for the 50-ion uniform chain is the standing
    wave whose wavelength is about four ion spacings; every ion couples to
    it at a similar strength, which makes it the natural channel for
    entangling arbitrary pairs.
    """
    if modes.n_modes == 1:
        return 1
    ratios = [participation_uniformity(modes, k) for k in range(1, modes.n_modes)]
    return int(np.argmax(ratios)) + 1


def save_modes(modes, json_path):
    """Serialize ModeData as JSON with frequencies in Hz."""
    payload = {
        "frequencies_hz": [f / (2 * np.pi) for f in modes.frequencies.tolist()],
        "vectors": modes.vectors.tolist(),
        "eta": modes.eta.tolist(),
    }
    with open(json_path, "w") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")


def load_modes(json_path):
    """Rebuild ModeData from save_modes output (Hz converted back to rad/s)."""
    with open(json_path) as fh:
        payload = json.load(fh)
    return ModeData(
        frequencies=2 * np.pi * np.array(payload["frequencies_hz"]),
        vectors=np.array(payload["vectors"]),
        eta=np.array(payload["eta"]),
    )


def save_spectrum_csv(modes, csv_path):
    """Write the mode spectrum as CSV (mode, frequency_hz), 1-based mode index."""
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["mode", "frequency_hz"])
        for k, f in enumerate(modes.frequencies, start=1):
            writer.writerow([k, repr(float(f / (2 * np.pi)))])
