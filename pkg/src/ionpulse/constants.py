"""Physical constants used throughout the package (SI units)."""

HBAR = 1.054571817e-34  # J s
ELEMENTARY_CHARGE = 1.602176634e-19  # C
COULOMB_CONSTANT = 8.9875517923e9  # V m / C, i.e. 1/(4 pi eps0)

# 171Yb+ single ion
YB171_MASS = 2.838e-25  # kg

# 355 nm Raman drive; the default effective wavevector is 2 pi / lambda,
# which reproduces the reported per-pair power scale (see TrapConfig)
RAMAN_WAVELENGTH = 355e-9  # m
