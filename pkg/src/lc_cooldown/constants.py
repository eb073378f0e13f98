"""Physical constants (CODATA 2018, SI units)."""

HBAR = 1.054571817e-34
"""Reduced Planck constant [J s]."""

KB = 1.380649e-23
"""Boltzmann constant [J/K]."""

EPSILON_0 = 8.8541878128e-12
"""Vacuum permittivity [F/m]."""

C_LIGHT = 299792458.0
"""Speed of light in vacuum [m/s]."""
