"""Physical constants (CODATA 2018) and the internal unit system.

All simulation kernels work in dimensionless relativistic units with
``hbar = c = m_e = 1``: lengths in reduced Compton wavelengths, times in
``hbar/(m_e c^2)``, electric fields in units of the Sauter-Schwinger
field scale ``m_e^2 c^3 / (e hbar)``.  SI values appear only at the API
boundary.
"""

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class PhysConstants:
    """Fundamental constants in SI units, CODATA 2018."""

    electron_mass: float = 9.1093837015e-31          # kg
    elementary_charge: float = 1.602176634e-19       # C (exact)
    speed_of_light: float = 299792458.0              # m/s (exact)
    hbar: float = 6.62607015e-34 / (2.0 * math.pi)   # J s (h exact)
    vacuum_permittivity: float = 8.8541878128e-12    # F/m

    def __post_init__(self):
        for name, value in (
            ("electron_mass", self.electron_mass),
            ("elementary_charge", self.elementary_charge),
            ("speed_of_light", self.speed_of_light),
            ("hbar", self.hbar),
            ("vacuum_permittivity", self.vacuum_permittivity),
        ):
            if not value > 0.0:
                raise ValueError(f"{name} must be strictly positive")


CODATA2018 = PhysConstants()


@dataclass(frozen=True)
class UnitScale:
    """Conversion factors between SI and internal relativistic units.

    One internal unit of X equals ``x_unit`` SI units of X, i.e.
    ``value_internal = value_si / x_unit``.
    """

    constants: PhysConstants = field(default_factory=lambda: CODATA2018)

    @property
    def length_m(self):
        """Reduced Compton wavelength hbar/(m c)."""
        k = self.constants
        return k.hbar / (k.electron_mass * k.speed_of_light)

    @property
    def time_s(self):
        """hbar/(m c^2)."""
        k = self.constants
        return k.hbar / (k.electron_mass * k.speed_of_light**2)

    @property
    def energy_J(self):
        return self.constants.electron_mass * self.constants.speed_of_light**2

    @property
    def efield_V_per_m(self):
        """Critical field m^2 c^3 / (|q| hbar)."""
        k = self.constants
        return (k.electron_mass**2 * k.speed_of_light**3
                / (k.elementary_charge * k.hbar))

    @property
    def bfield_T(self):
        return self.efield_V_per_m / self.constants.speed_of_light

    @property
    def vecpot_V_s_per_m(self):
        """Vector potential unit: efield unit times the time unit."""
        return self.efield_V_per_m * self.time_s

    @property
    def spin_J_s(self):
        """Angular momentum unit hbar."""
        return self.constants.hbar

    def length_to_internal(self, x_m):
        return x_m / self.length_m

    def length_to_si(self, x):
        return x * self.length_m

    def time_to_internal(self, t_s):
        return t_s / self.time_s

    def time_to_si(self, t):
        return t * self.time_s

    def efield_to_internal(self, e_si):
        return e_si / self.efield_V_per_m

    def efield_to_si(self, e):
        return e * self.efield_V_per_m

    def frequency_to_si(self, w):
        """Angular frequency, rad per internal time -> rad/s."""
        return w / self.time_s

    def frequency_to_internal(self, w_si):
        return w_si * self.time_s


SCALE = UnitScale()
