"""Physical constants and the internal unit system."""

import math

import pytest

from spinbeam.constants import CODATA2018, SCALE, PhysConstants


def test_constant_values_are_pinned():
    assert CODATA2018.electron_mass == 9.1093837015e-31
    assert CODATA2018.elementary_charge == 1.602176634e-19
    assert CODATA2018.speed_of_light == 299792458.0
    assert CODATA2018.hbar == pytest.approx(6.62607015e-34 / (2 * math.pi),
                                            rel=1e-15)
    assert CODATA2018.vacuum_permittivity == 8.8541878128e-12


def test_constants_must_be_positive():
    with pytest.raises(ValueError):
        PhysConstants(electron_mass=-1.0)


def test_length_and_time_scales():
    # reduced Compton wavelength and its light-crossing time
    assert SCALE.length_m == pytest.approx(3.8615926796e-13, rel=1e-9)
    assert SCALE.time_s == pytest.approx(1.28808866e-21, rel=1e-7)
    assert SCALE.length_m == pytest.approx(
        SCALE.time_s * CODATA2018.speed_of_light, rel=1e-14)


def test_field_unit_is_critical_scale():
    # m^2 c^3 / (|q| hbar), the field at which the work done over a
    # Compton wavelength equals the rest energy
    m = CODATA2018.electron_mass
    c = CODATA2018.speed_of_light
    q = CODATA2018.elementary_charge
    hbar = CODATA2018.hbar
    assert SCALE.efield_V_per_m == pytest.approx(m * m * c ** 3 / (q * hbar),
                                                 rel=1e-14)
    assert SCALE.efield_V_per_m == pytest.approx(1.3232854741e18, rel=1e-9)


def test_unit_round_trip():
    e_si = 5.53e14
    assert SCALE.efield_to_internal(e_si) * SCALE.efield_V_per_m == \
        pytest.approx(e_si, rel=1e-14)


def test_energy_unit_is_rest_energy():
    m = CODATA2018.electron_mass
    c = CODATA2018.speed_of_light
    assert SCALE.energy_J == pytest.approx(m * c * c, rel=1e-14)
