"""
Unit tests: zeta scaling, Lambda/V enumeration, leg-dipole selection and Raman maps.
"""
import math

import numpy as np
import pytest

from ervo.core.errors import PhysicsInputError
from ervo.schemas.fom import MaterialFoM
from ervo.services.transduction import (
    branch_dipoles,
    enumerate_systems,
    raman_map,
    relative_system_strength,
    select_leg_dipoles,
    zeta,
    zeta_ratio,
)

BASE = MaterialFoM(
    name="base",
    d31=3.0e-32,
    d32=2.5e-32,
    mu21=3.29e-23,
    rho=1.75e24,
    delta_o=163e6,
    delta_mu=58.4e6,
)


def _rows(channels, transition):
    return [c for c in channels if c.transition == transition]


def test_zeta_doubling_density_quadruples():
    doubled = BASE.model_copy(update={"rho": 2 * BASE.rho})
    assert zeta(doubled) == pytest.approx(4 * zeta(BASE), rel=1e-12)
    assert zeta_ratio(doubled, BASE) == pytest.approx(4.0, rel=1e-12)


def test_zeta_halving_detunings_gives_sixteen():
    narrow = BASE.model_copy(update={"delta_o": BASE.delta_o / 2, "delta_mu": BASE.delta_mu / 2})
    assert zeta_ratio(narrow, BASE) == pytest.approx(16.0, rel=1e-12)


@pytest.mark.parametrize(
    "name, slope",
    [("d31", 2), ("d32", 2), ("mu21", 2), ("rho", 2), ("delta_o", -2), ("delta_mu", -2)],
)
def test_zeta_log_log_slopes(name, slope):
    scaled = BASE.model_copy(update={name: getattr(BASE, name) * 1.1})
    assert math.log(zeta(scaled) / zeta(BASE)) / math.log(1.1) == pytest.approx(slope, rel=1e-9)


def test_zeta_rejects_zero_detuning():
    with pytest.raises(PhysicsInputError):
        zeta(BASE.model_copy(update={"delta_o": 0.0}))


def test_enumerate_systems_at_resonator(profile):
    configs = enumerate_systems(profile.ground, profile.level("Y2"), 2.4e9, (0.0, 0.2))
    lam = [c for c in configs if c.kind == "Lambda"]
    vee = [c for c in configs if c.kind == "V"]
    assert len(lam) == 2 and len(vee) == 2
    for c in lam:
        assert c.field == pytest.approx(48.384e-3, rel=1e-4)
        assert c.optical_offset == pytest.approx(1.8555e9, rel=1e-3)
        assert c.microwave_doublet == "ground"
    for c in vee:
        assert c.field == pytest.approx(62.58e-3, rel=1e-3)
        assert c.optical_offset == pytest.approx(3.104e9, rel=1e-3)
        assert c.microwave_doublet == "excited"


def test_enumerate_systems_y1_v_field(profile):
    vee = [c for c in enumerate_systems(profile.ground, profile.level("Y1"), 2.4e9) if c.kind == "V"]
    assert vee
    assert vee[0].field == pytest.approx(38.02e-3, rel=1e-3)


def test_lambda_legs_share_excited_branch(profile):
    for c in enumerate_systems(profile.ground, profile.level("Y2"), 2.4e9):
        if c.kind == "Lambda":
            assert c.legs[0][1] == c.legs[1][1]
            assert c.legs[0][0] == "-"
        else:
            assert c.legs[0][0] == c.legs[1][0]
            assert c.legs[0][1] == "-"


def test_enumerate_systems_nonpositive_resonator(profile):
    assert enumerate_systems(profile.ground, profile.level("Y2"), 0.0) == []


def test_enumerate_systems_out_of_range(profile):
    assert enumerate_systems(profile.ground, profile.level("Y2"), 2.4e9, (0.0, 0.03)) == []


def test_leg_selection_prefers_y2_pi(profile, channels):
    d_cons, d_flip, pol = select_leg_dipoles(
        profile.ground, profile.level("Y2"), _rows(channels, "Z1-Y2"), profile.selection_rules
    )
    assert pol == "pi"
    assert d_cons == pytest.approx(2.461e-32, rel=5e-3)
    assert d_flip == pytest.approx(3.018e-32, rel=5e-3)


def test_leg_selection_y1_sigma(profile, channels):
    d_cons, d_flip, pol = select_leg_dipoles(
        profile.ground, profile.level("Y1"), _rows(channels, "Z1-Y1"), profile.selection_rules
    )
    assert pol == "sigma"
    assert d_cons == pytest.approx(3.29e-32, rel=5e-3)
    assert d_flip == pytest.approx(0.994e-32, rel=5e-3)


def test_y2_system_stronger_than_y1(profile, channels):
    y2 = select_leg_dipoles(profile.ground, profile.level("Y2"), _rows(channels, "Z1-Y2"), profile.selection_rules)
    y1 = select_leg_dipoles(profile.ground, profile.level("Y1"), _rows(channels, "Z1-Y1"), profile.selection_rules)
    assert relative_system_strength(y2[:2], y1[:2]) == pytest.approx(5.1, rel=0.05)


def test_relative_strength_rejects_zero():
    with pytest.raises(PhysicsInputError):
        relative_system_strength((0.0, 1.0), (1.0, 1.0))


def test_branch_dipoles_forbidden_is_zero(profile, channels):
    legs = branch_dipoles(profile.ground, profile.level("Y1"), "pi", _rows(channels, "Z1-Y1"), profile.selection_rules)
    assert legs["++"] == 0.0 and legs["--"] == 0.0
    assert legs["+-"] > 0 and legs["-+"] > 0


def test_raman_map_peaks_at_crossing(profile, channels):
    excited = profile.level("Y2")
    rows = _rows(channels, "Z1-Y2")
    configs = enumerate_systems(profile.ground, excited, 2.4e9)
    b_lambda = next(c.field for c in configs if c.kind == "Lambda")
    b_v = next(c.field for c in configs if c.kind == "V")
    fields = np.array([0.045, b_lambda, 0.055, b_v, 0.068])
    nu = np.linspace(-8e9, 8e9, 1601)
    result = raman_map(configs, profile.resonator, profile.ground, excited, rows, fields, nu, 163e6)
    assert result.polarization == "pi"
    assert result.intensity.shape == (5, 1601)
    assert np.all(result.intensity >= 0)
    by_field = result.intensity.max(axis=1)
    off_resonance = by_field[[0, 2, 4]].max()
    assert by_field[1] > 100 * off_resonance
    assert by_field[3] > 100 * off_resonance
    # the strongest optical detuning at the Lambda crossing sits on a pump leg
    pumps = [c.pump_offset for c in configs if c.kind == "Lambda"]
    peak_nu = nu[np.argmax(result.intensity[1])]
    assert min(abs(peak_nu - p) for p in pumps) < 25e6


def test_raman_map_rejects_bad_width(profile):
    with pytest.raises(PhysicsInputError):
        raman_map([], profile.resonator, profile.ground, profile.level("Y2"), [], np.array([0.05]), np.array([0.0]), 0.0)


def test_raman_map_scales_as_dipole_squared(profile, channels):
    excited = profile.level("Y2")
    rows = _rows(channels, "Z1-Y2")
    doubled = [c.model_copy(update={"d": 2.0 * c.d}) for c in rows]
    configs = enumerate_systems(profile.ground, excited, 2.4e9)
    fields = np.array([c.field for c in configs])
    nu = np.linspace(-8e9, 8e9, 401)
    base = raman_map(configs, profile.resonator, profile.ground, excited, rows, fields, nu, 163e6)
    scaled = raman_map(configs, profile.resonator, profile.ground, excited, doubled, fields, nu, 163e6)
    # each leg doubles, so (d1 d2)^2 grows sixteen-fold
    assert scaled.intensity == pytest.approx(16.0 * base.intensity, rel=1e-12)


def test_raman_map_needs_two_driven_legs(profile, channels):
    md_only = [c for c in _rows(channels, "Z1-Y2") if c.dipole_type == "MD"]
    with pytest.raises(PhysicsInputError):
        raman_map([], profile.resonator, profile.ground, profile.level("Y2"), md_only, np.array([0.05]), np.array([0.0]), 1e8)
