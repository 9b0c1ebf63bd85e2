"""
Unit tests: optical line maps, thermal populations, transmission synthesis and integration.
"""
import math

import numpy as np
import pytest

from ervo.core.errors import ConfigurationError, PhysicsInputError, SaturatedAbsorptionError
from ervo.schemas.optical import AbsorptionLine, SelectionRuleTable, Spectrum
from ervo.schemas.spin import FieldPoint
from ervo.services.optical_model import (
    absorption_from_spectrum,
    absorption_lines_from_transitions,
    branch_offsets,
    integrate_absorption,
    line_positions,
    ramp_pattern,
    rotation_pattern,
    synthesize_transmission,
    thermal_population_ratio,
)


def _kinds(lines):
    return sorted((line.tag, line.dipole_type) for line in lines)


def test_z1_y1_sigma_lines(profile):
    lines = line_positions(profile.ground, profile.level("Y1"), FieldPoint(magnitude=0.05), "sigma", profile.selection_rules)
    assert _kinds(lines) == [("++", "MD"), ("+-", "ED"), ("-+", "ED"), ("--", "MD")]


def test_z1_y1_pi_lines(profile):
    lines = line_positions(profile.ground, profile.level("Y1"), FieldPoint(magnitude=0.05), "pi", profile.selection_rules)
    assert _kinds(lines) == [("+-", "MD"), ("-+", "MD")]


def test_z1_y2_pi_lines(profile):
    lines = line_positions(profile.ground, profile.level("Y2"), FieldPoint(magnitude=0.05), "pi", profile.selection_rules)
    assert _kinds(lines) == [("++", "MD"), ("+-", "ED"), ("-+", "ED"), ("--", "MD")]


def test_z1_y2_offsets_at_90mT(profile):
    offsets = branch_offsets(profile.ground, profile.level("Y2"), FieldPoint(magnitude=0.09))
    assert sorted(offsets.values()) == pytest.approx([-3.9579e9, -0.5064e9, 0.5064e9, 3.9579e9], rel=1e-3)
    assert offsets["-+"] == pytest.approx(3.9579e9, rel=1e-3)
    assert offsets["++"] == pytest.approx(-0.5064e9, rel=1e-3)


def test_lines_collapse_at_zero_field(profile):
    lines = line_positions(profile.ground, profile.level("Y2"), FieldPoint(magnitude=0.0), "pi", profile.selection_rules)
    assert all(line.offset == 0.0 for line in lines)
    assert all(line.relative_amplitude == pytest.approx(0.5) for line in lines)


def test_thermal_population_ratio_reference():
    assert thermal_population_ratio(1.0, 4.4642e9) == pytest.approx(0.8072, abs=5e-4)


def test_thermal_population_ratio_rejects_zero_temperature():
    with pytest.raises(PhysicsInputError):
        thermal_population_ratio(0.0, 1e9)


def test_lower_branch_more_populated(profile):
    lines = line_positions(
        profile.ground, profile.level("Y1"), FieldPoint(magnitude=0.09), "sigma", profile.selection_rules, 1.0
    )
    amp = {line.ground_branch: line.relative_amplitude for line in lines}
    assert amp["-"] > amp["+"]
    assert amp["-"] + amp["+"] == pytest.approx(1.0)


def test_missing_selection_entry_raises(profile):
    table = SelectionRuleTable(entries={("+1/2", "+1/2", "sigma"): frozenset({"MD"})})
    with pytest.raises(ConfigurationError):
        line_positions(profile.ground, profile.level("Y1"), FieldPoint(magnitude=0.05), "sigma", table)


def test_ramp_pattern_is_linear_in_field(profile):
    fields = np.array([0.02, 0.04, 0.08])
    pattern = ramp_pattern(profile.ground, profile.level("Y1"), fields, "sigma", table=profile.selection_rules)
    offsets = [{(ln.tag, ln.dipole_type): ln.offset for ln in lines} for lines in pattern]
    for key in offsets[0]:
        assert offsets[1][key] == pytest.approx(2 * offsets[0][key], rel=1e-12)
        assert offsets[2][key] == pytest.approx(4 * offsets[0][key], rel=1e-12)


def test_rotation_pattern_symmetric_about_a_axis(profile):
    thetas = np.array([0.3, math.pi - 0.3])
    first, mirror = rotation_pattern(profile.ground, profile.level("Y2"), 0.05, thetas, "pi", profile.selection_rules)
    assert [ln.tag for ln in first] == [ln.tag for ln in mirror]
    assert [ln.offset for ln in first] == pytest.approx([ln.offset for ln in mirror], rel=1e-12)


def test_single_line_peak_and_transmission():
    line = AbsorptionLine(center=0.0, fwhm=184e6, integrated_alpha=10e9)
    assert line.peak_alpha == pytest.approx(51.06, rel=1e-3)
    spec = synthesize_transmission([line], 0.02, np.array([-1e9, 0.0, 1e9]))
    assert spec.transmission[1] == pytest.approx(0.360, abs=1e-3)


def test_integrate_recovers_single_line():
    line = AbsorptionLine(center=30e6, fwhm=184e6, integrated_alpha=10e9)
    grid = np.linspace(-2e9, 2e9, 8001)
    spec = synthesize_transmission([line], 0.02, grid)
    assert integrate_absorption(spec) == pytest.approx(10e9, rel=1e-4)


def test_integrate_lorentzian_within_tail_loss():
    line = AbsorptionLine(center=0.0, fwhm=50e6, integrated_alpha=1e9, profile="lorentzian")
    grid = np.linspace(-5e9, 5e9, 20001)
    spec = synthesize_transmission([line], 0.02, grid)
    # the window misses 2/pi * atan(fwhm / 2 / 5 GHz) of the area
    assert integrate_absorption(spec) == pytest.approx(1e9 * (1 - 2 / math.pi * math.atan(25e6 / 5e9)), rel=1e-3)


def test_pi_z1_y2_spectrum_total(profile):
    lines = line_positions(
        profile.ground, profile.level("Y2"), FieldPoint(magnitude=0.09), "pi", profile.selection_rules, 1.0
    )
    absorption = absorption_lines_from_transitions(lines, 163e6, {"ED": 79.5e9, "MD": 45.5e9})
    assert sum(a.integrated_alpha for a in absorption) == pytest.approx(125e9, rel=1e-12)
    grid = np.linspace(-6e9, 6e9, 24001)
    spec = synthesize_transmission(absorption, 0.02, grid)
    assert integrate_absorption(spec) == pytest.approx(125e9, rel=5e-3)


def test_group_alpha_split_by_population(profile):
    lines = line_positions(
        profile.ground, profile.level("Y2"), FieldPoint(magnitude=0.09), "pi", profile.selection_rules, 1.0
    )
    absorption = absorption_lines_from_transitions(lines, 163e6, {"ED": 80e9, "MD": 0.0})
    assert len(absorption) == 2
    assert sum(a.integrated_alpha for a in absorption) == pytest.approx(80e9)
    low, high = sorted(a.integrated_alpha for a in absorption)
    assert low / high == pytest.approx(thermal_population_ratio(1.0, 4.4642e9), rel=1e-3)


def test_baseline_subtraction():
    line = AbsorptionLine(center=0.0, fwhm=100e6, integrated_alpha=2e9)
    grid = np.linspace(-1e9, 1e9, 4001)
    clean = synthesize_transmission([line], 0.02, grid)
    # constant 0.5 cm^-1 background absorption
    tilted = Spectrum(frequency=grid, transmission=clean.transmission * math.exp(-0.5 * 0.02), length_cm=0.02)
    windows = [(-1e9, -0.6e9), (0.6e9, 1e9)]
    assert integrate_absorption(tilted, baseline_windows=windows) == pytest.approx(2e9, rel=1e-3)


def test_saturated_sample_raises():
    spec = Spectrum(frequency=[0.0, 1.0, 2.0], transmission=[0.5, 0.0, 0.5], length_cm=0.02)
    with pytest.raises(SaturatedAbsorptionError) as info:
        absorption_from_spectrum(spec)
    assert info.value.index == 1


def test_samples_below_floor_are_excluded():
    spec = Spectrum(frequency=[0.0, 1.0, 2.0, 3.0], transmission=[0.9, 1e-9, 0.9, 0.9], length_cm=0.02)
    _, usable = absorption_from_spectrum(spec, floor=1e-6)
    assert usable.tolist() == [True, False, True, True]


def test_synthesize_rejects_bad_grid():
    line = AbsorptionLine(center=0.0, fwhm=1e8, integrated_alpha=1e9)
    with pytest.raises(PhysicsInputError):
        synthesize_transmission([line], 0.02, np.array([0.0, 0.0, 1.0]))
    with pytest.raises(PhysicsInputError):
        synthesize_transmission([line], 0.0, np.array([0.0, 1.0]))


def test_integrate_recovers_random_line_sets(rng):
    grid = np.linspace(-4e9, 4e9, 16001)
    for _ in range(100):
        lines = [
            AbsorptionLine(
                center=rng.uniform(-2e9, 2e9),
                fwhm=rng.uniform(100e6, 300e6),
                integrated_alpha=rng.uniform(1e9, 1e10),
            )
            for _ in range(rng.integers(1, 5))
        ]
        total = sum(line.integrated_alpha for line in lines)
        spec = synthesize_transmission(lines, 0.02, grid)
        assert integrate_absorption(spec) == pytest.approx(total, rel=5e-3)


@pytest.mark.parametrize("excited, pol", [("Y1", "sigma"), ("Y2", "pi")])
def test_line_offsets_sum_to_zero(profile, rng, excited, pol):
    for _ in range(50):
        field = FieldPoint(magnitude=rng.uniform(0.0, 0.2), theta=rng.uniform(0.0, math.pi))
        offsets = [line.offset for line in line_positions(profile.ground, profile.level(excited), field, pol, profile.selection_rules)]
        assert len(offsets) == 4
        assert sum(offsets) == pytest.approx(0.0, abs=1e-6 * max(abs(o) for o in offsets) + 1e-3)
