"""
Unit tests: oscillator strength, dipole moment, radiative rate, totals and branching ratios.
"""
import math

import pytest

from ervo.core.errors import PhysicsInputError
from ervo.schemas.photo import HostOptics
from ervo.services.photophysics import (
    branching_ratio,
    channel,
    channel_index,
    dipole_moment,
    local_field_factor,
    oscillator_strength,
    radiative_rate,
    total_rate_and_dipoles,
)

HOST = HostOptics(n_c=2.15, n_a=1.95, number_density=1.75e18)


def _by_channel(channels, transition):
    return {(c.polarization, c.dipole_type): c for c in channels if c.transition == transition}


def test_local_field_factor_vacuum():
    assert local_field_factor(1.0) == 1.0


def test_channel_index_convention():
    assert channel_index("ED", "sigma", HOST) == 1.95
    assert channel_index("ED", "pi", HOST) == 2.15
    assert channel_index("MD", "sigma", HOST) == 2.15
    assert channel_index("MD", "pi", HOST) == 1.95


def test_y2_pi_electric_dipole_channel():
    c = channel("Z1-Y2", "ED", "pi", 1528.78e-9, 79.5e9, HOST)
    assert c.f == pytest.approx(7.552e-7, rel=2e-3)
    assert c.radiative_rate == pytest.approx(75.27, rel=2e-3)
    assert c.d == pytest.approx(3.018e-32, rel=2e-3)


def test_radiative_rate_depends_only_on_channel_index():
    c = channel("Z1-Y2", "ED", "pi", 1528.78e-9, 79.5e9, HOST)
    assert radiative_rate("ED", c.f, 1528.78e-9, c.refractive_index) == pytest.approx(c.radiative_rate, rel=1e-12)
    with pytest.raises(PhysicsInputError):
        radiative_rate("MD", 1e-7, 0.0, 2.0)


@pytest.mark.parametrize(
    "f, wavelength, expected",
    [
        (9e-7, 1529.21e-9, 3.3e-32),
        (1.2e-7, 1528.78e-9, 1.2e-32),
    ],
)
def test_dipole_moment_reference_values(f, wavelength, expected):
    assert dipole_moment(f, wavelength) == pytest.approx(expected, rel=1e-2)


def test_oscillator_strength_linear_in_alpha():
    n = channel_index("MD", "sigma", HOST)
    one = oscillator_strength("MD", 1e9, HOST, n)
    assert oscillator_strength("MD", 3e9, HOST, n) == pytest.approx(3 * one, rel=1e-12)
    assert oscillator_strength("MD", 0.0, HOST, n) == 0.0


def test_oscillator_strength_rejects_negative_alpha():
    with pytest.raises(PhysicsInputError):
        oscillator_strength("ED", -1.0, HOST, 2.0)


def test_dipole_moment_rejects_bad_input():
    with pytest.raises(PhysicsInputError):
        dipole_moment(1e-7, 0.0)
    with pytest.raises(PhysicsInputError):
        dipole_moment(-1e-7, 1.5e-6)


PUBLISHED = [
    # transition, polarization, dipole type, f, d (C m), rate (Hz)
    ("Z1-Y1", "sigma", "ED", 0.8e-7, 1.0e-32, 5.7),
    ("Z1-Y1", "sigma", "MD", 9.0e-7, 3.3e-32, 85.0),
    ("Z1-Y1", "pi", "MD", 2.0e-7, 1.6e-32, 13.9),
    ("Z1-Y2", "sigma", "ED", 1.2e-7, 1.2e-32, 8.3),
    ("Z1-Y2", "pi", "ED", 7.6e-7, 3.0e-32, 75.2),
    ("Z1-Y2", "pi", "MD", 5.1e-7, 2.5e-32, 35.3),
]


@pytest.mark.parametrize("transition, pol, kind, f, d, rate", PUBLISHED)
def test_measured_table_matches_published(channels, transition, pol, kind, f, d, rate):
    c = _by_channel(channels, transition)[(pol, kind)]
    assert c.f == pytest.approx(f, rel=0.1)
    assert c.d == pytest.approx(d, rel=0.1)
    assert c.radiative_rate == pytest.approx(rate, rel=0.1)


def test_measured_table_covers_every_row(channels):
    assert sorted((c.transition, c.polarization, c.dipole_type) for c in channels) == sorted(p[:3] for p in PUBLISHED)


def test_y2_naive_total_rate(channels):
    rows = [c for c in channels if c.transition == "Z1-Y2"]
    summary = total_rate_and_dipoles(rows, "naive_sum")
    assert summary.total_rate == pytest.approx(118.8, rel=1e-2)
    assert summary.radiative_lifetime == pytest.approx(1 / summary.total_rate)
    ed = _by_channel(channels, "Z1-Y2")
    assert summary.d_ED == pytest.approx(math.hypot(ed[("sigma", "ED")].d, ed[("pi", "ED")].d))
    assert summary.d_MD == pytest.approx(ed[("pi", "MD")].d)


def test_mode_weighted_counts_sigma_twice(channels):
    rows = [c for c in channels if c.transition == "Z1-Y2"]
    naive = total_rate_and_dipoles(rows, "naive_sum").total_rate
    weighted = total_rate_and_dipoles(rows, "mode_weighted").total_rate
    sigma = sum(c.radiative_rate for c in rows if c.polarization == "sigma")
    assert weighted == pytest.approx(naive + sigma, rel=1e-12)


def test_total_rate_rejects_empty_and_mixed(channels):
    with pytest.raises(PhysicsInputError):
        total_rate_and_dipoles([])
    with pytest.raises(PhysicsInputError):
        total_rate_and_dipoles(channels)


@pytest.mark.parametrize(
    "tau_f, tau_rad, expected",
    [
        (3.34e-3, 8.05e-3, 0.415),
        (3.30e-3, 6.2e-3, 0.532),
    ],
)
def test_branching_ratio_reference_values(tau_f, tau_rad, expected):
    assert branching_ratio(tau_f, tau_rad) == pytest.approx(expected, abs=1e-3)


def test_branching_ratio_clamped(caplog):
    assert branching_ratio(10e-3, 5e-3) == 1.0
    assert "clamped" in caplog.text


def test_branching_ratio_rejects_nonpositive():
    with pytest.raises(PhysicsInputError):
        branching_ratio(0.0, 1e-3)
