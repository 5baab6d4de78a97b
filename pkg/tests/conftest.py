"""Shared fixtures; the calibration run is expensive and session wide."""

import pytest

from stochrd import Grid, calibrate_c, canonical_cubic, periodic_bump_forcing


@pytest.fixture(scope="session")
def calibrated_c():
    """Grid constant for the canonical model, from the reference ensemble."""
    spec = canonical_cubic(alpha=0.5, forcing=periodic_bump_forcing(0.05))
    return calibrate_c(spec, Grid(dim=1, half_width=8.0, n=257))
