"""Time integration: implicit-explicit stepping, both solution operators."""

import dataclasses

import numpy as np
import pytest

from stochrd import (
    DivergenceError,
    Field,
    Grid,
    ModelSpec,
    Nonlinearity,
    WienerPath,
    canonical_cubic,
    l2_distance,
    norms,
    periodic_bump_forcing,
    sample_two_sided_path,
    solve_u_direct,
    solve_u_transform,
    step_v,
)

G = Grid(dim=1, half_width=8.0, n=257)


def linear_spec(lam=1.0, alpha=0.0):
    """No reaction, no forcing: the damped heat equation."""
    return ModelSpec(lam=lam, alpha=alpha, p=4.0, alpha1=1.0, alpha2=1.0,
                     alpha3=0.0, growth_c=3.0, f=Nonlinearity("zero"))


def lowest_mode(grid):
    L = grid.half_width
    return Field.from_function(grid, lambda x: np.sin(np.pi * (x + L) / (2.0 * L)))


def discrete_rate(grid, lam):
    """Per-unit-time decay of the lowest mode under the implicit solve."""
    h = grid.h
    mu = (4.0 / h**2) * np.sin(np.pi * h / (4.0 * grid.half_width)) ** 2
    return lam + mu


def zero_path(s_max=2.0, step=1e-3):
    m = int(round(2 * s_max / step))
    return WienerPath.from_samples(np.zeros(m + 1), step, -s_max)


def test_zero_is_fixed_point():
    p = zero_path()
    rec = solve_u_transform(Field.zeros(G), 0.0, 0.1, p, canonical_cubic(alpha=0.0), 1e-3)
    assert np.array_equal(rec.u_final.values, np.zeros(257))
    out = step_v(Field.zeros(G), 0.0, 1e-3, p, canonical_cubic(alpha=0.0))
    assert np.array_equal(out.values, np.zeros(257))


def test_eigenmode_decay_matches_implicit_factor():
    # for the lowest mode each implicit solve is division by 1 + dt*(lam + mu)
    spec = linear_spec()
    dt, n = 1e-3, 200
    u0 = lowest_mode(G)
    rec = solve_u_transform(u0, 0.0, n * dt, zero_path(), spec, dt)
    rate = discrete_rate(G, spec.lam)
    expected = u0.values / (1.0 + dt * rate) ** n
    assert rec.u_final.values == pytest.approx(expected, rel=1e-11)


def test_eigenmode_decay_approaches_heat_kernel():
    spec = linear_spec()
    dt, t = 1e-4, 0.5
    u0 = lowest_mode(G)
    rec = solve_u_transform(u0, 0.0, t, zero_path(s_max=1.0, step=dt), spec, dt)
    rate = discrete_rate(G, spec.lam)
    got = norms(rec.u_final).l2
    want = np.exp(-rate * t) * norms(u0).l2
    assert got == pytest.approx(want, rel=1e-3)


def test_eigenmode_decay_2d():
    g2 = Grid(dim=2, half_width=4.0, n=33)
    spec = linear_spec()
    dt, n = 1e-3, 50
    L = g2.half_width
    u0 = Field.from_function(
        g2, lambda x, y: np.sin(np.pi * (x + L) / (2 * L)) * np.sin(np.pi * (y + L) / (2 * L)))
    rec = solve_u_transform(u0, 0.0, n * dt, zero_path(), spec, dt)
    rate = spec.lam + 2.0 * (discrete_rate(g2, 0.0))
    expected = u0.values / (1.0 + dt * rate) ** n
    assert rec.u_final.values == pytest.approx(expected, rel=1e-9)


def test_pure_noise_transform_is_exact():
    # no reaction, no diffusion, negligible damping: the solution is
    # u0 * exp(alpha * (w(t) - w(0))) and the transform path hits it
    spec = dataclasses.replace(linear_spec(lam=1e-12), alpha=0.8)
    p = sample_two_sided_path(21, 2.0, 1e-3)
    u0 = Field.from_function(G, lambda x: np.exp(-x * x))
    rec = solve_u_transform(u0, 0.0, 2.0, p, spec, 1e-3, diffusion=False)
    exact = u0.values * np.exp(0.8 * p.value_at(2.0))
    assert np.max(np.abs(rec.u_final.values - exact)) < 1e-10 * np.max(np.abs(exact))


def test_pure_noise_direct_error_halves():
    # the leading error coefficient is random per path, so first-order
    # convergence shows in the panel RMS, not pathwise at each level
    spec = dataclasses.replace(linear_spec(lam=1e-12), alpha=0.8)
    u0 = Field.from_function(G, lambda x: np.exp(-x * x))
    rel = np.zeros((10, 3))
    for i, seed in enumerate(range(20, 30)):
        p = sample_two_sided_path(seed, 2.0, 2.5e-4)
        exact = u0.values * np.exp(0.8 * p.value_at(2.0))
        scale = np.max(np.abs(exact))
        for j, dt in enumerate((1e-3, 5e-4, 2.5e-4)):
            rec = solve_u_direct(u0, 0.0, 2.0, p, spec, dt, diffusion=False)
            rel[i, j] = np.max(np.abs(rec.u_final.values - exact)) / scale
    rms = np.sqrt((rel**2).mean(axis=0))
    assert rms[0] / rms[1] > 1.8
    assert rms[1] / rms[2] > 1.8
    assert rms[2] < 2e-4


def test_zero_intensity_ignores_the_path():
    spec = canonical_cubic(alpha=0.0, forcing=periodic_bump_forcing(0.05))
    u0 = Field.from_function(G, lambda x: np.exp(-x * x))
    rec_noisy = solve_u_transform(u0, 0.0, 0.5, sample_two_sided_path(3, 1.0, 1e-3), spec, 1e-3)
    rec_flat = solve_u_transform(u0, 0.0, 0.5, zero_path(1.0), spec, 1e-3)
    assert np.array_equal(rec_noisy.u_final.values, rec_flat.u_final.values)


def test_conjugation_bookkeeping():
    spec = canonical_cubic(alpha=0.7, forcing=periodic_bump_forcing(0.05))
    p = sample_two_sided_path(5, 1.0, 1e-3)
    u0 = Field.from_function(G, lambda x: np.exp(-x * x))
    rec = solve_u_transform(u0, 0.0, 1.0, p, spec, 1e-3)
    z_end = np.exp(-0.7 * p.value_at(1.0))
    assert rec.v_final == pytest.approx(z_end * rec.u_final.values, rel=1e-13, abs=1e-300)
    assert rec.v_sq[0] == pytest.approx(norms(u0).l2**2, rel=1e-14)


def test_record_ledger_shapes_and_forcing():
    spec = canonical_cubic(alpha=0.5, forcing=periodic_bump_forcing(0.05))
    p = sample_two_sided_path(5, 1.0, 1e-3)
    u0 = Field.from_function(G, lambda x: np.exp(-x * x))
    rec = solve_u_transform(u0, 0.0, 0.25, p, spec, 1e-3, forcing_offset=0.5)
    assert rec.times.shape == (251,)
    assert rec.t_start == 0.0 and rec.t_end == pytest.approx(0.25)
    for arr in (rec.v_sq, rec.gradv_sq, rec.zsq_lp_p, rec.z_sq, rec.g_sq):
        assert arr.shape == (251,) and np.all(np.isfinite(arr))
    k = 100
    want = spec.g.l2norm_sq(float(rec.times[k]) + 0.5, G)
    assert rec.g_sq[k] == pytest.approx(want, rel=1e-12)


def test_snapshots():
    spec = canonical_cubic(alpha=0.5)
    p = sample_two_sided_path(5, 1.0, 1e-3)
    u0 = Field.from_function(G, lambda x: np.exp(-x * x))
    rec = solve_u_transform(u0, 0.0, 0.2, p, spec, 1e-3, snapshot_every=50)
    assert len(rec.snapshots) == 5
    t0, f0 = rec.snapshots[0]
    assert t0 == 0.0 and np.array_equal(f0.values, u0.values)
    t_last, _ = rec.snapshots[-1]
    assert t_last == pytest.approx(0.2)


def test_zero_step_run_is_identity():
    spec = canonical_cubic(alpha=0.9)
    p = sample_two_sided_path(5, 1.0, 1e-3)
    u0 = Field.from_function(G, lambda x: np.exp(-x * x))
    rec = solve_u_transform(u0, 0.0, 0.0, p, spec, 1e-3)
    assert np.array_equal(rec.u_final.values, u0.values)


def test_direct_and_transform_agree():
    spec = canonical_cubic(alpha=0.5, forcing=periodic_bump_forcing(0.05))
    p = sample_two_sided_path(9, 1.0, 1e-3)
    u0 = Field.from_function(G, lambda x: np.exp(-x * x))
    rt = solve_u_transform(u0, 0.0, 1.0, p, spec, 1e-3)
    rd = solve_u_direct(u0, 0.0, 1.0, p, spec, 1e-3)
    assert l2_distance(rt.u_final, rd.u_final) < 1e-3
    assert rd.scheme == "direct" and rt.scheme == "transform"


def test_direct_ledger_uses_transformed_state():
    spec = canonical_cubic(alpha=0.7)
    p = sample_two_sided_path(9, 1.0, 1e-3)
    u0 = Field.from_function(G, lambda x: np.exp(-x * x))
    rd = solve_u_direct(u0, 0.0, 0.5, p, spec, 1e-3)
    assert rd.v_sq[0] == pytest.approx(norms(u0).l2**2, rel=1e-14)
    z_end = np.exp(-0.7 * p.value_at(0.5))
    assert rd.v_sq[-1] == pytest.approx(z_end**2 * norms(rd.u_final).l2**2, rel=1e-12)


def test_divergence_reports_time():
    spec = dataclasses.replace(canonical_cubic(alpha=0.0), f=Nonlinearity("anticubic"))
    u0 = Field.from_function(G, lambda x: 10.0 * np.exp(-x * x))
    with pytest.raises(DivergenceError) as err:
        solve_u_transform(u0, 0.0, 1.0, zero_path(), spec, 1e-3)
    assert err.value.t > 0.0
    assert "t=" in str(err.value)


def test_step_grid_must_divide_interval():
    spec = canonical_cubic(alpha=0.0)
    u0 = Field.zeros(G)
    with pytest.raises(ValueError):
        solve_u_transform(u0, 0.0, 0.0015, zero_path(), spec, 1e-3)
    with pytest.raises(ValueError):
        solve_u_transform(u0, 0.5, 0.0, zero_path(), spec, 1e-3)


def test_bounded_over_seed_panel():
    spec = canonical_cubic(alpha=1.0, forcing=periodic_bump_forcing(0.05))
    u0 = Field.from_function(G, lambda x: np.exp(-x * x))
    sup = 0.0
    for seed in range(30):
        p = sample_two_sided_path(seed, 1.0, 1e-3)
        rec = solve_u_transform(u0, 0.0, 1.0, p, spec, 1e-3)
        sup = max(sup, norms(rec.u_final).l2)
    assert np.isfinite(sup) and sup < 50.0
