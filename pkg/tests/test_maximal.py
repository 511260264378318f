import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import carlesonlab as cl
from carlesonlab.errors import EmptyArc


def brute_force_maximal_at(curve, f, i):
    """Exhaustive scan over every realized radius at sample i, plus the
    radius below the nearest neighbor (portion = the point itself)."""
    absf = np.abs(np.asarray(f, complex))
    aw = curve.arc_weights
    d = np.abs(curve.samples - curve.samples[i])
    pos = np.unique(d[d > 0])
    grid = np.concatenate(([pos[0] * (1 - 1e-12)], pos * (1 + 1e-12)))
    best = 0.0
    for eps in grid:
        sel = d < eps
        best = max(best, float((absf[sel] * aw[sel]).sum() / aw[sel].sum()))
    return best


def test_constant_function(unit_circle):
    res = cl.maximal(unit_circle, 1.0, eval_indices=np.arange(0, 4096, 64))
    assert np.max(np.abs(res.values - 1.0)) == 0.0


def test_bounded_by_sup(unit_circle):
    rng = np.random.default_rng(0)
    f = rng.normal(size=unit_circle.n_samples) \
        + 1j * rng.normal(size=unit_circle.n_samples)
    res = cl.maximal(unit_circle, f, eval_indices=np.arange(0, 4096, 128))
    assert np.all(res.values <= np.max(np.abs(f)) + 1e-12)


def test_against_brute_force_scan():
    c = cl.generate_circle(1.0, 1024)
    mask = cl.omega_arc(c, 1.0 + 0j, 0.2).astype(float)
    eval_idx = np.array([0, 3, 127, 255, 512, 700])
    res = cl.maximal(c, mask, eval_indices=eval_idx, max_radii=2048)
    for k, i in enumerate(eval_idx):
        oracle = brute_force_maximal_at(c, mask, i)
        assert res.values[k] == pytest.approx(oracle, rel=1e-12)


def test_indicator_is_one_on_support():
    c = cl.generate_circle(1.0, 1024)
    mask = cl.omega_arc(c, 1.0 + 0j, 0.2)
    res = cl.maximal(c, mask.astype(float))
    on = mask[res.eval_indices]
    assert np.all(res.values[on] >= 1.0 - 1e-12)
    assert np.all(res.values <= 1.0 + 1e-12)


def test_dominates_every_radius(unit_circle):
    rng = np.random.default_rng(3)
    f = rng.uniform(0, 1, unit_circle.n_samples)
    i = 17
    res = cl.maximal(unit_circle, f, eval_indices=np.array([i]))
    d = np.abs(unit_circle.samples - unit_circle.samples[i])
    aw = unit_circle.arc_weights
    for eps in (0.01, 0.1, 1.0, 2.0):
        sel = d < eps
        avg = (f[sel] * aw[sel]).sum() / aw[sel].sum()
        assert res.values[0] >= avg - 1e-12


def test_positive_homogeneity(spiral1):
    rng = np.random.default_rng(4)
    f = rng.uniform(0, 1, spiral1.n_samples)
    idx = np.arange(0, spiral1.n_samples, 256)
    base = cl.maximal(spiral1, f, eval_indices=idx)
    doubled = cl.maximal(spiral1, 2.0 * f, eval_indices=idx)
    assert np.array_equal(doubled.values, 2.0 * base.values)
    scaled = cl.maximal(spiral1, 3.7 * f, eval_indices=idx)
    assert scaled.values == pytest.approx(3.7 * base.values, rel=1e-13)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_sublinearity(segment, seed):
    rng = np.random.default_rng(seed)
    f = rng.uniform(0, 1, segment.n_samples)
    g = rng.uniform(0, 1, segment.n_samples)
    idx = np.arange(0, segment.n_samples, 64)
    ev = cl.MaximalEvaluator(segment, idx)
    both = cl.maximal(segment, f + g, evaluator=ev).values
    split = cl.maximal(segment, f, evaluator=ev).values \
        + cl.maximal(segment, g, evaluator=ev).values
    assert np.all(both <= split + 1e-12)


# --- weighted variants ------------------------------------------------------


def test_gamma_zero_coincides_exactly(spiral1):
    rng = np.random.default_rng(5)
    f = rng.uniform(0, 1, spiral1.n_samples)
    idx = np.arange(0, spiral1.n_samples, 128)
    plain = cl.maximal(spiral1, f, eval_indices=idx)
    weighted = cl.weighted_maximal(spiral1, f, 0j, 0.0, eval_indices=idx)
    assert np.array_equal(plain.values, weighted.values)


def test_real_gamma_equals_power_variant(spiral1, spiral1_branch):
    rng = np.random.default_rng(6)
    f = rng.uniform(0, 1, spiral1.n_samples)
    idx = np.arange(0, spiral1.n_samples, 128)
    a = cl.weighted_maximal(spiral1, f, 0j, 0.4, branch=spiral1_branch,
                            eval_indices=idx)
    b = cl.power_weighted_maximal(spiral1, f, 0j, 0.4, eval_indices=idx)
    assert np.array_equal(a.values, b.values)


def brute_force_weighted_at(curve, f, log_phi, i):
    absf = np.abs(np.asarray(f, complex))
    aw = curve.arc_weights
    d = np.abs(curve.samples - curve.samples[i])
    g = absf * np.exp(-log_phi)
    pos = np.unique(d[d > 0])
    grid = np.concatenate(([pos[0] * (1 - 1e-12)], pos * (1 + 1e-12)))
    best = 0.0
    for eps in grid:
        sel = d < eps
        best = max(best, float((g[sel] * aw[sel]).sum() / aw[sel].sum()))
    return best * np.exp(log_phi[i])


def test_weighted_against_brute_force():
    c = cl.generate_log_spiral(1.0, 1e-3, 1.0, 1024)
    br = cl.unwrap_arg(c, 0j)
    mask = cl.omega_arc(c, 0j, 0.05).astype(float)
    log_phi = cl.phi(br, 1j).log_values
    eval_idx = np.array([0, 50, 400, 1023])
    res = cl.weighted_maximal(c, mask, 0j, 1j, branch=br,
                              eval_indices=eval_idx, max_radii=2048)
    for k, i in enumerate(eval_idx):
        oracle = brute_force_weighted_at(c, mask, log_phi, i)
        assert res.values[k] == pytest.approx(oracle, rel=1e-10)


def test_power_dominance_outside_arc(spiral1, spiral1_branch):
    gamma = 0.3 + 0.2j
    w = cl.phi(spiral1_branch, gamma)
    idx = cl.estimate_indices(cl.compute_W(spiral1, 0j, w))
    eps = 0.1
    delta = cl.d_t(spiral1, 0j) / 8
    c1, c2 = cl.power_sandwich(spiral1, 0j, w, eps, delta, indices=idx)
    mask = cl.omega_arc(spiral1, 0j, delta)
    ev = cl.MaximalEvaluator(spiral1, np.arange(0, spiral1.n_samples, 64))

    f_in = mask.astype(float)
    mw = cl.weighted_maximal(spiral1, f_in, 0j, gamma, branch=spiral1_branch,
                             evaluator=ev)
    mp = cl.power_weighted_maximal(spiral1, f_in, 0j, idx.beta + eps,
                                   evaluator=ev)
    outside = ~mask[ev.eval_indices]
    assert np.all(mw.values[outside] <= c1 * mp.values[outside] + 1e-10)

    f_out = (~mask).astype(float)
    mw2 = cl.weighted_maximal(spiral1, f_out, 0j, gamma,
                              branch=spiral1_branch, evaluator=ev)
    mp2 = cl.power_weighted_maximal(spiral1, f_out, 0j, idx.alpha - eps,
                                    evaluator=ev)
    inside = mask[ev.eval_indices]
    assert np.all(mw2.values[inside] <= c2 * mp2.values[inside] + 1e-10)


# --- decomposition -----------------------------------------------------------


def test_decompose_support_inside(spiral1, spiral1_branch):
    delta = cl.d_t(spiral1, 0j) / 8
    mask = cl.omega_arc(spiral1, 0j, delta)
    dec = cl.decompose(spiral1, mask.astype(float), 0j, 0.3 + 0.2j, delta,
                       branch=spiral1_branch,
                       eval_indices=np.arange(0, spiral1.n_samples, 64))
    assert np.max(dec.pieces[2]) == 0.0
    assert np.max(dec.pieces[3]) == 0.0
    assert np.max(dec.pieces[0]) > 0.0


def test_decompose_support_outside(spiral1, spiral1_branch):
    delta = cl.d_t(spiral1, 0j) / 8
    mask = cl.omega_arc(spiral1, 0j, delta)
    dec = cl.decompose(spiral1, (~mask).astype(float), 0j, 0.3 + 0.2j, delta,
                       branch=spiral1_branch,
                       eval_indices=np.arange(0, spiral1.n_samples, 64))
    assert np.max(dec.pieces[0]) == 0.0
    assert np.max(dec.pieces[1]) == 0.0


def test_decompose_dominates(spiral1, spiral1_branch):
    rng = np.random.default_rng(7)
    f = rng.uniform(0, 1, spiral1.n_samples)
    delta = cl.d_t(spiral1, 0j) / 8
    idx = np.arange(0, spiral1.n_samples, 64)
    dec = cl.decompose(spiral1, f, 0j, 0.3 + 0.2j, delta,
                       branch=spiral1_branch, eval_indices=idx)
    total = sum(dec.pieces)
    mf = cl.weighted_maximal(spiral1, f, 0j, 0.3 + 0.2j,
                             branch=spiral1_branch, eval_indices=idx)
    assert np.all(mf.values <= total + 1e-10)


def test_decompose_empty_arc(spiral1):
    with pytest.raises(EmptyArc):
        cl.decompose(spiral1, 1.0, 0j, 0.1, 1e-7)


def test_csv_export(tmp_path, unit_circle):
    res = cl.maximal(unit_circle, 1.0,
                     eval_indices=np.arange(0, 4096, 512))
    path = tmp_path / "m.csv"
    cl.export_maximal_csv(unit_circle, res, path)
    lines = path.read_bytes().decode().split("\r\n")
    assert lines[0] == "arclen,Mf,argmax_eps"
    assert len(lines) == res.values.size + 2
