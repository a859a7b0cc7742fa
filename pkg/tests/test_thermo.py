import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from birkspec.constructions import (
    example23,
    example_indicator,
    lemma53,
    remark55_biased,
    remark55_majority,
)
from birkspec.debruijn import endpoints
from birkspec.dimension import eggleston_dimension
from birkspec.oracle import enumerate_cycle_means
from birkspec.shift_core import PccFunction, PreconditionError, constant, refine
from birkspec.thermo import (
    endpoint_dimension,
    gibbs_measure,
    is_spectrum_continuous,
    norm_continuity_check,
    one_sided_slopes,
    pressure,
    spectrum_at,
    spectrum_curve,
)

from conftest import pcc_functions, random_function

LOG2 = math.log(2)
# log2 of the real root of x^3 = x^2 + 1
EX23_ENDPOINT_DIM = 0.5514630897455953


def test_pressure_at_zero_is_log2(rng):
    for _ in range(10):
        assert pressure(random_function(rng), 0.0) == pytest.approx(LOG2, abs=1e-12)


@pytest.mark.parametrize("t", [-2.0, 0.0, 3.0])
def test_pressure_indicator_closed_form(t):
    # Perron root of [[1, 1], [e^t, e^t]] is 1 + e^t
    assert pressure(example_indicator(), t) == pytest.approx(math.log1p(math.exp(t)), abs=1e-12)


def test_pressure_no_overflow_for_large_t():
    assert pressure(example_indicator(), 2000.0) == pytest.approx(2000.0, abs=1e-9)


def test_pressure_sandwich(rng):
    for _ in range(10):
        f = random_function(rng)
        _, hi = endpoints(f)
        for t in range(1, 65):
            gap = pressure(f, t) - t * hi
            assert -1e-10 <= gap <= LOG2 + 1e-10


def test_gibbs_uniform_at_zero():
    m = gibbs_measure(example23(), 0.0)
    P = m.transitions
    assert np.allclose(P[P > 0], 0.5, atol=1e-14)
    assert m.entropy == pytest.approx(LOG2, abs=1e-12)


def test_gibbs_concentrates():
    m = gibbs_measure(example_indicator(), 64.0)
    assert m.mean == pytest.approx(1.0, abs=1e-12)
    assert m.entropy < 1e-20


def test_gibbs_identity_random(rng):
    for _ in range(10):
        f = random_function(rng)
        m = gibbs_measure(f, 1.0)
        assert m.entropy == pytest.approx(pressure(f, 1.0) - m.mean, abs=1e-8)


@given(pcc_functions(max_depth=3), st.integers(-8, 8))
def test_markov_measure_invariants(f, t):
    m = gibbs_measure(f, float(t))
    P, pi = m.transitions, m.stationary
    assert np.allclose(P.sum(axis=1), 1.0, atol=1e-12)
    n = len(pi)
    mask = np.zeros((n, n), bool)
    for u in range(n):
        mask[u, (u << 1) & (n - 1)] = mask[u, ((u << 1) & (n - 1)) | 1] = True
    assert np.all(P[~mask] == 0)
    assert np.allclose(pi @ P, pi, atol=1e-10)
    assert pi.sum() == pytest.approx(1.0, abs=1e-12)
    assert m.entropy >= -1e-15
    assert m.entropy + t * m.mean == pytest.approx(pressure(f, t), abs=1e-8)


@given(pcc_functions(max_depth=3), st.floats(-6, 6), st.floats(0.1, 3), st.floats(0.1, 3))
def test_pressure_convex(f, t1, d1, d2):
    t2, t3 = t1 + d1, t1 + d1 + d2
    p1, p2, p3 = pressure(f, t1), pressure(f, t2), pressure(f, t3)
    assert p2 <= p1 + (p3 - p1) * d1 / (d1 + d2) + 1e-10


@given(pcc_functions(max_depth=3))
def test_mean_monotone(f):
    means = [gibbs_measure(f, t).mean for t in (-64, -4, -1, 0, 1, 4, 16, 64)]
    assert all(b >= a - 1e-10 for a, b in zip(means, means[1:]))
    lo, hi = endpoints(f)
    assert lo - 1e-12 <= means[0] and means[-1] <= hi + 1e-12


def _cycle_gap(f):
    means = sorted(m for _, m in enumerate_cycle_means(f, 1 << f.depth))
    top = means[-1]
    below = [m for m in means if m < top - 1e-9]
    return top - below[-1] if below else math.inf


def test_mean_at_64_near_endpoint(rng):
    checked = 0
    while checked < 20:
        f = random_function(rng)
        if _cycle_gap(f) < 0.15:
            continue
        _, hi = endpoints(f)
        assert abs(gibbs_measure(f, 64).mean - hi) <= 1e-3
        checked += 1


def test_mean_lags_when_cycle_means_nearly_tie():
    # the two best cycle means differ by about 0.01, so convergence of the
    # Gibbs mean is slow in t
    f = PccFunction(
        2,
        (-0.36896817866684817, 0.5552014915172465, 0.27176954104116446, 0.3821803282418721),
    )
    _, hi = endpoints(f)
    assert _cycle_gap(f) < 0.011
    assert hi - gibbs_measure(f, 64).mean > 1e-3
    assert hi - gibbs_measure(f, 1024).mean < 1e-12


def test_spectrum_examples():
    f = example_indicator()
    assert spectrum_at(f, 0.5) == pytest.approx(1.0, abs=1e-12)
    assert spectrum_at(f, 0.25) == pytest.approx(0.8112781244591328, abs=1e-10)
    assert spectrum_at(f, 1.5) == 0.0
    c = constant(5.0, 1)
    assert spectrum_at(c, 5.0) == 1.0
    assert spectrum_at(c, 4.9) == 0.0


def test_spectrum_curve_indicator():
    curve = spectrum_curve(example_indicator(), 101)
    err = max(abs(s - eggleston_dimension(a)) for a, s in curve.samples)
    assert err < 1e-8
    assert curve.is_concave()


def test_spectrum_curve_degenerate():
    curve = spectrum_curve(constant(0.3, 2), 11)
    assert curve.samples == [(0.3, 1.0)]


def test_spectrum_curve_example23():
    curve = spectrum_curve(example23(), 41)
    assert curve.is_concave()
    assert spectrum_at(example23(), 0.0) == pytest.approx(1.0, abs=1e-8)
    assert curve.values[0] == pytest.approx(EX23_ENDPOINT_DIM, abs=1e-12)
    assert curve.values[-1] == pytest.approx(EX23_ENDPOINT_DIM, abs=1e-12)
    assert np.all((curve.values >= 0) & (curve.values <= 1))


def test_spectrum_curve_grid_check():
    with pytest.raises(PreconditionError):
        spectrum_curve(example_indicator(), 2)


def test_endpoint_dimension_examples():
    assert endpoint_dimension(example_indicator(), "max") == 0.0
    assert endpoint_dimension(example23(), "min") == pytest.approx(EX23_ENDPOINT_DIM, abs=1e-12)
    assert endpoint_dimension(example23(), "min") >= 1 / 3
    assert endpoint_dimension(remark55_majority(2), "max") >= 2 / 5
    assert endpoint_dimension(remark55_biased(3), "max") >= 2 / 3
    with pytest.raises(PreconditionError):
        endpoint_dimension(example23(), "middle")


def test_continuity_classification():
    assert is_spectrum_continuous(example_indicator(), 1e-9)
    assert not is_spectrum_continuous(example23(), 1e-9)
    assert not is_spectrum_continuous(constant(1.0, 1), 1e-9)
    with pytest.raises(PreconditionError):
        is_spectrum_continuous(example23(), 0.0)


def test_slopes_indicator():
    curve = spectrum_curve(example_indicator(), 3)
    slopes = one_sided_slopes(curve, "max", [0.1, 0.01, 0.001])
    mags = [abs(s) for s in slopes]
    assert mags[0] < mags[1] < mags[2] and mags[2] > 5
    lower = one_sided_slopes(curve, "min", [0.1, 0.01, 0.001])
    assert lower == pytest.approx([-s for s in slopes], abs=1e-9)


def test_slopes_preconditions():
    curve = spectrum_curve(example_indicator(), 3)
    with pytest.raises(PreconditionError):
        one_sided_slopes(curve, "max", [1.5])
    with pytest.raises(PreconditionError):
        one_sided_slopes(spectrum_curve(constant(1.0, 1), 3), "max", [0.1])


def test_run_function_chord_bound():
    f = lemma53(-1.0, 1.0, 12)
    beta = 0.25
    chord = (spectrum_at(f, 1.0) - spectrum_at(f, 0.5)) / 0.5
    assert abs(chord) <= (beta + 0.2) / (beta * 2.0)


def test_translation_equivariance(rng):
    for _ in range(5):
        f = random_function(rng)
        c = float(rng.uniform(-2, 2))
        a, b = spectrum_curve(f, 21), spectrum_curve(f.shifted(c), 21)
        assert np.allclose(b.alphas, a.alphas + c, atol=1e-12)
        assert np.allclose(b.values, a.values, atol=1e-10)


def test_spectrum_at_integral_is_one(rng):
    from birkspec.shift_core import integrate

    for _ in range(10):
        f = random_function(rng)
        assert spectrum_at(f, integrate(f)) == pytest.approx(1.0, abs=1e-8)


def test_endpoint_consistency(rng):
    for _ in range(10):
        f = random_function(rng)
        lo, hi = endpoints(f)
        assert spectrum_at(f, hi - 1e-4) >= endpoint_dimension(f, "max") - 1e-2
        assert spectrum_at(f, lo + 1e-4) >= endpoint_dimension(f, "min") - 1e-2


def test_norm_continuity_examples(rng):
    f = example_indicator()
    assert norm_continuity_check(f, f, 0.1).passed
    r = norm_continuity_check(f, f.shifted(0.05), 0.06)
    assert r.passed and r.worst_gap <= 1e-6
    h = PccFunction(2, tuple(rng.uniform(-1, 1, 4)))
    g = refine(f, 2) + h.scaled(0.05)
    assert norm_continuity_check(f, g, 0.06).passed


def test_norm_continuity_precondition():
    f = example_indicator()
    with pytest.raises(PreconditionError, match="0.5"):
        norm_continuity_check(f, f.shifted(0.5), 0.1)


def test_norm_continuity_detects_far_function():
    # with eps too small to reach the peak of g, the check must notice
    f = example_indicator()
    g = f.shifted(0.3)
    from birkspec.thermo import _best_nearby

    assert _best_nearby(g, 0.5, 0.01) < 0.9
