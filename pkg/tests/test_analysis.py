import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsepriv import analysis as an
from sparsepriv.analysis import LeakageBudget, PadStats, Pmf
from sparsepriv.gf import get_field
from sparsepriv.pad import PadParams
from sparsepriv.verify import random_leakage_grid

F256 = get_field(256)


@st.composite
def leakage_points(draw):
    q = draw(st.sampled_from([2, 3, 5, 7, 256]))
    s = draw(st.floats(1.0 / q, 1.0, exclude_min=True))
    return q, s, draw(st.floats(0, 1)), draw(st.floats(0, 1))


def test_entropy_examples():
    assert an.entropy_q(np.full(7, 1 / 7)) == pytest.approx(1.0, abs=1e-15)
    assert an.entropy_q([1.0, 0.0, 0.0]) == 0.0
    assert an.entropy_q([0.5, 0.5]) == pytest.approx(1.0, abs=1e-15)


def test_pmf_validation():
    with pytest.raises(ValueError):
        Pmf([0.5, 0.6])
    with pytest.raises(ValueError):
        Pmf([1.5, -0.5])


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1), st.sampled_from([2, 3, 7, 256]), st.integers(0, 255))
def test_special_entropy_depends_only_on_mass(mass, q, pos):
    pmf = Pmf.special(mass, q, position=pos % q)
    assert an.special_entropy(mass, q) == pytest.approx(an.entropy_q(pmf), abs=1e-12)


def test_uniform_pad_has_no_leakage(field):
    q = field.q
    s = min(1.0, 1.0 / q + 0.3)
    st_ = an.pad_stats(s, PadParams.symmetric(1 / q, field))
    assert st_.eps1 == 0.0
    assert st_.eps2 == pytest.approx(0.0, abs=1e-14)
    assert st_.s_pad == pytest.approx(1 / q, abs=1e-15)


@pytest.mark.parametrize("p", [0.0, 0.2, 0.5, 0.99, 1.0])
def test_symmetric_pad_padded_matrix_leaks_nothing(p, field):
    assert an.pad_stats(0.9, PadParams.symmetric(p, field)).eps1 == 0.0


def test_deterministic_pad_leaks_source_entropy(field):
    q = field.q
    s = 0.95
    st_ = an.pad_stats(s, PadParams(1.0, 1.0, field))
    assert st_.s_pad == s
    assert st_.eps2 == pytest.approx(an.entropy_q(Pmf.special(s, q)), abs=1e-14)


def test_pad_sparsity_slope_coefficient():
    s, q = 0.93, 256
    coeff = (s * q - 1) / (q - 1)
    assert 0.9295 <= coeff <= 0.9300
    st_ = an.pad_stats(s, PadParams.symmetric(0.5, F256))
    assert st_.s_pad == pytest.approx(0.5 * coeff + (1 - s) / (q - 1), abs=1e-15)


def test_s_precondition():
    with pytest.raises(ValueError):
        an.pad_stats(1 / 7, PadParams(0.5, 0.5, get_field(7)))
    with pytest.raises(ValueError):
        an.mi_bruteforce(0.4, PadParams(0.5, 0.5, get_field(2)))


def test_hand_enumerated_binary_case():
    # q=2, s=0.9, p_z0=1, p_nz0=0: R is always 0 and A + R = A
    params = PadParams(1.0, 0.0, get_field(2))
    assert np.allclose(an.joint_pmf(0.9, params, "pad"), [[0.9, 0.0], [0.1, 0.0]])
    assert np.allclose(an.joint_pmf(0.9, params, "padded"), [[0.9, 0.0], [0.0, 0.1]])
    h = -(0.9 * math.log2(0.9) + 0.1 * math.log2(0.1))
    assert an.mi_bruteforce(0.9, params, "pad") == 0.0
    assert an.mi_bruteforce(0.9, params, "padded") == pytest.approx(h, abs=1e-15)
    st_ = an.pad_stats(0.9, params)
    assert st_.eps2 == pytest.approx(0.0, abs=1e-15)
    assert st_.eps1 == pytest.approx(h, abs=1e-15)


def test_closed_forms_match_bruteforce_grid():
    for q, s, pz, pnz in random_leakage_grid(240, seed=11):
        params = PadParams(pz, pnz, get_field(q))
        st_ = an.pad_stats(s, params)
        assert st_.eps2 == pytest.approx(an.mi_bruteforce(s, params, "pad"), abs=1e-10)
        assert st_.eps1 == pytest.approx(an.mi_bruteforce(s, params, "padded"), abs=1e-10)


def test_joint_pmf_marginals_match_sparsities():
    for q, s, pz, pnz in random_leakage_grid(40, seed=3):
        params = PadParams(pz, pnz, get_field(q))
        st_ = an.pad_stats(s, params)
        assert an.joint_pmf(s, params, "pad").sum(axis=0)[0] == pytest.approx(st_.s_pad, abs=1e-12)
        assert an.joint_pmf(s, params, "padded").sum(axis=0)[0] == pytest.approx(st_.s_padded, abs=1e-12)


@settings(max_examples=300, deadline=None)
@given(leakage_points())
def test_leakages_nonnegative(point):
    q, s, pz, pnz = point
    st_ = an.pad_stats(s, PadParams(pz, pnz, get_field(q)))
    assert st_.eps1 >= 0 and st_.eps2 >= 0
    assert 0 <= st_.s_pad <= 1 + 1e-15 and 0 <= st_.s_padded <= 1 + 1e-15


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([2, 3, 7, 256]), st.floats(0, 1), st.floats(0.51, 1.0))
def test_diagonal_zero_leakage_bruteforce(q, p, s):
    assert an.mi_bruteforce(s, PadParams(p, p, get_field(q)), "padded") <= 1e-12


def test_collusion_leakage_examples():
    stats = PadStats(0.5, 0.5, 0.0, 0.01)
    m, n = 20, 30
    full = m * n * 0.01
    assert an.collusion_leakage(LeakageBudget(0.5, 100, 100, 1), m, n, stats) == pytest.approx(full)
    assert an.collusion_leakage(LeakageBudget(0.5, 30, 100, 4), m, n, stats) == pytest.approx(full)
    assert an.collusion_leakage(LeakageBudget(0.5, 10, 100, 1), m, n, stats) == pytest.approx(0.1 * full)


def test_budget_validation():
    with pytest.raises(ValueError):
        LeakageBudget(1.5, 1, 10)
    with pytest.raises(ValueError):
        LeakageBudget(0.5, 0, 10)
    with pytest.raises(ValueError):
        LeakageBudget(0.5, 11, 10)


@pytest.mark.parametrize("z", [1, 10, 50, 100])
def test_p_star_boundaries(z):
    assert an.solve_p_star(0.93, F256, LeakageBudget(0.0, z, 100, 1)) == 1 / 256
    assert an.solve_p_star(0.93, F256, LeakageBudget(1.0, z, 100, 1)) == 1.0


def test_p_star_non_increasing_in_z_and_matches_grid_scan():
    prev = 1.0
    for z in range(1, 101, 3):
        b = LeakageBudget(0.5, z, 100, 1)
        p = an.solve_p_star(0.93, F256, b)
        assert p <= prev
        assert abs(p - an.grid_p_star(0.93, F256, b)) <= 1e-3
        prev = p


@pytest.mark.parametrize("eps_rel", [0.0, 0.05, 0.25, 0.5, 0.75, 0.9])
@pytest.mark.parametrize("q,s", [(256, 0.93), (7, 0.5), (2, 0.8)])
def test_p_star_is_maximal(eps_rel, q, s):
    field = get_field(q)
    for z in (1, 3, 7, 10):
        b = LeakageBudget(eps_rel, z, 10, 2)
        p = an.solve_p_star(s, field, b)
        bound = an.per_entry_bound(s, q, b)
        assert an.eps2_symmetric(p, s, q) <= bound + 1e-12
        if p < 1.0:
            assert an.eps2_symmetric(min(p + 1e-6, 1.0), s, q) > bound


def test_monotonicity_report():
    rep = an.check_monotonicity(0.93, F256, grid=1000)
    assert rep.ok, rep.violations
    assert rep.slope == pytest.approx((0.93 * 256 - 1) / 255)
    assert rep.slope > 0


@pytest.mark.parametrize("q,s", [(2, 0.6), (3, 0.4), (7, 0.9), (256, 0.5)])
def test_monotonicity_other_fields(q, s):
    assert an.check_monotonicity(s, get_field(q), grid=400).ok


def test_leakage_minimum_at_uniform_pad():
    ps = np.linspace(1 / 256, 1, 500)
    eps = [an.eps2_symmetric(float(p), 0.93, 256) for p in ps]
    assert eps[0] == pytest.approx(0.0, abs=1e-15)
    assert min(eps) == eps[0]
