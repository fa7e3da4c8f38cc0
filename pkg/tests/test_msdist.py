import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from porosity_lab import AugmentedSpace, MSParams, ms_distance, ms_membership, validate_quasi_metric
from porosity_lab.errors import DepthCapTooSmall, NonPositiveRadius, ParamOutOfRange
from porosity_lab.msdist import default_params, hole_shrink_beta, hole_shrink_exponent, k_bound_holds, sandwich_holds

import oracles
from conftest import spaces


@pytest.fixture
def pair():
    return AugmentedSpace(sample_ids=[0, 1], measure=[1, 1], table=[[0, 1], [1, 0]])


def test_membership_examples(pair):
    prm = MSParams(a=0.25, n_max=3)
    assert ms_membership(pair, prm, 1.5, 0, 1)
    assert not ms_membership(pair, prm, 0.9, 0, 1)
    assert ms_membership(pair, prm, 1e-9, 0, 0)
    with pytest.raises(NonPositiveRadius):
        ms_membership(pair, prm, 0.0, 0, 1)


def test_two_point_delta(pair):
    res = ms_distance(pair, MSParams(a=0.25, n_max=3))
    assert res.delta.tolist() == [[0.0, 1.0], [1.0, 0.0]]


def test_params_out_of_range(pair):
    with pytest.raises(ParamOutOfRange):
        ms_distance(pair, MSParams(a=0.5, n_max=3))
    with pytest.raises(ParamOutOfRange):
        ms_distance(pair, MSParams(a=0.25, n_max=0))


def test_beta_for_metric_spaces():
    # a = 1/4, K = 1: a^3 < 2 <= a^2 fails, the exponent is p with a^p < 2 <= a^(p-1)
    p = hole_shrink_exponent(0.25, 1.0)
    assert 0.25**p < 2.0 <= 0.25 ** (p - 1)
    assert p == 0
    assert hole_shrink_beta(0.25, 1.0) == pytest.approx(0.25**3 / 3.0, rel=1e-15)


def test_default_depth_cap():
    sp = AugmentedSpace(sample_ids=[0, 1, 2], measure=[1, 1, 1], coords=[0.0, 1.0, 100.0], metric="euclidean")
    prm = default_params(sp)
    assert prm.a == 0.25
    assert prm.n_max == math.ceil(math.log(1.0 / 200.0) / math.log(0.25))


def test_depth_cap_too_small_is_detected():
    # a long chain of short links makes deeper layers matter
    x = np.append(np.arange(20.0), 100.0)
    sp = AugmentedSpace(sample_ids=np.arange(21), measure=np.ones(21), coords=x, metric="euclidean")
    with pytest.raises(DepthCapTooSmall):
        ms_distance(sp, MSParams(a=0.45, n_max=1))
    ms_distance(sp, MSParams(a=0.45, n_max=2))


@settings(max_examples=25)
@given(spaces(max_n=5, max_obs=2))
def test_delta_matches_candidate_search(sp):
    prm = default_params(sp)
    res = ms_distance(sp, prm)
    ref = oracles.ms_distance(oracles.table_of(sp), prm.a, prm.n_max)
    assert np.array_equal(res.delta, ref)


@given(spaces(max_n=10, max_obs=3))
def test_sandwich_and_k_bound(sp):
    res = ms_distance(sp)
    assert sandwich_holds(sp, res)
    assert k_bound_holds(res)
    assert np.all(np.diagonal(res.delta) == 0)
    off = ~np.eye(res.delta.shape[0], dtype=bool)
    assert np.all(res.delta[off] > 0)


@given(spaces(max_n=5, max_obs=1), st.floats(0.05, 30))
def test_membership_monotone_and_consistent(sp, r):
    prm = default_params(sp)
    res = ms_distance(sp, prm)
    ids = sp.ids
    N = len(ids)
    for i in range(N):
        for j in range(N):
            linked = ms_membership(sp, prm, r, ids[i], ids[j])
            if linked:
                assert ms_membership(sp, prm, r * 1.5, ids[i], ids[j])
            # (x, y) is linked at r exactly when delta(x, y) < r
            assert linked == (res.delta[i, j] < r)


def test_metric_sandwich_on_line():
    x = np.array([0.0, 0.5, 2.0, 2.25, 7.0])
    sp = AugmentedSpace(sample_ids=np.arange(5), measure=np.ones(5), coords=x, metric="euclidean")
    res = ms_distance(sp)
    D = sp.dist
    assert np.all(D / 3 <= res.delta) and np.all(res.delta <= D)
    assert validate_quasi_metric(res.delta) <= 3.0 + 1e-9
