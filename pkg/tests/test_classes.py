import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fatconv.classes import (
    Distribution, FunctionClass, SampleVector, exact_mean, make_full_binary_class,
    make_threshold_class, random_class, restrict,
)
from fatconv.errors import InvalidArgument, InvalidSample, SizeLimitError


def as_set(r):
    return r.as_set()


def test_restrict_two_rows():
    cls = FunctionClass([[0, 1], [1, 0]], 0, 1)
    r = restrict(cls, SampleVector.of([0, 0, 1, 1]))
    assert as_set(r) == {(0, 0, 1, 1), (1, 1, 0, 0)}
    assert r.provenance == (0, 1)


def test_restrict_collapses_equal_restrictions():
    cls = FunctionClass([[0, 1], [1, 1]], 0, 1)
    r = restrict(cls, SampleVector.of([1, 1, 1, 1]))
    assert as_set(r) == {(1, 1, 1, 1)}
    assert len(r) == 1


def test_restrict_threshold_class():
    cls = make_threshold_class([0.25, 0.75], [0, 0.5, 1])
    r = restrict(cls, SampleVector.of([0, 1, 0, 1]))
    # rows (1,1), (0,1), (0,0) give three distinct vectors
    assert as_set(r) == {(1, 1, 1, 1), (0, 1, 0, 1), (0, 0, 0, 0)}


def test_restrict_rejects_bad_index():
    cls = FunctionClass([[0, 1]], 0, 1)
    with pytest.raises(InvalidSample):
        restrict(cls, SampleVector.of([0, 2]))
    with pytest.raises(InvalidSample):
        SampleVector((0, 1, 0), 2)


def test_threshold_generator():
    assert make_threshold_class([0.25, 0.75], [0, 0.5, 1]).values.tolist() == [[1, 1], [0, 1], [0, 0]]
    assert make_threshold_class([0.5], [0, 1]).values.tolist() == [[1], [0]]
    assert make_threshold_class([0, 1], [0.5, 0.6]).values.tolist() == [[0, 1]]
    with pytest.raises(InvalidArgument):
        make_threshold_class([], [0.5])
    with pytest.raises(InvalidArgument):
        make_threshold_class([0.5], [])


def test_full_binary_generator():
    assert sorted(make_full_binary_class(1).values.tolist()) == [[0], [1]]
    assert make_full_binary_class(2).n_functions == 4
    assert make_full_binary_class(3).n_functions == 8
    with pytest.raises(SizeLimitError):
        make_full_binary_class(17)


def test_class_invariants():
    with pytest.raises(InvalidArgument):
        FunctionClass([[0, 1]], 1, 1)
    with pytest.raises(InvalidArgument):
        FunctionClass([[0, 2]], 0, 1)
    with pytest.raises(InvalidArgument):
        FunctionClass([[0, 1], [0, 1]], 0, 1)
    with pytest.raises(InvalidArgument):
        FunctionClass(np.zeros((0, 3)), 0, 1)


def test_class_json_roundtrip():
    cls = FunctionClass([[0, 0.5], [1, 0.25]], 0, 1, domain_labels=[3.0, 4.0])
    back = FunctionClass.from_json(cls.to_json())
    assert np.array_equal(back.values, cls.values)
    assert (back.range_lo, back.range_hi) == (0.0, 1.0)
    assert back.domain_labels.tolist() == [3.0, 4.0]
    assert json.loads(cls.to_json())["range"] == [0.0, 1.0]


def test_distribution_invariants():
    with pytest.raises(InvalidArgument):
        Distribution([0.5, 0.6])
    with pytest.raises(InvalidArgument):
        Distribution([1.5, -0.5])
    Distribution([0.5, 0.5 + 1e-13])


def test_exact_mean():
    cls = FunctionClass([[0, 1, 1], [0.3, 0.3, 0.3]], 0, 1)
    assert exact_mean(FunctionClass([[0, 1]], 0, 1), 0, Distribution.uniform(2)) == 0.5
    assert exact_mean(cls, 1, Distribution([0.1, 0.2, 0.7])) == pytest.approx(0.3, abs=1e-15)
    assert exact_mean(cls, 0, Distribution([0.2, 0.3, 0.5])) == pytest.approx(0.8, abs=1e-15)
    with pytest.raises(InvalidArgument):
        exact_mean(cls, 0, Distribution.uniform(2))


@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.integers(1, 6))
def test_restrict_permutation_equivariant(seed, m, n_points):
    rng = np.random.default_rng(seed)
    cls = random_class(rng, n_points, 6, levels=5)
    x = rng.integers(0, n_points, size=2 * m)
    perm = rng.permutation(2 * m)
    a = restrict(cls, SampleVector.of(x.tolist()))
    b = restrict(cls, SampleVector.of(x[perm].tolist()))
    assert {tuple(np.asarray(v)[perm]) for v in a.vectors} == b.as_set()


@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_restrict_coarsening_bound(seed, n_points):
    rng = np.random.default_rng(seed)
    cls = random_class(rng, n_points, 8, levels=5)
    col = int(rng.integers(n_points))
    r = restrict(cls, SampleVector.of([col] * 4))
    assert len(r) == np.unique(cls.values[:, col]).size <= cls.n_functions


@given(st.integers(0, 2**32 - 1), st.floats(-2, 2), st.floats(-1, 1))
def test_exact_mean_affine(seed, alpha, beta):
    rng = np.random.default_rng(seed)
    cls = random_class(rng, 5, 4, levels=9)
    w = rng.random(5)
    dist = Distribution(w / w.sum())
    scaled = FunctionClass(cls.values[:1] * alpha + beta, -3, 3)
    assert exact_mean(scaled, 0, dist) == pytest.approx(
        alpha * exact_mean(cls, 0, dist) + beta, abs=1e-12
    )
