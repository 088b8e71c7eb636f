import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from se2rigidity.framework import (
    DegenerateEdgeError,
    GraphMismatchError,
    Se2Framework,
    angle_diff,
    apply_trivial_motion,
    bearing,
    bearing_rigidity_function,
    bearing_vector,
    bearing_vectors,
    is_bearing_congruent,
    is_bearing_equivalent,
    rotation_matrix,
    wrap,
)
from se2rigidity.graph import complete_graph, new_graph
from se2rigidity.testing import random_framework

SQ2 = np.sqrt(2) / 2


def one_edge(p_u, psi_v=0.0):
    return Se2Framework(new_graph(2, [(0, 1)]), [[0.0, 0.0], p_u], [psi_v, 0.0])


def test_rotation_matrix():
    np.testing.assert_allclose(rotation_matrix(0.0), np.eye(2))
    np.testing.assert_allclose(rotation_matrix(np.pi / 2), [[0, -1], [1, 0]], atol=1e-15)


@settings(max_examples=50)
@given(st.floats(-10, 10), st.floats(-10, 10))
def test_rotation_group(a, b):
    Ta, Tb = rotation_matrix(a), rotation_matrix(b)
    np.testing.assert_allclose(Ta @ Tb, rotation_matrix(a + b), atol=1e-12)
    np.testing.assert_allclose(Ta.T @ Ta, np.eye(2), atol=1e-14)
    assert np.linalg.det(Ta) == pytest.approx(1.0)


@pytest.mark.parametrize(
    "p_u, psi, r, beta",
    [
        ((1.0, 0.0), 0.0, (1.0, 0.0), 0.0),
        ((1.0, 0.0), np.pi / 2, (0.0, -1.0), -np.pi / 2),
        ((1.0, 1.0), 0.0, (SQ2, SQ2), np.pi / 4),
    ],
)
def test_bearing_examples(p_u, psi, r, beta):
    f = one_edge(p_u, psi)
    np.testing.assert_allclose(bearing_vector(f, 0), r, atol=1e-15)
    assert bearing(f, 0) == pytest.approx(beta, abs=1e-15)


def test_bearing_function_k2():
    f = Se2Framework(complete_graph(2), [[0, 0], [1, 0]], [0, 0])
    np.testing.assert_allclose(bearing_rigidity_function(f), [0.0, np.pi])


def test_degenerate_edge_reports_index():
    with pytest.raises(DegenerateEdgeError) as info:
        Se2Framework(new_graph(3, [(0, 1), (1, 2)]), [[0, 0], [1, 0], [1, 0]], [0, 0, 0])
    assert info.value.edge_index == 1
    assert info.value.edge == (1, 2)


def test_unmeasured_pairs_may_coincide():
    f = Se2Framework(new_graph(3, [(0, 1)]), [[0, 0], [1, 0], [1, 0]], [0, 0, 0])
    assert f.n == 3


@settings(max_examples=50)
@given(st.floats(-50, 50), st.integers(-2, 2))
def test_wrap(beta, k):
    w = wrap(beta)
    assert -np.pi < w <= np.pi
    assert abs(angle_diff(wrap(w + 2 * np.pi * k), w)) < 1e-9


def test_wrap_boundary():
    assert wrap(np.pi) == np.pi
    assert wrap(-np.pi) == np.pi


def test_bearing_matches_vector(rng):
    for _ in range(50):
        f = random_framework(rng, int(rng.integers(2, 8)))
        r = bearing_vectors(f)
        np.testing.assert_allclose(np.linalg.norm(r, axis=1), 1.0, atol=1e-15)
        b = bearing_rigidity_function(f)
        assert np.max(np.abs(angle_diff(b, np.arctan2(r[:, 1], r[:, 0])))) <= 1e-14
        # world angle minus attitude of the measuring agent
        d = f.edge_vectors()
        alt = np.arctan2(d[:, 1], d[:, 0]) - f.attitudes[f.graph.heads]
        assert np.max(np.abs(angle_diff(b, alt))) <= 1e-12


def test_attitude_2pi_invariance(rng):
    f = random_framework(rng, 5)
    g = f.with_attitudes(f.attitudes + 2 * np.pi * np.array([1, -1, 2, 0, 3]))
    assert np.max(np.abs(angle_diff(bearing_rigidity_function(f), bearing_rigidity_function(g)))) < 1e-12


def test_equivalence_self(fig2_triangle):
    assert is_bearing_equivalent(fig2_triangle, fig2_triangle, 1e-12)
    assert is_bearing_congruent(fig2_triangle, fig2_triangle, 1e-12)


def test_fig2_equivalent_not_congruent(fig2_triangle):
    f = fig2_triangle
    psi = f.attitudes.copy()
    psi[2] += 1.1
    f2 = f.with_attitudes(psi)
    assert is_bearing_equivalent(f, f2, 1e-12)
    assert not is_bearing_congruent(f, f2, 1e-6)


def test_translation_dilation_equivalent(rng):
    f = random_framework(rng, 5)
    g = Se2Framework(f.graph, 3.7 * f.positions + [2.0, -5.0], f.attitudes)
    assert is_bearing_equivalent(f, g, 1e-12)
    assert is_bearing_congruent(f, g, 1e-12)


def test_trivial_motion_congruent(rng):
    f = random_framework(rng, 6)
    g = apply_trivial_motion(f, [0.3, -1.2], 0.4, 2.5, f.positions.mean(axis=0))
    assert is_bearing_congruent(f, g, 1e-10)


def test_equivalence_graph_mismatch(rng):
    f = random_framework(rng, 4)
    with pytest.raises(GraphMismatchError):
        is_bearing_equivalent(f, f.with_graph(complete_graph(4)))


def test_congruence_needs_distinct_vertices():
    f = Se2Framework(new_graph(3, [(0, 1)]), [[0, 0], [1, 0], [1, 0]], [0, 0, 0])
    with pytest.raises(DegenerateEdgeError):
        is_bearing_congruent(f, f)


def test_trivial_motion_identity(rng):
    f = random_framework(rng, 4)
    g = apply_trivial_motion(f)
    np.testing.assert_allclose(g.positions, f.positions)
    np.testing.assert_allclose(g.attitudes, f.attitudes)


@pytest.mark.parametrize(
    "kwargs",
    [dict(scale=2.0), dict(rotation=np.pi / 3, pivot="centroid")],
)
def test_trivial_motion_preserves_bearings(rng, kwargs):
    f = random_framework(rng, 6)
    if kwargs.get("pivot") == "centroid":
        kwargs = dict(kwargs, pivot=f.positions.mean(axis=0))
    g = apply_trivial_motion(f, **kwargs)
    diff = angle_diff(bearing_rigidity_function(f), bearing_rigidity_function(g))
    assert np.max(np.abs(diff)) <= 1e-12


def test_trivial_motion_rejects_bad_scale(rng):
    f = random_framework(rng, 3)
    for s in (0.0, -1.0):
        with pytest.raises(ValueError):
            apply_trivial_motion(f, scale=s)


@settings(max_examples=100, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    tx=st.floats(-5, 5),
    ty=st.floats(-5, 5),
    scale=st.floats(0.05, 20),
    rot=st.floats(-np.pi, np.pi),
)
def test_bearing_invariance_property(seed, tx, ty, scale, rot):
    rng = np.random.default_rng(seed)
    f = random_framework(rng, int(rng.integers(2, 9)))
    g = apply_trivial_motion(f, (tx, ty), scale, rot, rng.uniform(-1, 1, 2))
    diff = angle_diff(bearing_rigidity_function(f), bearing_rigidity_function(g))
    assert np.max(np.abs(diff)) <= 1e-10
    assert is_bearing_congruent(f, g, 1e-9)
    # congruence implies equivalence
    assert is_bearing_equivalent(f, g, 1e-9)
