import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finslerhom import minkowski as mk
from finslerhom import zoo
from finslerhom.algebra import abelian, killing_form
from finslerhom.errors import DegenerateDirectionError
from finslerhom.homspace import fundamental_tensor_at
from finslerhom.search import (
    SearchConfig, alpha_operator, alpha_selection_probe, angular_distance, antipodal_symmetry_check,
    certify, find_zeros, fixed_branch_candidate, lemma1_residual, lemma2_residual, sphere_field,
    spiral_points, t_field, tangential, v_field,
)

unit3 = st.lists(st.floats(-1, 1, allow_nan=False), min_size=3, max_size=3).filter(
    lambda v: np.linalg.norm(v) > 0.1).map(lambda v: np.array(v) / np.linalg.norm(v))


def heisenberg_oracle_distance(X):
    """Angular distance to {x3 = 0} or {+-e3}, the geodesic vectors from x2x3 = x1x3 = 0."""
    to_plane = abs(np.arcsin(np.clip(abs(X[2]), 0, 1)))
    to_axis = np.arccos(np.clip(abs(X[2]), 0, 1))
    return min(to_plane, to_axis)


def test_v_field_examples(spaces, rng):
    assert np.allclose(v_field(spaces["flat-quartic"], rng.normal(size=3)), 0)
    for _ in range(5):
        X = rng.normal(size=3)
        assert np.linalg.norm(v_field(spaces["su2"], X / np.linalg.norm(X))) <= 1e-8
    X = np.array([1.0, 0.0, 1.0]) / np.sqrt(2)
    assert np.linalg.norm(v_field(spaces["heisenberg"], X)) > 1e-2


def test_v_field_methods_agree(spaces, rng):
    for name, sp in spaces.items():
        X = rng.normal(size=sp.dim)
        X /= np.linalg.norm(X)
        assert np.allclose(v_field(sp, X, "spray"), v_field(sp, X, "connection"), atol=1e-12), name


@settings(max_examples=25, deadline=None)
@given(unit3, st.sampled_from(["heisenberg", "heisenberg-randers", "su2-randers", "flat-randers"]))
def test_sphere_field_invariants(X, name):
    sp = zoo.builtin(name)
    v = v_field(sp, X)
    t = t_field(sp, X)
    # tangency
    assert abs(t @ X) <= 1e-12
    # g-orthogonality: v lies in the g_X-orthogonal complement of X
    B = sp.basis_at_origin()
    g = fundamental_tensor_at(sp.chart, sp.origin, B @ X)
    assert abs((B @ v) @ g @ (B @ X)) <= 1e-8
    # v = 0 iff t = 0: |t| <= |v| <= 2 |t|
    assert np.linalg.norm(t) <= np.linalg.norm(v) + 1e-15
    assert np.linalg.norm(v) <= 2 * np.linalg.norm(t) + 1e-15


def test_t_field_heisenberg_sweep(spaces):
    sp = spaces["heisenberg"]
    for X in spiral_points(3, 300):
        tn = np.linalg.norm(t_field(sp, X))
        on_set = abs(X[2]) <= 1e-12 or abs(X[0]) + abs(X[1]) <= 1e-12
        assert (tn <= 1e-8) == on_set
        if not on_set:
            assert tn > 1e-8


def test_radial_field_has_no_tangential_part():
    X = np.array([0.6, 0.0, 0.8])
    assert np.allclose(tangential(X, X), 0)


def test_lemma2_examples(spaces, rng):
    flat = spaces["flat"]
    assert lemma2_residual(flat, rng.normal(size=3)) == 0.0
    heis = spaces["heisenberg"]
    assert lemma2_residual(heis, [0, 0, 1.0]) == 0.0
    assert lemma2_residual(heis, [1.0, 0, 1.0]) == pytest.approx(1.0)
    with pytest.raises(DegenerateDirectionError):
        lemma2_residual(heis, [0, 0, 0])


def test_lemma2_equals_lemma1_for_riemannian(spaces, rng):
    for name in ("heisenberg", "su2", "hyperbolic"):
        sp = spaces[name]
        for _ in range(10):
            X = rng.normal(size=sp.dim)
            assert abs(lemma2_residual(sp, X) - lemma1_residual(sp, X, np.eye(sp.dim))) <= 1e-12


def test_antipodal_examples(spaces):
    for name in ("flat", "flat-quartic", "heisenberg", "su2", "hyperbolic"):
        assert antipodal_symmetry_check(spaces[name], 60).residual <= 1e-8
    assert antipodal_symmetry_check(spaces["heisenberg-randers"], 60).residual > 1e-3


def test_alpha_operator_examples(spaces, rng):
    for _ in range(3):
        X = rng.normal(size=3)
        op = alpha_operator(spaces["su2"], X)
        assert np.allclose(op.matrix, -2 * np.eye(3)) and op.applicable
    op = alpha_operator(spaces["heisenberg"], [1.0, 0, 0])
    assert np.array_equal(op.matrix, np.zeros((3, 3))) and not op.applicable
    op = alpha_operator(spaces["su2-randers"], rng.normal(size=3))
    assert op.self_adjoint_residual <= 1e-12


def test_alpha_probe_on_randers_su2(spaces):
    rep = alpha_selection_probe(spaces["su2-randers"], points_per_path=180, extra_paths=0)
    # the probe either exhibits selection jumps near crossings or records none
    assert rep.jumps_found == bool(rep.jumps)
    assert rep.min_gap >= 0
    d = rep.as_dict()
    assert d["paths"] == rep.paths


def test_fixed_branch_examples(spaces):
    c = fixed_branch_candidate(spaces["heisenberg"])
    assert c.status == "certified" and abs(c.X[2]) <= 1e-15
    c = fixed_branch_candidate(spaces["flat"])
    assert c.status == "certified"
    assert fixed_branch_candidate(spaces["su2"]) is None
    # Finsler correction: the returned vector is g_X-orthogonal to [g, g]_m
    c = fixed_branch_candidate(spaces["heisenberg-randers"])
    assert c.status == "certified" and c.lemma2_residual <= 1e-8


def test_certify_labels(spaces):
    assert certify(spaces["heisenberg"], [0, 0, 1.0]).status == "certified"
    bad = certify(spaces["heisenberg"], [1.0, 0, 1.0])
    assert bad.status == "rejected" and bad.t_residual > 1e-2 and bad.comparison.sup_distance > 1e-3
    alg_only = zoo.algebraic(abelian(2), mk.euclidean(2))
    assert certify(alg_only, [1.0, 2.0]).status == "uncorroborated"


def test_scaling_invariance(spaces):
    sp = spaces["heisenberg-randers"]
    X = fixed_branch_candidate(sp).X
    for lam in (0.1, 7.0):
        assert certify(sp, lam * X).status == "certified"


def test_find_zeros_hyperbolic_randers(spaces):
    rep = find_zeros(spaces["hyperbolic-randers"], SearchConfig(samples=200))
    xs = sorted(c.X[0] for c in rep.certified)
    # oracle: x1 = -0.3 (two points on the circle)
    assert len(rep.certified) == 2 and np.allclose(xs, [-0.3, -0.3], atol=1e-10)
    assert not rep.guaranteed and rep.status == "certified"


def test_find_zeros_heisenberg_matches_oracle(spaces):
    rep = find_zeros(spaces["heisenberg"], SearchConfig(samples=600))
    assert rep.status == "certified"
    assert all(heisenberg_oracle_distance(c.X) <= 1e-4 for c in rep.certified)
    assert any(angular_distance(c.X, [0, 0, 1.0]) <= 1e-4 for c in rep.certified)
    horiz = [c for c in rep.certified if abs(c.X[2]) <= 1e-8]
    assert len(horiz) >= 6
    assert any(comp.dimension == 1 and comp.closed for comp in rep.components)
    assert all(c.status == "certified" for c in rep.candidates)


def test_find_zeros_deterministic(spaces):
    cfg = SearchConfig(samples=150, seed=3)
    a = find_zeros(spaces["hyperbolic"], cfg).as_dict()
    b = find_zeros(spaces["hyperbolic"], cfg).as_dict()
    assert a == b and a["seed"] == 3


def test_spiral_points_are_unit_and_include_poles():
    P = spiral_points(3, 100)
    assert np.allclose(np.linalg.norm(P, axis=1), 1)
    assert np.allclose(P[0], [0, 0, -1]) or np.allclose(P[-1], [0, 0, 1])
    assert spiral_points(2, 8).shape == (8, 2)
    Q = spiral_points(4, 30, seed=1)
    assert np.allclose(np.linalg.norm(Q, axis=1), 1)


def test_sphere_field_tangency(spaces):
    sf = sphere_field(spaces["su2-randers"], 100)
    assert sf.tangency_residual() <= 1e-12
    assert np.all(sf.t_norm <= sf.v_norm + 1e-15)


def test_killing_form_on_zoo(spaces):
    assert np.array_equal(killing_form(spaces["heisenberg"].algebra), np.zeros((3, 3)))
