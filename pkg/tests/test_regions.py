"""Polytope support machinery, Fourier-Motzkin elimination, exports.

The elimination oracle is worked by hand below; support values are
cross-checked against scipy's LP solver on random instances.
"""

import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from confbc.regions import (
    CANONICAL_DIRS_2D,
    CANONICAL_DIRS_3D,
    ConstraintPolytope,
    LinearConstraint,
    LinearSystem,
    RegionEnvelope,
    batch_support,
    default_dirs_2d,
    default_dirs_3d,
    enumerate_vertices,
    envelope_boundary_2d,
    envelope_dominates,
    envelope_of_union,
    fan_2d,
    fm_eliminate,
    octant_fibonacci,
    project_r2_zero,
    support_of_system,
    write_boundary_csv,
    write_support_csv,
)

VARS3 = ("R0", "R1", "R2")


def _box(r0=1.0, r1=2.0, r2=3.0, extra=()):
    rows = [LinearConstraint({"R0": 1}, r0),
            LinearConstraint({"R1": 1}, r1),
            LinearConstraint({"R2": 1}, r2)]
    rows.extend(extra)
    return ConstraintPolytope(VARS3, rows)


# ---------------------------------------------------------------------------
# constraints and polytopes
# ---------------------------------------------------------------------------

def test_linear_constraint_validation():
    c = LinearConstraint({"R0": 1, "R1": 0, "R2": 2}, 1.5)
    assert c.coeffs == {"R0": 1, "R2": 2}        # zero coefficient dropped
    with pytest.raises(ValueError):
        LinearConstraint({"R0": -1}, 1.0)        # upper bounds only
    with pytest.raises(ValueError):
        LinearConstraint({"R0": 0}, 1.0)         # nothing left
    LinearConstraint({"R0": 1}, math.inf)        # inf rhs = absent row, fine


def test_box_supports():
    p = _box()
    assert p.support((1, 0, 0)) == pytest.approx(1.0)
    assert p.support((1, 1, 1)) == pytest.approx(6.0)
    assert p.support((2, 1, 1)) == pytest.approx(7.0)
    assert p.contains((1.0, 2.0, 3.0))
    assert not p.contains((1.0 + 1e-6, 2.0, 3.0))


def test_sum_row_cuts_corner():
    p = _box(extra=[LinearConstraint({"R0": 1, "R1": 1, "R2": 1}, 4.0)])
    assert p.support((1, 1, 1)) == pytest.approx(4.0)
    assert p.support((1, 0, 0)) == pytest.approx(1.0)


def test_negative_rhs_means_empty():
    p = _box(extra=[LinearConstraint({"R0": 1}, -0.5)])
    assert p.is_empty
    assert p.support((1, 1, 1)) == -math.inf


def test_inf_rhs_means_unbounded():
    rows = [LinearConstraint({"R0": 1}, math.inf),
            LinearConstraint({"R1": 1}, 1.0),
            LinearConstraint({"R2": 1}, 1.0)]
    p = ConstraintPolytope(VARS3, rows)
    assert p.support((1, 0, 0)) == math.inf
    assert p.support((0, 1, 1)) == pytest.approx(2.0)


def test_enumerate_vertices_unit_square():
    a = np.array([[1.0, 0.0], [0.0, 1.0]])
    b = np.array([1.0, 1.0])
    verts = enumerate_vertices(a, b, nonneg=True)
    want = {(0, 0), (0, 1), (1, 0), (1, 1)}
    got = {tuple(np.round(v, 12)) for v in verts}
    assert got == want


def test_enumerate_vertices_general_sign():
    # triangle: x + y <= 1, x >= -1, y >= -1  (lower bounds as negative rows)
    a = np.array([[1.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    b = np.array([1.0, 1.0, 1.0])
    verts = enumerate_vertices(a, b, nonneg=False)
    got = {tuple(np.round(v, 12)) for v in verts}
    assert got == {(-1.0, -1.0), (-1.0, 2.0), (2.0, -1.0)}


# ---------------------------------------------------------------------------
# batch support vs an LP oracle
# ---------------------------------------------------------------------------

def _lp_support(a, b, d):
    res = linprog(-np.asarray(d, dtype=float), A_ub=a, b_ub=b,
                  bounds=[(0, None)] * a.shape[1], method="highs")
    assert res.status == 0, res.message
    return -res.fun


def test_batch_support_matches_linprog():
    rng = np.random.default_rng(42)
    for _ in range(25):
        n_rows = rng.integers(3, 7)
        a = rng.uniform(0.0, 1.0, size=(n_rows, 3))
        a[rng.integers(0, n_rows)] = [1.0, 1.0, 1.0]   # keep it bounded
        b = rng.uniform(0.5, 3.0, size=n_rows)
        dirs = rng.uniform(0.0, 1.0, size=(6, 3))
        dirs[0] = (1.0, 1.0, 1.0)
        sups = batch_support(a, b[None, :], dirs)[0]
        for d, s in zip(dirs, sups):
            assert s == pytest.approx(_lp_support(a, b, d), abs=1e-6)


def test_batch_support_sampled_points_stay_inside():
    rng = np.random.default_rng(9)
    a = rng.uniform(0.1, 1.0, size=(5, 3))
    b = rng.uniform(1.0, 2.0, size=5)
    dirs = octant_fibonacci(64)
    sups = batch_support(a, b[None, :], dirs)[0]
    # rejection-sample feasible points, then test d @ x <= support
    pts = rng.uniform(0.0, 5.0, size=(20000, 3))
    feas = pts[np.all(pts @ a.T <= b[None, :] + 1e-12, axis=1)]
    assert feas.shape[0] > 100
    assert np.all(feas @ dirs.T <= sups[None, :] + 1e-9)


def test_batch_support_reduce_max():
    # two rhs rows = union of two boxes; reduce_max keeps the best
    a = np.eye(2)
    rhs = np.array([[1.0, 3.0], [2.0, 1.0]])
    dirs = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    sups = batch_support(a, rhs, dirs, reduce_max=True)
    assert sups.shape == (3,)
    assert np.allclose(sups, [2.0, 3.0, 4.0])
    per = batch_support(a, rhs, dirs, reduce_max=False)
    assert per.shape == (2, 3)
    assert np.allclose(per[0], [1.0, 3.0, 4.0])


def test_batch_support_unbounded_direction():
    # only R0 is capped; (0,1) escapes to +inf, and empty rhs -> -inf
    a = np.array([[1.0, 0.0]])
    sups = batch_support(a, np.array([[1.0]]), np.array([[0.0, 1.0], [1.0, 0.0]]))[0]
    assert sups[0] == math.inf and sups[1] == pytest.approx(1.0)
    empty = batch_support(a, np.array([[-1.0]]), np.array([[1.0, 0.0]]))[0]
    assert empty[0] == -math.inf


@given(r=st.tuples(st.floats(0.1, 5), st.floats(0.1, 5), st.floats(0.1, 5)),
       d=st.tuples(st.floats(0, 2), st.floats(0, 2), st.floats(0, 2)))
@settings(max_examples=80, deadline=None)
def test_box_support_is_corner_dot_property(r, d):
    p = _box(*r)
    want = float(np.dot(d, r))
    assert p.support(d) == pytest.approx(want, rel=1e-12, abs=1e-12)


# ---------------------------------------------------------------------------
# Fourier-Motzkin
# ---------------------------------------------------------------------------

def _fm_toy(c, d, e):
    """max R s.t. exists B1, B2 >= 0 with B1+B2 >= c, R+B1 <= d, R+B2 <= e.

    Eliminating B1 then B2 by hand gives {R <= d, R <= e, 2R <= d+e-c},
    so the max is min(d, e, (d+e-c)/2).
    """
    sys = LinearSystem.from_rows(
        ("R", "B1", "B2"),
        [({"B1": -1, "B2": -1}, -c),
         ({"R": 1, "B1": 1}, d),
         ({"R": 1, "B2": 1}, e),
         ({"B1": -1}, 0.0),
         ({"B2": -1}, 0.0)])
    return fm_eliminate(sys, ("B1", "B2"))


def test_fm_toy_oracle():
    out = _fm_toy(1.0, 2.0, 2.5)
    assert out.variables == ("R",)
    assert support_of_system(out, (1.0,)) == pytest.approx(1.75, abs=1e-12)
    out2 = _fm_toy(1.0, 0.5, 2.5)
    assert support_of_system(out2, (1.0,)) == pytest.approx(0.5, abs=1e-12)
    out3 = _fm_toy(4.0, 2.0, 2.5)      # link demand dominates: (d+e-c)/2
    assert support_of_system(out3, (1.0,)) == pytest.approx(0.25, abs=1e-12)


def test_fm_keeps_unrelated_rows():
    sys = LinearSystem.from_rows(
        ("R", "S", "B"),
        [({"R": 1, "B": 1}, 2.0),
         ({"B": -1}, 0.0),
         ({"S": 1}, 1.0)])
    out = fm_eliminate(sys, ("B",))
    assert out.variables == ("R", "S")
    assert support_of_system(out, (1.0, 0.0)) == pytest.approx(2.0)
    assert support_of_system(out, (0.0, 1.0)) == pytest.approx(1.0)


def test_fm_unknown_variable():
    sys = LinearSystem.from_rows(("R",), [({"R": 1}, 1.0)])
    with pytest.raises(ValueError):
        fm_eliminate(sys, ("Q",))


def test_fm_dedup_keeps_tightest():
    sys = LinearSystem.from_rows(
        ("R", "B"),
        [({"R": 1}, 3.0), ({"R": 2}, 4.0), ({"B": 1}, 1.0), ({"B": -1}, 0.0)])
    out = fm_eliminate(sys, ("B",), prune=False)
    # R <= 3 and R <= 2 are proportional rows; only the tighter survives
    assert support_of_system(out, (1.0,)) == pytest.approx(2.0)
    assert out.matrix.shape[0] == 1


def test_system_json_round_trip():
    sys = LinearSystem.from_rows(
        ("R0", "R1"),
        [({"R0": 1.0, "R1": 2.0}, 1.5), ({"R1": 1.0}, math.inf)])
    doc = sys.to_json_dict()
    assert doc["rows"][1]["rhs"] == "inf"
    back = LinearSystem.from_json_dict(doc)
    assert back.variables == sys.variables
    assert np.allclose(back.matrix, sys.matrix)
    assert back.rhs[1] == math.inf and back.rhs[0] == 1.5


def test_support_of_system_unbounded():
    # R - B <= 0 with B free: max R unbounded
    sys = LinearSystem.from_rows(("R", "B"), [({"R": 1, "B": -1}, 0.0)])
    assert support_of_system(sys, (1.0, 0.0)) == math.inf


# ---------------------------------------------------------------------------
# envelopes and projections
# ---------------------------------------------------------------------------

def test_envelope_of_union_is_pointwise_max():
    p1 = _box(1.0, 3.0, 0.5)
    p2 = _box(2.0, 1.0, 0.5)
    dirs = CANONICAL_DIRS_3D
    env = envelope_of_union([p1, p2], dirs)
    for d, s in zip(env.directions, env.supports):
        assert s == pytest.approx(max(p1.support(d), p2.support(d)), abs=1e-12)


def test_envelope_dominates_and_slack():
    dirs = CANONICAL_DIRS_3D
    cover = envelope_of_union([_box(2.0, 2.0, 2.0)], dirs)
    inner = envelope_of_union([_box(1.0, 1.0, 1.0)], dirs)
    ok, rep = envelope_dominates(cover, inner)
    assert ok and rep["max_violation_bits"] <= 0.0
    flipped, rep2 = envelope_dominates(inner, cover)
    assert not flipped
    assert rep2["max_violation_bits"] == pytest.approx(4.0)  # at (2,1,1)
    ok3, _ = envelope_dominates(inner, cover, slack=4.0)
    assert ok3


def test_envelope_dominates_needs_matching_dirs():
    cover = envelope_of_union([_box()], CANONICAL_DIRS_3D)
    inner = envelope_of_union([_box()], CANONICAL_DIRS_3D[:4])
    with pytest.raises(ValueError):
        envelope_dominates(cover, inner)


def test_support_at_exact_lookup():
    env = envelope_of_union([_box()], CANONICAL_DIRS_3D)
    assert env.support_at((1, 1, 1)) == pytest.approx(6.0)
    with pytest.raises(KeyError):
        env.support_at((3, 1, 4))


def test_project_r2_zero():
    p = _box(1.0, 2.0, 3.0,
             extra=[LinearConstraint({"R0": 1, "R2": 1}, 1.5)])
    q = project_r2_zero(p)
    assert q.variables == ("R0", "R1")
    assert q.support((1, 0)) == pytest.approx(1.0)   # R0+R2 row becomes R0 <= 1.5
    assert q.support((0, 1)) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        project_r2_zero(q)


# ---------------------------------------------------------------------------
# direction fans
# ---------------------------------------------------------------------------

def test_direction_fans_shapes():
    f = fan_2d(7)
    assert f.shape == (7, 2)
    assert np.allclose(np.linalg.norm(f, axis=1), 1.0)
    assert np.allclose(f[0], (1, 0), atol=1e-12)
    assert np.allclose(f[-1], (0, 1), atol=1e-12)
    o = octant_fibonacci(100)
    assert o.shape == (100, 3)
    assert np.all(o >= -1e-12)
    assert np.allclose(np.linalg.norm(o, axis=1), 1.0)
    assert default_dirs_3d(16).shape == (8 + 16, 3)
    assert default_dirs_2d(16).shape == (5 + 16, 2)
    assert np.allclose(default_dirs_2d()[: len(CANONICAL_DIRS_2D)], CANONICAL_DIRS_2D)


# ---------------------------------------------------------------------------
# exports
# ---------------------------------------------------------------------------

def test_write_support_csv_format(tmp_path):
    dirs = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    env = RegionEnvelope(("R0", "R1"), dirs,
                         np.array([1.0 / 3.0, math.inf, -math.inf]))
    path = tmp_path / "sup.csv"
    write_support_csv(env, path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["dir0", "dir1", "dir2", "support_bits"]
    assert rows[1] == ["1", "0", "0", "0.333333333"]   # %.9g, padded dir2
    assert rows[2][3] == "inf"
    assert rows[3][3] == "-inf"


def test_boundary_walk_square(tmp_path):
    dirs = fan_2d(91)
    sups = batch_support(np.eye(2), np.array([[1.0, 2.0]]), dirs)[0]
    env = RegionEnvelope(("R0", "R1"), dirs, sups)
    pts = envelope_boundary_2d(env)
    assert pts.shape[1] == 2
    assert pts[:, 0].max() == pytest.approx(1.0, abs=1e-9)
    assert pts[:, 1].max() == pytest.approx(2.0, abs=1e-9)
    # the upper-right corner must be one of the frontier vertices
    assert np.min(np.abs(pts - [1.0, 2.0]).sum(axis=1)) <= 1e-9
    # R0 strictly increasing along the walk
    assert np.all(np.diff(pts[:, 0]) >= -1e-12)
    path = tmp_path / "bd.csv"
    write_boundary_csv(pts, path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["R0", "R1"]
    assert len(rows) == pts.shape[0] + 1


def test_boundary_walk_needs_2d():
    env = envelope_of_union([_box()], CANONICAL_DIRS_3D)
    with pytest.raises(ValueError):
        envelope_boundary_2d(env)
