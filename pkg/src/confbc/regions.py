"""Geometry for rate regions in (R0, R1, R2) space.

All regions handled here are intersections of halfspaces
    sum_i c_i * R_i <= rhs        (c_i >= 0 for ConstraintPolytope rows)
together with R_i >= 0, so they are downward closed ("comprehensive"):
shrinking any coordinate keeps you inside.  Supports are computed by
vertex enumeration, which is exact for these tiny dimensions and avoids
an LP dependency; an LP only appears in the test suite as an
independent oracle.

rhs = +inf encodes "this constraint is absent" (used by the Gaussian
bounds when the combined-output term blows up).  rhs < 0 is legal and
makes the polytope empty; the support of an empty region is -inf and
envelopes simply skip such members.
"""

import csv
import math
from itertools import combinations

import numpy as np

INF = math.inf
_FEAS_TOL = 1e-9


class RateVector:
    """A point (r0, r1, r2); degraded-message-set regions use r2 = 0."""

    def __init__(self, r0, r1, r2=0.0):
        if min(r0, r1, r2) < -1e-12:
            raise ValueError("rates must be nonnegative")
        self.r0, self.r1, self.r2 = float(r0), float(r1), float(r2)

    def as_array(self, variables=("R0", "R1", "R2")):
        lookup = {"R0": self.r0, "R1": self.r1, "R2": self.r2}
        return np.array([lookup[v] for v in variables])

    def __repr__(self):
        return "RateVector(%g, %g, %g)" % (self.r0, self.r1, self.r2)


class LinearConstraint:
    """coeffs: variable name -> small nonnegative integer weight.
    rhs: float, +inf to disable the row; negative values are allowed
    and simply make the region empty."""

    def __init__(self, coeffs, rhs):
        clean = {}
        for name, c in coeffs.items():
            if int(c) != c or c < 0:
                raise ValueError("coefficients must be nonnegative integers")
            if c:
                clean[name] = int(c)
        if not clean:
            raise ValueError("constraint needs at least one nonzero coefficient")
        self.coeffs = clean
        self.rhs = float(rhs)

    def __repr__(self):
        lhs = " + ".join("%d*%s" % (c, n) if c != 1 else n
                         for n, c in sorted(self.coeffs.items()))
        return "%s <= %g" % (lhs, self.rhs)


class ConstraintPolytope:
    def __init__(self, variables, constraints):
        self.variables = tuple(variables)
        self.constraints = list(constraints)
        for con in self.constraints:
            unknown = set(con.coeffs) - set(self.variables)
            if unknown:
                raise ValueError("constraint mentions unknown variables %s" % sorted(unknown))
        self._verts = None

    def coeff_matrix(self):
        """(m, k) float matrix of the finite AND infinite rows, plus rhs."""
        m = len(self.constraints)
        k = len(self.variables)
        a = np.zeros((m, k))
        b = np.empty(m)
        col = {v: j for j, v in enumerate(self.variables)}
        for i, con in enumerate(self.constraints):
            for name, c in con.coeffs.items():
                a[i, col[name]] = c
            b[i] = con.rhs
        return a, b

    @property
    def is_empty(self):
        # with nonnegative row coefficients and x >= 0 the only way to
        # have no feasible point is a negative right-hand side
        _, b = self.coeff_matrix()
        return bool(np.any(b < -1e-12))

    def vertices(self):
        if self._verts is None:
            a, b = self.coeff_matrix()
            keep = np.isfinite(b)
            self._verts = enumerate_vertices(a[keep], b[keep], nonneg=True)
        return self._verts

    def support(self, direction):
        a, b = self.coeff_matrix()
        out = batch_support(a, b[None, :], np.atleast_2d(np.asarray(direction, float)))
        return float(out[0, 0])

    def contains(self, point, tol=_FEAS_TOL):
        pt = point.as_array(self.variables) if isinstance(point, RateVector) \
            else np.asarray(point, dtype=float)
        if np.any(pt < -tol):
            return False
        a, b = self.coeff_matrix()
        lhs = a @ pt
        return bool(np.all(lhs <= b + tol * (1.0 + np.abs(np.where(np.isfinite(b), b, 0.0)))))


class RegionEnvelope:
    """Pointwise-max of supports over a family of polytopes: the convex
    hull of their union, recorded as (direction, support) pairs."""

    def __init__(self, variables, directions, supports, meta=None):
        directions = np.atleast_2d(np.asarray(directions, dtype=float))
        supports = np.asarray(supports, dtype=float)
        if directions.shape[0] != supports.shape[0]:
            raise ValueError("one support per direction")
        self.variables = tuple(variables)
        self.directions = directions
        self.supports = supports
        self.meta = dict(meta or {})

    def support_at(self, direction, tol=1e-9):
        d = np.asarray(direction, dtype=float)
        hit = np.all(np.abs(self.directions - d) <= tol, axis=1)
        idx = np.nonzero(hit)[0]
        if idx.size == 0:
            raise KeyError("direction %s not in envelope" % (tuple(d),))
        return float(self.supports[idx[0]])


class LinearSystem:
    """General-sign inequality system  matrix @ x <= rhs  over named
    variables; what Fourier-Motzkin elimination consumes and emits.
    Lower bounds are rows with negative coefficients."""

    def __init__(self, variables, matrix, rhs):
        self.variables = tuple(variables)
        self.matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        self.rhs = np.asarray(rhs, dtype=float)
        if self.matrix.shape != (self.rhs.shape[0], len(self.variables)):
            raise ValueError("system shape mismatch")

    @classmethod
    def from_rows(cls, variables, rows):
        """rows: iterable of (coeff dict, rhs)."""
        variables = tuple(variables)
        col = {v: j for j, v in enumerate(variables)}
        mat = np.zeros((len(rows), len(variables)))
        rhs = np.empty(len(rows))
        for i, (coeffs, r) in enumerate(rows):
            for name, c in coeffs.items():
                mat[i, col[name]] = c
            rhs[i] = r
        return cls(variables, mat, rhs)

    def to_json_dict(self):
        rows = []
        for i in range(self.matrix.shape[0]):
            coeffs = {v: self.matrix[i, j] for j, v in enumerate(self.variables)
                      if self.matrix[i, j] != 0.0}
            rows.append({"coeffs": coeffs,
                         "rhs": "inf" if math.isinf(self.rhs[i]) else self.rhs[i]})
        return {"variables": list(self.variables), "rows": rows}

    @classmethod
    def from_json_dict(cls, doc):
        variables = tuple(doc["variables"])
        rows = []
        for row in doc["rows"]:
            rhs = row["rhs"]
            rhs = math.inf if rhs in ("inf", "Infinity") else float(rhs)
            rows.append((row["coeffs"], rhs))
        return cls.from_rows(variables, rows)


# ---------------------------------------------------------------------------
# vertex enumeration and supports
# ---------------------------------------------------------------------------

_BIG = 1e30


def enumerate_vertices(a, b, nonneg=True, tol=_FEAS_TOL):
    """Feasible basic solutions of a @ x <= b (plus x >= 0 when nonneg).

    Exact-ish for the 1-3 dimensional systems used here; returns an
    (n, k) array of distinct vertices (possibly empty).
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    k = a.shape[1]
    if nonneg:
        a = np.vstack([a, -np.eye(k)])
        b = np.concatenate([b, np.zeros(k)])
    b_solve = np.where(np.isfinite(b), b, _BIG)
    idx = np.array(list(combinations(range(a.shape[0]), k)))
    mats = a[idx]                                   # (T, k, k)
    dets = np.abs(np.linalg.det(mats))
    scale = np.maximum(np.prod(np.linalg.norm(mats, axis=2), axis=1), 1e-30)
    good = dets > 1e-9 * scale
    if not np.any(good):
        return np.empty((0, k))
    verts = np.linalg.solve(mats[good], b_solve[idx[good]][..., None])[..., 0]
    margin = tol * (1.0 + np.abs(b_solve))
    feas = np.all(verts @ a.T <= b_solve[None, :] + margin[None, :], axis=1)
    verts = verts[feas]
    if verts.shape[0] == 0:
        return verts
    # dedup at 1e-9 granularity but hand back full-precision points
    _, first = np.unique(np.round(verts, 9), axis=0, return_index=True)
    return verts[np.sort(first)]


def batch_support(coeffs, rhs, dirs, tol=_FEAS_TOL, reduce_max=False,
                  chunk=1024, dir_block=32):
    """Supports of many same-shaped polytopes at once.

    coeffs -- (m, k) shared nonnegative coefficient matrix
    rhs    -- (N, m) per-polytope right-hand sides (+inf = row absent,
              negative = that polytope is empty)
    dirs   -- (D, k) directions
    returns (N, D) supports, or the elementwise max over N when
    reduce_max is set (the envelope of the union).  Empty polytopes give
    -inf; directions someone can run off to infinity along give +inf.

    The trick that makes the sweeps cheap: the coefficient rows are
    shared, so each basis (k-subset of rows) is factorized once and
    reused for every right-hand side.
    """
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))
    rhs = np.atleast_2d(np.asarray(rhs, dtype=float))
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    n_poly, m = rhs.shape
    k = coeffs.shape[1]
    a = np.vstack([coeffs, -np.eye(k)])
    idx = np.array(list(combinations(range(m + k), k)))
    mats = a[idx]
    dets = np.abs(np.linalg.det(mats))
    scale = np.maximum(np.prod(np.linalg.norm(mats, axis=2), axis=1), 1e-30)
    good = idx[dets > 1e-9 * scale]
    inv = np.linalg.inv(a[good])                    # (T, k, k)

    out = np.empty((n_poly, dirs.shape[0]))
    coeff_pos = coeffs > 0                          # (m, k)
    dir_pos = dirs > 0                              # (D, k)
    for lo in range(0, n_poly, chunk):
        r = rhs[lo:lo + chunk]
        full = np.concatenate([r, np.zeros((r.shape[0], k))], axis=1)
        solve_rhs = np.where(np.isfinite(full), full, _BIG)
        verts = np.einsum("tij,ntj->nti", inv, solve_rhs[:, good], optimize=True)
        feas = np.ones(verts.shape[:2], dtype=bool)
        margin = tol * (1.0 + np.abs(solve_rhs))
        for row in range(m + k):
            lhs = verts @ a[row]
            feas &= lhs <= (solve_rhs[:, row] + margin[:, row])[:, None]
        sup = np.full((r.shape[0], dirs.shape[0]), -np.inf)
        for dlo in range(0, dirs.shape[0], dir_block):
            vals = np.einsum("ntk,dk->ntd", verts, dirs[dlo:dlo + dir_block],
                             optimize=True)
            vals[~feas] = -np.inf
            sup[:, dlo:dlo + dir_block] = vals.max(axis=1)
        # directions that escape to infinity: some positive component of
        # the direction touches a variable no finite row bounds
        covered = (np.isfinite(r).astype(np.int64) @ coeff_pos) > 0   # (n, k)
        unbounded = ((~covered).astype(np.int64) @ dir_pos.T.astype(np.int64)) > 0
        sup[unbounded] = np.inf
        empty = np.any(r < -1e-12, axis=1)
        sup[empty] = -np.inf
        out[lo:lo + chunk] = sup
    return out.max(axis=0) if reduce_max else out


def support_of_system(system, direction, tol=_FEAS_TOL):
    """Support of a general-sign LinearSystem (no implicit nonnegativity;
    put explicit -x <= 0 rows in if you want them)."""
    a, b, d = system.matrix, system.rhs, np.asarray(direction, dtype=float)
    zero_rows = np.all(np.abs(a) <= 1e-12, axis=1)
    if np.any(b[zero_rows] < -1e-9):
        return -INF          # carries an inconsistent 0 <= negative row
    a, b = a[~zero_rows], b[~zero_rows]
    keep = np.isfinite(b)
    a, b = a[keep], b[keep]
    if _system_unbounded_along(a, d, tol):
        return INF
    verts = enumerate_vertices(a, b, nonneg=False, tol=tol)
    if verts.shape[0] == 0:
        return -INF
    return float((verts @ d).max())


def _system_unbounded_along(a, d, tol):
    """Does the recession cone {r : a r <= 0} contain a ray with d.r > 0?
    Candidate extreme rays come from pairs of facets (cross products in
    3-d, edge normals in 2-d), plus the coordinate axes for safety."""
    k = a.shape[1]
    cands = [np.eye(k)[i] for i in range(k)] + [-np.eye(k)[i] for i in range(k)]
    if k == 3:
        for i, j in combinations(range(a.shape[0]), 2):
            c = np.cross(a[i], a[j])
            if np.linalg.norm(c) > 1e-12:
                cands.append(c)
                cands.append(-c)
    elif k == 2:
        for i in range(a.shape[0]):
            c = np.array([a[i, 1], -a[i, 0]])
            if np.linalg.norm(c) > 1e-12:
                cands.append(c)
                cands.append(-c)
    for c in cands:
        r = c / np.linalg.norm(c)
        if np.all(a @ r <= tol) and d @ r > 1e-9:
            return True
    return False


# ---------------------------------------------------------------------------
# envelopes
# ---------------------------------------------------------------------------

def envelope_of_union(polytopes, directions, meta=None):
    """Support of the union of polytopes in each direction (equivalently
    of its convex hull).  Empty members are skipped."""
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    polys = list(polytopes)
    if not polys:
        raise ValueError("need at least one polytope")
    variables = polys[0].variables
    sups = np.full(directions.shape[0], -np.inf)
    for p in polys:
        if p.variables != variables:
            raise ValueError("mixed variable sets in union")
        a, b = p.coeff_matrix()
        sups = np.maximum(sups, batch_support(a, b[None, :], directions)[0])
    return RegionEnvelope(variables, directions, sups, meta=meta)


def envelope_dominates(cover, inner, slack=0.0):
    """Is inner's support <= cover's support + slack in every direction?

    Both envelopes must be over the same direction list.  Returns
    (flag, report) where report carries the worst direction and the
    maximum violation in bits.
    """
    if cover.directions.shape != inner.directions.shape or \
            not np.allclose(cover.directions, inner.directions, atol=1e-12):
        raise ValueError("envelopes use different direction sets")
    with np.errstate(invalid="ignore"):
        gap = inner.supports - cover.supports
    gap = np.where(np.isnan(gap), -np.inf, gap)     # inf - inf: no violation
    worst = int(np.argmax(gap))
    report = {"max_violation_bits": float(gap[worst]),
              "worst_direction": tuple(cover.directions[worst]),
              "slack": float(slack)}
    return bool(gap[worst] <= slack), report


def project_r2_zero(poly):
    """Drop R2 from a downward-closed 3-d polytope.  Because the region
    is comprehensive, projecting onto the R2 = 0 plane is the same as
    slicing, so the rows keep their right-hand sides."""
    if "R2" not in poly.variables:
        raise ValueError("nothing to project: no R2 variable")
    keep_vars = tuple(v for v in poly.variables if v != "R2")
    rows = []
    for con in poly.constraints:
        coeffs = {n: c for n, c in con.coeffs.items() if n != "R2"}
        if coeffs:
            rows.append(LinearConstraint(coeffs, con.rhs))
    return ConstraintPolytope(keep_vars, rows)


# ---------------------------------------------------------------------------
# Fourier-Motzkin elimination
# ---------------------------------------------------------------------------

def fm_eliminate(system, names, prune=True):
    """Project a LinearSystem onto the variables not listed in names.

    Classic positive/negative pairing with three pruning passes: exact
    tautology removal, proportional-row dedup (keep the tightest rhs),
    and -- once the dimension is small -- a vertex-activity sweep that
    is exact for bounded systems.
    """
    mat = system.matrix.copy()
    rhs = system.rhs.copy()
    variables = list(system.variables)
    for name in names:
        if name not in variables:
            raise ValueError("cannot eliminate unknown variable %r" % name)
        j = variables.index(name)
        col = mat[:, j]
        pos = np.nonzero(col > 1e-12)[0]
        neg = np.nonzero(col < -1e-12)[0]
        zero = np.nonzero(np.abs(col) <= 1e-12)[0]
        new_rows = [mat[zero]]
        new_rhs = [rhs[zero]]
        for p in pos:
            # scale so the eliminated column cancels exactly
            combo = mat[neg] * col[p] + mat[p][None, :] * (-col[neg])[:, None]
            combo[:, j] = 0.0
            new_rows.append(combo)
            new_rhs.append(rhs[neg] * col[p] + rhs[p] * (-col[neg]))
        mat = np.concatenate(new_rows, axis=0) if new_rows else np.empty((0, mat.shape[1]))
        rhs = np.concatenate(new_rhs) if new_rhs else np.empty(0)
        mat = np.delete(mat, j, axis=1)
        variables.pop(j)
        mat, rhs = _dedup_rows(mat, rhs)
    out = LinearSystem(tuple(variables), mat, rhs)
    if prune and len(variables) <= 3:
        out = _vertex_prune(out)
    return out


def _dedup_rows(mat, rhs):
    """Drop tautologies, collapse proportional rows to the tightest one,
    and keep at most one witness of infeasibility."""
    keep_mat, keep_rhs = [], []
    seen = {}
    worst_zero = None
    for i in range(mat.shape[0]):
        row = mat[i]
        scale = np.max(np.abs(row))
        if scale <= 1e-12:
            if rhs[i] < -1e-12:
                worst_zero = min(worst_zero, rhs[i]) if worst_zero is not None else rhs[i]
            continue                     # 0 <= nonneg rhs: tautology
        key = tuple(np.round(row / scale, 9))
        val = rhs[i] / scale
        if key in seen:
            slot = seen[key]
            keep_rhs[slot] = min(keep_rhs[slot], val)
        else:
            seen[key] = len(keep_mat)
            keep_mat.append(row / scale)
            keep_rhs.append(val)
    if worst_zero is not None:
        keep_mat.append(np.zeros(mat.shape[1]))
        keep_rhs.append(worst_zero)
    if not keep_mat:
        return np.empty((0, mat.shape[1])), np.empty(0)
    return np.array(keep_mat), np.array(keep_rhs)


def _vertex_prune(system):
    """Remove rows never active at a vertex.  Exact when the feasible
    set is bounded and nonempty; returned unchanged otherwise."""
    a, b = system.matrix, system.rhs
    zero = np.all(np.abs(a) <= 1e-12, axis=1)
    if np.any(zero):
        return system
    finite = np.isfinite(b)
    if not np.all(finite):
        return system
    for axis in np.eye(a.shape[1]):
        if _system_unbounded_along(a, axis, _FEAS_TOL) or \
                _system_unbounded_along(a, -axis, _FEAS_TOL):
            return system
    verts = enumerate_vertices(a, b, nonneg=False)
    if verts.shape[0] == 0:
        return system
    act = np.abs(verts @ a.T - b[None, :]) <= 1e-7 * (1.0 + np.abs(b[None, :]))
    active = np.any(act, axis=0)
    if not np.any(active):
        return system
    return LinearSystem(system.variables, a[active], b[active])


# ---------------------------------------------------------------------------
# direction fans
# ---------------------------------------------------------------------------

CANONICAL_DIRS_3D = np.array([
    (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0),
    (1, 0, 1), (0, 1, 1), (1, 1, 1), (2, 1, 1)], dtype=float)

CANONICAL_DIRS_2D = np.array([(1, 0), (0, 1), (1, 1), (2, 1), (1, 2)], dtype=float)


def fan_2d(n=181):
    """n unit directions sweeping the first quadrant, 0 to 90 degrees."""
    theta = np.linspace(0.0, math.pi / 2.0, n)
    return np.column_stack([np.cos(theta), np.sin(theta)])


def octant_fibonacci(n=512):
    """Deterministic well-spread unit directions in the closed positive
    octant (golden-angle azimuth against an even polar ladder)."""
    i = np.arange(n)
    z = (i + 0.5) / n
    r = np.sqrt(1.0 - z * z)
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    az = (i * golden % 1.0) * (math.pi / 2.0)
    return np.column_stack([r * np.cos(az), r * np.sin(az), z])


def default_dirs_3d(n=512):
    return np.vstack([CANONICAL_DIRS_3D, octant_fibonacci(n)])


def default_dirs_2d(n=181):
    return np.vstack([CANONICAL_DIRS_2D, fan_2d(n)])


# ---------------------------------------------------------------------------
# exports
# ---------------------------------------------------------------------------

def write_support_csv(env, path):
    """dir0,dir1,dir2,support_bits rows; 2-d envelopes pad dir2 = 0."""
    dirs = env.directions
    if dirs.shape[1] == 2:
        dirs = np.column_stack([dirs, np.zeros(dirs.shape[0])])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["dir0", "dir1", "dir2", "support_bits"])
        for d, s in zip(dirs, env.supports):
            w.writerow([_fmt(d[0]), _fmt(d[1]), _fmt(d[2]), _fmt(s)])


def write_boundary_csv(points, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["R0", "R1"])
        for r0, r1 in points:
            w.writerow([_fmt(r0), _fmt(r1)])


def _fmt(x):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.9g" % x


def envelope_boundary_2d(env):
    """Pareto frontier of the (convexified) 2-d region described by an
    envelope, as vertices sorted by increasing R0.  Intersects the
    supporting halfplanes pairwise, so the output is the outer convex
    shape the fan can see."""
    if len(env.variables) != 2:
        raise ValueError("boundary walk is for 2-d envelopes")
    keep = np.isfinite(env.supports)
    a = env.directions[keep]
    b = env.supports[keep]
    if a.shape[0] == 0 or np.any(b < -1e15):
        return np.empty((0, 2))
    verts = enumerate_vertices(a, b, nonneg=True)
    if verts.shape[0] == 0:
        return np.empty((0, 2))
    # keep the non-dominated ones (upper-right frontier)
    front = []
    for i, v in enumerate(verts):
        dominated = np.any(np.all(verts - v >= -1e-9, axis=1) &
                           (np.arange(verts.shape[0]) != i) &
                           np.any(verts - v > 1e-9, axis=1))
        if not dominated:
            front.append(v)
    front = np.array(sorted(front, key=lambda v: (v[0], -v[1])))
    return front
