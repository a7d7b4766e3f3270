"""Inner and outer bounds for the discrete memoryless broadcast channel
with bidirectional conferencing decoders.

The evaluators here turn one choice of auxiliary distribution into a
ConstraintPolytope over (R0, R1, R2) (or (R0, R1) for the
degraded-message-set results); the *_envelope functions sweep a simplex
grid of auxiliaries and return the pointwise-max support record, i.e.
the computable face of the union region.

Two cooperation orders appear throughout:
  * inner1_*: receiver 2 quantizes first, receiver 1 then splits its
    link between decode-and-forward and quantize-bin-and-forward
    (split fraction alpha1, quantizer q2 = P(yh2|y2)).
  * inner2_*: the mirror order; receiver 2's quantizer may also depend
    on the common layer (q2 = P(yh2|w,y2), split fraction alpha2).

variant="clipped" keeps the {.}^+ on the binning surpluses; "tilde"
drops it, which never enlarges the region for the optimal split and is
what the optimality checks use (a clipped row at alpha=0 can otherwise
poke above the optimized region).
"""

import warnings

import numpy as np

from .errors import InapplicableBoundError
from .gridding import simplex_grid_chunks, simplex_grid_size, check_budget
from .info_core import JointPmf, compose_joint, mutual_information, xlog2x
from .regions import (ConstraintPolytope, LinearConstraint, LinearSystem,
                      RegionEnvelope, batch_support, default_dirs_2d,
                      default_dirs_3d)


# ---------------------------------------------------------------------------
# auxiliary-distribution containers
# ---------------------------------------------------------------------------

class AuxFactorization:
    """One point of the inner-bound search space.

    aux   -- P(u, v, w, x), a 4-axis array summing to 1
    q1    -- P(yh1 | u, w, y1), axes (U, W, Y1, Yh1); None = no quantizer
    q2    -- P(yh2 | y2) axes (Y2, Yh2), or P(yh2 | w, y2) axes
             (W, Y2, Yh2) when q2_on_w is set; None = no quantizer
    """

    def __init__(self, aux, q1=None, q2=None, q2_on_w=False):
        self.aux = np.asarray(aux, dtype=float)
        if self.aux.ndim != 4:
            raise ValueError("aux needs axes (U, V, W, X)")
        self.q1 = None if q1 is None else np.asarray(q1, dtype=float)
        self.q2 = None if q2 is None else np.asarray(q2, dtype=float)
        self.q2_on_w = bool(q2_on_w)

    @property
    def cards(self):
        return self.aux.shape


class OuterAux:
    """P(u, v, x) for the converse side; the two auxiliary alphabets
    never need to exceed |X| + 2, and the evaluator holds callers to
    that so sweeps stay honest."""

    def __init__(self, puvx):
        self.puvx = np.asarray(puvx, dtype=float)
        if self.puvx.ndim != 3:
            raise ValueError("outer auxiliary needs axes (U, V, X)")
        nu, nv, nx = self.puvx.shape
        if nu > nx + 2 or nv > nx + 2:
            raise ValueError("auxiliary alphabets larger than |X|+2 are never needed")


def t4_substitution(ch, pvx):
    """The capacity-achieving plug-in for semi-deterministic channels:
    private layer = X itself, common layer = V, no quantizer at
    receiver 1, receiver 2 forwards its output unquantized."""
    pvx = np.asarray(pvx, dtype=float)
    nv, nx = pvx.shape
    aux = np.zeros((nx, 1, nv, nx))
    for x in range(nx):
        aux[x, 0, :, x] = pvx[:, x]
    q2 = np.eye(ch.y2_card)
    return AuxFactorization(aux, q1=None, q2=q2)


def random_factorization(rng, ch, cards=(2, 2, 2), yh1_card=None, yh2_card=None,
                         q2_on_w=False):
    """Dirichlet(1) draw of a full factorization.  Quantizer alphabets
    default to the channel output sizes and are capped at |Y|+1, past
    which extra quantizer letters stop paying for themselves."""
    nu, nv, nw = cards
    nx = ch.x_card
    yh1 = min(yh1_card or ch.y1_card, ch.y1_card + 1)
    yh2 = min(yh2_card or ch.y2_card, ch.y2_card + 1)
    aux = rng.dirichlet(np.ones(nu * nv * nw * nx)).reshape(nu, nv, nw, nx)
    q1 = rng.dirichlet(np.ones(yh1), size=(nu, nw, ch.y1_card))
    if q2_on_w:
        q2 = rng.dirichlet(np.ones(yh2), size=(nw, ch.y2_card))
    else:
        q2 = rng.dirichlet(np.ones(yh2), size=ch.y2_card)
    return AuxFactorization(aux, q1=q1, q2=q2, q2_on_w=q2_on_w)


# ---------------------------------------------------------------------------
# mutual-information bookkeeping for one factorization
# ---------------------------------------------------------------------------

def factorization_terms(ch, f):
    """All the mutual informations the inner-bound rows draw on, as a
    plain dict.  Computed once per factorization and shared by the
    polytope builders, the split optimizers, and the pre-elimination
    system so they can never drift apart numerically."""
    p = compose_joint(JointPmf(("U", "V", "W", "X"), f.aux), ch,
                      q1=f.q1, q2=f.q2, q2_on_w=f.q2_on_w)
    mi = mutual_information
    return {
        "uw_y1": mi(p, ("U", "W"), ("Y1",)),
        "uw_y1h2": mi(p, ("U", "W"), ("Y1", "Yh2")),
        "u_y1_w": mi(p, ("U",), ("Y1",), ("W",)),
        "u_y1h2_w": mi(p, ("U",), ("Y1", "Yh2"), ("W",)),
        "vw_y2": mi(p, ("V", "W"), ("Y2",)),
        "vw_h1y2": mi(p, ("V", "W"), ("Yh1", "Y2")),
        "v_y2_w": mi(p, ("V",), ("Y2",), ("W",)),
        "v_h1y2_w": mi(p, ("V",), ("Yh1", "Y2"), ("W",)),
        "h1_uy1_vwy2": mi(p, ("Yh1",), ("U", "Y1"), ("V", "W", "Y2")),
        "h1_uy1_wy2": mi(p, ("Yh1",), ("U", "Y1"), ("W", "Y2")),
        "h2_y2_uwy1": mi(p, ("Yh2",), ("Y2",), ("U", "W", "Y1")),
        "h2_y2_wy1": mi(p, ("Yh2",), ("Y2",), ("W", "Y1")),
        "u_v_w": mi(p, ("U",), ("V",), ("W",)),
    }


def _caps1(t, c12, c21, alpha1, variant):
    """The four min-caps and the common-layer price for the
    quantize-first-at-2 scheme at link split alpha1."""
    z1 = alpha1 * c12 - t["h1_uy1_vwy2"]
    z2 = c21 - t["h2_y2_uwy1"]
    if variant == "clipped":
        z1, z2 = max(z1, 0.0), max(z2, 0.0)
    elif variant != "tilde":
        raise ValueError("variant must be 'clipped' or 'tilde'")
    df = (1.0 - alpha1) * c12
    m1 = min(t["u_y1_w"] + z2, t["u_y1h2_w"])
    m2 = min(t["uw_y1"] + z2, t["uw_y1h2"])
    m3 = min(t["v_y2_w"] + z1, t["v_h1y2_w"])
    m4 = min(t["vw_y2"] + z1, t["vw_h1y2"]) + df
    return m1, m2, m3, m4, t["u_v_w"]


def _caps2(t, c12, c21, alpha2, variant):
    """Mirror bookkeeping for the decode-split-first-at-2 scheme."""
    e1 = c12 - t["h1_uy1_vwy2"]
    e2 = alpha2 * c21 - t["h2_y2_uwy1"]
    if variant == "clipped":
        e1, e2 = max(e1, 0.0), max(e2, 0.0)
    elif variant != "tilde":
        raise ValueError("variant must be 'clipped' or 'tilde'")
    df = (1.0 - alpha2) * c21
    n1 = min(t["uw_y1"] + e2, t["uw_y1h2"]) + df
    n2 = t["vw_y2"]
    n3 = min(t["u_y1_w"] + e2, t["u_y1h2_w"])
    n4 = min(t["v_y2_w"] + e1, t["v_h1y2_w"])
    return n1, n2, n3, n4, t["u_v_w"]


_RATE_VARS = ("R0", "R1", "R2")


def _rate_polytope(rows):
    """rows: list of ((c0, c1, c2), rhs)."""
    cons = [LinearConstraint(dict(zip(_RATE_VARS, c)), r) for c, r in rows]
    return ConstraintPolytope(_RATE_VARS, cons)


# ---------------------------------------------------------------------------
# inner bounds, family 1  (quantize-bin-forward at receiver 2 first)
# ---------------------------------------------------------------------------

def inner1_alpha_polytope(ch, f, alpha1, variant="clipped"):
    """Achievable (R0,R1,R2) polytope for one factorization and one
    explicit link split alpha1 in [0,1]."""
    if not 0.0 <= alpha1 <= 1.0:
        raise ValueError("alpha1 must lie in [0, 1]")
    t = factorization_terms(ch, f)
    m1, m2, m3, m4, i0 = _caps1(t, ch.c12, ch.c21, alpha1, variant)
    return _rate_polytope([
        ((1, 1, 0), m2),
        ((1, 0, 1), m4),
        ((1, 1, 1), m1 + m4 - i0),
        ((1, 1, 1), m2 + m3 - i0),
        ((2, 1, 1), m2 + m4 - i0),
    ])


def alpha1_star(ch, f, terms=None):
    """The link split that dominates every other choice (all of the
    forward link once the quantizer description fits, else all of it
    to quantization).  Zero when there is no forward link at all."""
    if ch.c12 == 0.0:
        return 0.0
    t = terms or factorization_terms(ch, f)
    return min(t["h1_uy1_wy2"] / ch.c12, 1.0)


def inner1_polytope(ch, f):
    """The family-1 region with the link split already optimized out;
    right-hand sides are resolved to plain numbers."""
    t = factorization_terms(ch, f)
    c12, c21 = ch.c12, ch.c21
    row1 = min(t["uw_y1"] + c21 - t["h2_y2_uwy1"], t["uw_y1h2"])
    row2 = t["vw_y2"] + c12 - t["h1_uy1_vwy2"]
    mid3 = min(t["u_y1_w"] + c21 - t["h2_y2_uwy1"], t["u_y1h2_w"])
    mid4 = min(t["v_y2_w"] + c12 - t["h1_uy1_vwy2"], t["v_h1y2_w"])
    i0 = t["u_v_w"]
    return _rate_polytope([
        ((1, 1, 0), row1),
        ((1, 0, 1), row2),
        ((1, 1, 1), mid3 + row2 - i0),
        ((1, 1, 1), row1 + mid4 - i0),
        ((2, 1, 1), row1 + row2 - i0),
    ])


# ---------------------------------------------------------------------------
# inner bounds, family 2  (decode-and-forward share at receiver 2 first)
# ---------------------------------------------------------------------------

def inner2_alpha_polytope(ch, f, alpha2, variant="clipped"):
    if not 0.0 <= alpha2 <= 1.0:
        raise ValueError("alpha2 must lie in [0, 1]")
    if not f.q2_on_w and f.q2 is not None:
        raise ValueError("family 2 wants q2 conditioned on (W, Y2)")
    t = factorization_terms(ch, f)
    n1, n2, n3, n4, i0 = _caps2(t, ch.c12, ch.c21, alpha2, variant)
    return _rate_polytope([
        ((1, 1, 0), n1),
        ((1, 0, 1), n2),
        ((1, 1, 1), n3 + n2 - i0),
        ((1, 1, 1), n1 + n4 - i0),
        ((2, 1, 1), n1 + n2 - i0),
    ])


def alpha2_star(ch, f, terms=None):
    if ch.c21 == 0.0:
        return 0.0
    t = terms or factorization_terms(ch, f)
    return min(t["h2_y2_wy1"] / ch.c21, 1.0)


def inner2_polytope(ch, f):
    if not f.q2_on_w and f.q2 is not None:
        raise ValueError("family 2 wants q2 conditioned on (W, Y2)")
    t = factorization_terms(ch, f)
    c12, c21 = ch.c12, ch.c21
    row1 = t["uw_y1"] + c21 - t["h2_y2_uwy1"]
    row2 = t["vw_y2"]
    mid3 = min(t["u_y1_w"] + c21 - t["h2_y2_uwy1"], t["u_y1h2_w"])
    mid4 = min(t["v_y2_w"] + c12 - t["h1_uy1_vwy2"], t["v_h1y2_w"])
    i0 = t["u_v_w"]
    return _rate_polytope([
        ((1, 1, 0), row1),
        ((1, 0, 1), row2),
        ((1, 1, 1), mid3 + row2 - i0),
        ((1, 1, 1), row1 + mid4 - i0),
        ((2, 1, 1), row1 + row2 - i0),
    ])


# ---------------------------------------------------------------------------
# the pre-elimination rate-splitting system
# ---------------------------------------------------------------------------

_SPLIT_VARS = ("R0", "R1", "R2", "R10", "R11", "R20", "R22", "B1", "B2")


def appendixB_system(ch, f, alpha1, variant="clipped"):
    """The family-1 scheme before projection: split rates (private
    parts R11/R22, reassigned parts R10/R20), bin indices B1/B2, the
    four decoding caps, and the Marton price as a lower bound on
    B1+B2.  Eliminating everything but (R0,R1,R2) must land exactly on
    inner1_alpha_polytope whenever the bin budget m1+m3 covers the
    common-layer price."""
    t = factorization_terms(ch, f)
    m1, m2, m3, m4, i0 = _caps1(t, ch.c12, ch.c21, alpha1, variant)
    rows = [
        ({"R1": 1, "R10": -1, "R11": -1}, 0.0),
        ({"R1": -1, "R10": 1, "R11": 1}, 0.0),
        ({"R2": 1, "R20": -1, "R22": -1}, 0.0),
        ({"R2": -1, "R20": 1, "R22": 1}, 0.0),
        ({"R11": 1, "B1": 1}, m1),
        ({"R0": 1, "R10": 1, "R20": 1, "R11": 1, "B1": 1}, m2),
        ({"R22": 1, "B2": 1}, m3),
        ({"R0": 1, "R10": 1, "R20": 1, "R22": 1, "B2": 1}, m4),
        ({"B1": -1, "B2": -1}, -i0),
    ]
    rows += [({v: -1}, 0.0) for v in _SPLIT_VARS]
    return LinearSystem.from_rows(_SPLIT_VARS, rows)


# ---------------------------------------------------------------------------
# converse side
# ---------------------------------------------------------------------------

_OUTER_COEFFS = np.array([
    (1, 1, 0),
    (0, 1, 0), (0, 1, 0),
    (1, 0, 1),
    (0, 0, 1), (0, 0, 1),
    (1, 1, 1), (1, 1, 1), (1, 1, 1), (1, 1, 1), (1, 1, 1),
], dtype=float)


def outer_polytope(ch, outer_aux):
    """Converse polytope for one P(u,v,x)."""
    rhs = _outer_rhs_batch(ch, np.asarray(outer_aux.puvx)[None, ...])[0]
    return _rate_polytope(list(zip(map(tuple, _OUTER_COEFFS.astype(int)), rhs)))


def _outer_rhs_batch(ch, puvx):
    """(N, U, V, X) auxiliary batch -> (N, 11) right-hand sides."""
    t = ch.transition
    c12, c21 = ch.c12, ch.c21
    # joint over (n, U, V, X, Y1, Y2)
    j = puvx[..., None, None] * t[None, None, None, ...]
    h = _entropy_memo(j)
    iU_Y1 = h("U") + h("Y1") - h("UY1")
    iV_Y2 = h("V") + h("Y2") - h("VY2")
    iX_Y1 = h("X") + h("Y1") - h("XY1")
    iX_Y2 = h("X") + h("Y2") - h("XY2")
    iX_Y1_given_Y2V = h("VXY2") + h("VY1Y2") - h("VXY1Y2") - h("VY2")
    iX_Y2_given_Y1V = h("VXY1") + h("VY1Y2") - h("VXY1Y2") - h("VY1")
    iX_Y2_given_Y1U = h("UXY1") + h("UY1Y2") - h("UXY1Y2") - h("UY1")
    iX_Y1_given_Y2U = h("UXY2") + h("UY1Y2") - h("UXY1Y2") - h("UY2")
    iX_Y1_given_V = h("VX") + h("VY1") - h("VXY1") - h("V")
    iX_Y2_given_U = h("UX") + h("UY2") - h("UXY2") - h("U")
    iX_Y1Y2 = h("X") + h("Y1Y2") - h("XY1Y2")
    rows = [
        iU_Y1 + c21,
        iX_Y1_given_Y2V + iX_Y2,
        iX_Y2_given_Y1V + iX_Y1,
        iV_Y2 + c12,
        iX_Y2_given_Y1U + iX_Y1,
        iX_Y1_given_Y2U + iX_Y2,
        iX_Y1_given_V + iV_Y2 + c12 + c21,
        iX_Y2_given_U + iU_Y1 + c12 + c21,
        iX_Y1_given_Y2V + iX_Y2 + c12,
        iX_Y2_given_Y1U + iX_Y1 + c21,
        iX_Y1Y2,
    ]
    return np.stack(rows, axis=-1)


def _entropy_memo(joint):
    """joint: (N, U, V, X, Y1, Y2).  Returns h(subset-string) with
    memoized marginal entropies; subset strings use axis letters
    U, V, X, Y1, Y2 concatenated in that order (e.g. "UXY1")."""
    axis_of = {"U": 1, "V": 2, "X": 3, "Y1": 4, "Y2": 5}
    cache = {}

    def h(spec):
        if spec in cache:
            return cache[spec]
        names = _split_axes(spec)
        drop = tuple(ax for nm, ax in axis_of.items() if nm not in names)
        marg = joint.sum(axis=drop) if drop else joint
        flat = marg.reshape(marg.shape[0], -1)
        val = -xlog2x(flat).sum(axis=1)
        cache[spec] = val
        return val

    return h


def _split_axes(spec):
    out, i = [], 0
    while i < len(spec):
        if spec[i] == "Y":
            out.append(spec[i:i + 2])
            i += 2
        else:
            out.append(spec[i])
            i += 1
    return set(out)


def outer_envelope(ch, grid_step=0.25, u_card=None, v_card=None,
                   directions=None, chunk=65536):
    """Support record of the converse region over a full simplex grid
    of P(u,v,x).  Grid size explodes fast; the evaluation budget guard
    throws rather than letting a sweep run for days."""
    nu = u_card or ch.x_card + 2
    nv = v_card or ch.x_card + 2
    if nu > ch.x_card + 2 or nv > ch.x_card + 2:
        raise ValueError("auxiliary alphabets larger than |X|+2 are never needed")
    dirs = default_dirs_3d() if directions is None else np.atleast_2d(directions)
    cells = nu * nv * ch.x_card
    check_budget(simplex_grid_size(cells, grid_step))
    best = np.full(dirs.shape[0], -np.inf)
    for block in simplex_grid_chunks(cells, grid_step, chunk=chunk):
        puvx = block.reshape(-1, nu, nv, ch.x_card)
        rhs = _outer_rhs_batch(ch, puvx)
        sup = batch_support(_OUTER_COEFFS, rhs, dirs, reduce_max=True)
        best = np.maximum(best, sup)
    return RegionEnvelope(_RATE_VARS, dirs, best,
                          meta={"grid_step": grid_step, "u_card": nu, "v_card": nv})


# ---------------------------------------------------------------------------
# semi-deterministic capacity results (degraded message sets / more capable)
# ---------------------------------------------------------------------------

def _require_semi_det(ch, who):
    from .channels import is_semi_deterministic
    ok, f = is_semi_deterministic(ch)
    if not ok:
        raise InapplicableBoundError(
            "%s needs Y2 to be a function of (X, Y1) for this channel" % who)
    return f


def theorem4_polytope(ch, pvx, include_joint_row=True):
    """Exact (R0, R1) region evaluator for semi-deterministic channels
    where only receiver 1 has a private message.  include_joint_row
    drops the one constraint that sees the two outputs jointly; what is
    left is the cut-set comparator that the region plots are judged
    against."""
    _require_semi_det(ch, "theorem4_polytope")
    rhs = _t4_rhs_batch(ch, np.asarray(pvx, dtype=float)[None, ...],
                        ch.c12, ch.c21, include_joint_row)[0]
    coeffs = [(1, 0)] + [(1, 1)] * (rhs.shape[0] - 1)
    cons = [LinearConstraint(dict(zip(("R0", "R1"), c)), r)
            for c, r in zip(coeffs, rhs)]
    return ConstraintPolytope(("R0", "R1"), cons)


def _t4_mi_batch(ch, pvx):
    """Batch MI terms for the degraded-message-set rows.
    pvx: (N, V, X) -> dict of (N,) arrays."""
    t = ch.transition
    j = pvx[..., None, None] * t[None, None, ...]     # (N, V, X, Y1, Y2)
    ax = {"V": 1, "X": 2, "Y1": 3, "Y2": 4}
    cache = {}

    def h(*names):
        key = frozenset(names)
        if key in cache:
            return cache[key]
        drop = tuple(a for nm, a in ax.items() if nm not in key)
        val = -xlog2x(j.sum(axis=drop)).reshape(j.shape[0], -1).sum(axis=1)
        cache[key] = val
        return val

    return {
        "v_y2": h("V") + h("Y2") - h("V", "Y2"),
        "x_y1": h("X") + h("Y1") - h("X", "Y1"),
        "x_y1_v": h("V", "X") + h("V", "Y1") - h("V", "X", "Y1") - h("V"),
        "xj_v": h("V", "X") + h("V", "Y1", "Y2") - h("V", "X", "Y1", "Y2") - h("V"),
        "x_j": h("X") + h("Y1", "Y2") - h("X", "Y1", "Y2"),
    }


def _t4_rhs_batch(ch, pvx, c12, c21, include_joint_row):
    m = _t4_mi_batch(ch, pvx)
    rows = [m["v_y2"] + c12,
            m["x_y1"] + c21,
            m["x_y1_v"] + m["v_y2"] + c12 + c21]
    if include_joint_row:
        rows.append(m["xj_v"] + m["v_y2"] + c12)
    rows.append(m["x_j"])
    return np.stack(rows, axis=-1)


def theorem4_envelope(ch, grid_step=0.02, v_card=None, include_joint_row=True,
                      directions=None, chunk=200_000):
    env, = theorem4_envelope_multi(
        ch, [{"c12": ch.c12, "c21": ch.c21, "include_joint_row": include_joint_row}],
        grid_step=grid_step, v_card=v_card, directions=directions, chunk=chunk)
    return env


def theorem4_envelope_multi(ch, configs, grid_step=0.02, v_card=None,
                            directions=None, chunk=200_000):
    """Sweep the P(v,x) grid once and price several (c12, c21,
    include_joint_row) configurations off the same mutual-information
    arrays.  This is what makes the side-by-side region plots cheap:
    the grid walk dominates and is shared.

    The per-config support over the whole grid only depends on each
    point through (s, a) = (min of the sum rows, the common-rate cap),
    so each chunk is collapsed to its Pareto frontier in that plane
    before any direction work happens.
    """
    _require_semi_det(ch, "theorem4_envelope")
    nv = v_card or ch.x_card + 2
    dirs = default_dirs_2d() if directions is None else np.atleast_2d(directions)
    if np.any(dirs < 0):
        raise ValueError("closed-form sweep assumes nonnegative directions")
    cells = nv * ch.x_card
    check_budget(simplex_grid_size(cells, grid_step))
    fronts = [None] * len(configs)
    for block in simplex_grid_chunks(cells, grid_step, chunk=chunk):
        pvx = block.reshape(-1, nv, ch.x_card)
        m = _t4_mi_batch(ch, pvx)
        for i, cfg in enumerate(configs):
            c12, c21 = cfg["c12"], cfg["c21"]
            a = m["v_y2"] + c12
            s = np.minimum(m["x_y1"] + c21,
                           m["x_y1_v"] + m["v_y2"] + c12 + c21)
            if cfg.get("include_joint_row", True):
                s = np.minimum(s, m["xj_v"] + m["v_y2"] + c12)
            s = np.minimum(s, m["x_j"])
            fronts[i] = _pareto_2d(s, np.minimum(a, s), fronts[i])
    out = []
    for cfg, front in zip(configs, fronts):
        s, acap = front
        w0, w1 = dirs[:, 0], dirs[:, 1]
        sup = (w1[:, None] * s[None, :] +
               np.maximum(w0 - w1, 0.0)[:, None] * acap[None, :]).max(axis=1)
        out.append(RegionEnvelope(("R0", "R1"), dirs, sup,
                                  meta={"grid_step": grid_step, "v_card": nv,
                                        **cfg}))
    return out


def _pareto_2d(s, a, acc):
    """Maximal points of {(s_i, a_i)} merged with an existing frontier,
    sorted by decreasing s (so a comes out strictly increasing).  The
    support formulas are monotone in both coordinates, which is why
    only these survivors can ever attain the envelope."""
    if acc is not None:
        s = np.concatenate([s, acc[0]])
        a = np.concatenate([a, acc[1]])
    order = np.lexsort((-a, -s))          # s desc, ties broken by a desc
    s, a = s[order], a[order]
    prev = np.concatenate([[-np.inf], np.maximum.accumulate(a)[:-1]])
    keep = a > prev
    return s[keep], a[keep]


def theorem5_polytope(ch, pvx, warn_checks=True):
    """Exact (R0,R1,R2) evaluator for one-sided cooperation (link to
    receiver 1 only) on semi-deterministic channels whose first output
    is the stronger one.  Any c12 on the channel is ignored."""
    _require_semi_det(ch, "theorem5_polytope")
    if warn_checks:
        _warn_theorem5(ch)
    rhs = _t5_rhs_batch(ch, np.asarray(pvx, dtype=float)[None, ...])[0]
    coeffs = [(1, 0, 1)] + [(1, 1, 1)] * 4
    return _rate_polytope(list(zip(coeffs, rhs)))


def _warn_theorem5(ch):
    from .channels import more_capable_evidence
    if ch.c12 > 0:
        warnings.warn("one-sided bound: the channel's c12 is ignored")
    ev = more_capable_evidence(ch, grid_step=0.05)
    if ev["min_gap"] < -1e-9:
        warnings.warn("receiver 1 is not more capable near P(x)=%s "
                      "(gap %.3g); bound may not be the capacity region"
                      % (ev["argmin_px"], ev["min_gap"]))


def _t5_rhs_batch(ch, pvx):
    m = _t4_mi_batch(ch, pvx)
    c21 = ch.c21
    rows = [m["v_y2"],
            m["x_y1"] + c21,
            m["x_y1_v"] + m["v_y2"] + c21,
            m["xj_v"] + m["v_y2"],
            m["x_j"]]
    return np.stack(rows, axis=-1)


def theorem5_envelope(ch, grid_step=0.05, v_card=None, directions=None,
                      chunk=200_000):
    _require_semi_det(ch, "theorem5_envelope")
    _warn_theorem5(ch)
    nv = v_card or ch.x_card + 2
    dirs = default_dirs_3d() if directions is None else np.atleast_2d(directions)
    if np.any(dirs < 0):
        raise ValueError("closed-form sweep assumes nonnegative directions")
    cells = nv * ch.x_card
    check_budget(simplex_grid_size(cells, grid_step))
    w0, w1, w2 = dirs[:, 0], dirs[:, 1], dirs[:, 2]
    wmax = np.maximum(w0, w2)
    best = np.full(dirs.shape[0], -np.inf)
    for block in simplex_grid_chunks(cells, grid_step, chunk=chunk):
        pvx = block.reshape(-1, nv, ch.x_card)
        rhs = _t5_rhs_batch(ch, pvx)
        s = rhs[:, 1:].min(axis=1)
        a = np.minimum(rhs[:, 0], s)
        # region {r>=0: r0+r2 <= a, r0+r1+r2 <= s}
        sup = (w1[:, None] * s[None, :] +
               np.maximum(wmax - w1, 0.0)[:, None] * a[None, :]).max(axis=1)
        best = np.maximum(best, sup)
    return RegionEnvelope(_RATE_VARS, dirs, best,
                          meta={"grid_step": grid_step, "v_card": nv})


# ---------------------------------------------------------------------------
# default inner-bound sweeps (substitution family)
# ---------------------------------------------------------------------------

def inner1_envelope(ch, grid_step=0.1, v_card=None, directions=None,
                    factorizations=(), chunk=100_000):
    """Default search space for the family-1 inner bound: the
    substitution that is exact in the semi-deterministic case, swept
    over a P(v,x) grid, with any extra user factorizations unioned in.
    Works (as a plain inner bound) for any discrete channel."""
    return _substitution_envelope(ch, grid_step, v_card, directions,
                                  factorizations, chunk, family=1)


def inner2_envelope(ch, grid_step=0.1, v_card=None, directions=None,
                    factorizations=(), chunk=100_000):
    return _substitution_envelope(ch, grid_step, v_card, directions,
                                  factorizations, chunk, family=2)


_INNER_SUB_COEFFS = np.array([
    (1, 1, 0), (1, 0, 1), (1, 1, 1), (1, 1, 1), (2, 1, 1)], dtype=float)


def _substitution_envelope(ch, grid_step, v_card, directions, factorizations,
                           chunk, family):
    nv = v_card or ch.x_card + 2
    dirs = default_dirs_3d() if directions is None else np.atleast_2d(directions)
    cells = nv * ch.x_card
    check_budget(simplex_grid_size(cells, grid_step))
    best = np.full(dirs.shape[0], -np.inf)
    t = ch.transition
    for block in simplex_grid_chunks(cells, grid_step, chunk=chunk):
        pvx = block.reshape(-1, nv, ch.x_card)
        m = _t4_mi_batch(ch, pvx)
        j = pvx[..., None, None] * t[None, None, ...]
        h_xy1y2 = -xlog2x(j.sum(axis=1)).reshape(j.shape[0], -1).sum(axis=1)
        h_xy1 = -xlog2x(j.sum(axis=(1, 4))).reshape(j.shape[0], -1).sum(axis=1)
        pen2 = h_xy1y2 - h_xy1                       # H(Y2 | X, Y1)
        if family == 1:
            r1 = np.minimum(m["x_y1"] + ch.c21 - pen2, m["x_j"])
        else:
            r1 = m["x_y1"] + ch.c21 - pen2
        r2 = m["v_y2"] + (ch.c12 if family == 1 else 0.0)
        r3 = np.minimum(m["x_y1_v"] + ch.c21 - pen2, m["xj_v"]) + r2
        rhs = np.stack([r1, r2, r3, r1, r1 + r2], axis=-1)
        best = np.maximum(best, batch_support(_INNER_SUB_COEFFS, rhs, dirs,
                                              reduce_max=True))
    for f in factorizations:
        poly = inner1_polytope(ch, f) if family == 1 else inner2_polytope(ch, f)
        a, b = poly.coeff_matrix()
        best = np.maximum(best, batch_support(a, b[None, :], dirs)[0])
    return RegionEnvelope(_RATE_VARS, dirs, best,
                          meta={"grid_step": grid_step, "v_card": nv,
                                "family": family})


# ---------------------------------------------------------------------------
# primitive relay specialization
# ---------------------------------------------------------------------------

def primitive_relay_rate(ch, pwx, q1):
    """Largest known single-message rate when receiver 1 acts as a
    relay for receiver 2 over the forward link only: quantize the
    relay's observation (q1 = P(yh1|w,y1)) on top of a decoded layer W.
    c21 plays no role and is ignored."""
    pwx = np.asarray(pwx, dtype=float)
    q1 = np.asarray(q1, dtype=float)
    j = np.einsum("wx,xab,wac->wxabc", pwx, ch.transition, q1, optimize=True)
    p = JointPmf(("W", "X", "Y1", "Y2", "Yh1"), j)
    mi = mutual_information
    pen = mi(p, ("Yh1",), ("Y1",), ("X", "W", "Y2"))
    t1 = mi(p, ("X",), ("Y2",)) + ch.c12 - pen
    t2 = mi(p, ("W",), ("Y1",)) + mi(p, ("X",), ("Yh1", "Y2"), ("W",))
    t3 = (mi(p, ("W",), ("Y1",)) + mi(p, ("X",), ("Y2",), ("W",))
          + ch.c12 - pen)
    return min(t1, t2, t3)
