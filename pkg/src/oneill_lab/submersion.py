"""Submersion models over contact metric total spaces.

This layer owns the vertical/horizontal split: declared spanning fields,
jet-valued Gram-Schmidt frames adapted to the split, the two fundamental
tensors of a submersion, their first covariant derivatives, and pointwise
structural checks (symmetry, alternation, skew-adjointness, anti-invariance,
the square identity for the horizontal part of phi).

Everything pointwise routes through ``PointCalculus``, which evaluates each
declared field as a second-order jet so the orthonormal frame produced by
Gram-Schmidt is itself a differentiable field and the fundamental tensors
can be differentiated once more.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .contact import ContactStructure, SasakianSpaceFormSpec, build_r2m1
from .errors import (
    DegenerateFrameError,
    RejectedInputError,
    UnsupportedComputationError,
)
from .expressions import compile_expression
from .jets import ScalarJet, as_jet, constant, deriv, seed, sqrt
from .riemannian import (
    ManifoldModel,
    VectorField,
    christoffel_at,
    metric_values_raw,
    riemann_at,
)

_GS_PIVOT_SQ = 1e-20  # squared-norm pivot; rejects frame vectors shorter than 1e-10


@dataclass(frozen=True)
class SubmersionModel:
    """A submersion candidate between charts.

    ``projection`` holds one callable per target coordinate, fed total-chart
    jets.  ``vertical_fields`` must span the declared kernel distribution and
    ``horizontal_fields`` its complement; together they must span the total
    tangent space.  ``xi_case`` records which block carries the Reeb field,
    and the Reeb field itself must be declared as the last field of that
    block so the adapted frame keeps it in a fixed slot.

    ``locus_guard`` is a sampling-time restriction (stricter than the chart
    domain) used to keep random points away from degenerate boundaries.
    """

    name: str
    total: SasakianSpaceFormSpec
    base: ManifoldModel
    projection: tuple
    vertical_fields: tuple
    horizontal_fields: tuple
    xi_case: str
    analytic_frames: bool = True
    locus_guard: Optional[Callable[[np.ndarray], bool]] = None

    def __post_init__(self):
        if self.xi_case not in ("vertical", "horizontal"):
            raise RejectedInputError(f"unknown xi_case {self.xi_case!r}")
        if not self.vertical_fields or not self.horizontal_fields:
            raise RejectedInputError("both distributions need at least one field")
        if len(self.vertical_fields) + len(self.horizontal_fields) != self.total.model.dim:
            raise RejectedInputError(
                "vertical and horizontal blocks together must span the total space"
            )
        if len(self.projection) != self.base.dim:
            raise RejectedInputError("projection arity must match the target dimension")

    @property
    def r(self) -> int:
        return len(self.vertical_fields)

    @property
    def n(self) -> int:
        return len(self.horizontal_fields)


def build_vertical_xi_example() -> SubmersionModel:
    """Five-dimensional total space onto a flat plane; the Reeb field is
    vertical, so the fibers are three-dimensional."""
    total = build_r2m1(2)
    # chart order: x1, x2, y1, y2, z
    v1 = VectorField(
        components=(
            lambda vs: -2.0,
            lambda vs: 0.0,
            lambda vs: 2.0,
            lambda vs: 0.0,
            lambda vs: -2.0 * vs[2],
        ),
        name="V1",
    )
    v2 = VectorField(
        components=(
            lambda vs: 0.0,
            lambda vs: -2.0,
            lambda vs: 0.0,
            lambda vs: 2.0,
            lambda vs: -2.0 * vs[3],
        ),
        name="V2",
    )
    h1 = VectorField(
        components=(
            lambda vs: 2.0,
            lambda vs: 0.0,
            lambda vs: 2.0,
            lambda vs: 0.0,
            lambda vs: 2.0 * vs[2],
        ),
        name="H1",
    )
    h2 = VectorField(
        components=(
            lambda vs: 0.0,
            lambda vs: 2.0,
            lambda vs: 0.0,
            lambda vs: 2.0,
            lambda vs: 2.0 * vs[3],
        ),
        name="H2",
    )
    xi = total.structure.xi
    base = ManifoldModel(
        name="plane_eighth",
        dim=2,
        chart=("b1", "b2"),
        metric=(
            (lambda vs: 0.125, lambda vs: 0.0),
            (lambda vs: 0.0, lambda vs: 0.125),
        ),
    )
    return SubmersionModel(
        name="vertical-xi",
        total=total,
        base=base,
        projection=(lambda vs: vs[0] + vs[2], lambda vs: vs[1] + vs[3]),
        vertical_fields=(v1, v2, xi),
        horizontal_fields=(h1, h2),
        xi_case="vertical",
    )


def build_horizontal_xi_example() -> SubmersionModel:
    """Five-dimensional total space onto a three-dimensional target with the
    Reeb field horizontal.

    The declared target metric is only positive definite inside the disk the
    target chart excludes, so this model fails the submersion checks; it is
    kept as the standing stress case for the horizontal-Reeb code paths.
    """
    total = build_r2m1(2)
    v1 = VectorField(
        components=(
            lambda vs: -2.0,
            lambda vs: 0.0,
            lambda vs: 2.0,
            lambda vs: 0.0,
            lambda vs: -2.0 * vs[2],
        ),
        name="V1",
    )
    v2 = VectorField(
        components=(
            lambda vs: 0.0,
            lambda vs: -2.0,
            lambda vs: 0.0,
            lambda vs: 2.0,
            lambda vs: -2.0 * vs[3],
        ),
        name="V2",
    )
    h1 = VectorField(
        components=(
            lambda vs: 2.0,
            lambda vs: 0.0,
            lambda vs: 2.0,
            lambda vs: 0.0,
            lambda vs: 2.0 * vs[2],
        ),
        name="H1",
    )
    h2 = VectorField(
        components=(
            lambda vs: 0.0,
            lambda vs: 2.0,
            lambda vs: 0.0,
            lambda vs: 2.0,
            lambda vs: 2.0 * vs[3],
        ),
        name="H2",
    )
    xi = total.structure.xi
    base = ManifoldModel(
        name="punctured_r3",
        dim=3,
        chart=("b1", "b2", "b3"),
        metric=(
            (
                lambda vs: 0.125,
                lambda vs: vs[0] * vs[1] / 8.0,
                lambda vs: -vs[0] / 8.0,
            ),
            (lambda vs: 0.0, lambda vs: 0.125, lambda vs: -vs[1] / 8.0),
            (lambda vs: 0.0, lambda vs: 0.0, lambda vs: 0.25),
        ),
        domain_guard=lambda c: c[0] ** 2 + c[1] ** 2 > 2.0,
    )
    return SubmersionModel(
        name="horizontal-xi",
        total=total,
        base=base,
        projection=(
            lambda vs: vs[0] + vs[2],
            lambda vs: vs[1] + vs[3],
            lambda vs: vs[2] * vs[2] / 2.0 + vs[3] * vs[3] / 2.0 + vs[4],
        ),
        vertical_fields=(v1, v2),
        horizontal_fields=(h1, h2, xi),
        xi_case="horizontal",
        # stay clear of the excluded disk in the target chart
        locus_guard=lambda c: (c[0] + c[2]) ** 2 + (c[1] + c[3]) ** 2 > 2.5,
    )


def differential_at(sub: SubmersionModel, coords):
    """Projection value and Jacobian: returns ``(base_point, jac)`` with
    ``jac[b, k] = d proj_b / d coord_k``."""
    pt = seed(coords, order=1)
    sub.total.model.check_domain(pt.coords)
    d = sub.total.model.dim
    bd = sub.base.dim
    base_point = np.zeros(bd)
    jac = np.zeros((bd, d))
    for b in range(bd):
        jet = as_jet(sub.projection[b](pt.vars), d, order=1)
        base_point[b] = jet.value
        jac[b, :] = jet.gradient
    return base_point, jac


@dataclass(frozen=True)
class SubmersionCheck:
    """Pointwise submersion diagnostics.

    ``kernel_residual``: how far the declared vertical fields are from the
    projection kernel.  ``length_residual``: deviation of the pushed-forward
    horizontal frame from orthonormality in the target metric.  ``base_pd``:
    whether the declared target metric is positive definite at the image.
    """

    kernel_residual: float
    length_residual: float
    base_pd: bool
    base_point: np.ndarray


def verify_riemannian_submersion(sub: SubmersionModel, coords) -> SubmersionCheck:
    frame = adapted_frame_at(sub, coords, order=1)
    base_point, jac = differential_at(sub, coords)
    kernel_residual = float(np.max(np.abs(jac @ frame.vert_values.T)))
    gb = metric_values_raw(sub.base, base_point)
    push = jac @ frame.horiz_values.T  # columns are the pushed frame vectors
    gram = push.T @ gb @ push
    length_residual = float(np.max(np.abs(gram - np.eye(frame.n))))
    base_pd = bool(np.linalg.eigvalsh(gb)[0] > 1e-12)
    return SubmersionCheck(
        kernel_residual=kernel_residual,
        length_residual=length_residual,
        base_pd=base_pd,
        base_point=base_point,
    )


def _metric_jets(model: ManifoldModel, pt) -> list:
    d = model.dim
    out = [[None] * d for _ in range(d)]
    for i in range(d):
        for j in range(i, d):
            jet = as_jet(model.metric[i][j](pt.vars), d, order=pt.order)
            out[i][j] = out[j][i] = jet
    return out


def _pair_jets(gjets, x, y):
    acc = None
    for i in range(len(x)):
        for j in range(len(y)):
            term = gjets[i][j] * x[i] * y[j]
            acc = term if acc is None else acc + term
    return acc


@dataclass(frozen=True)
class AdaptedFrame:
    """Orthonormal frame split into the two blocks, kept as jet fields."""

    vert_jets: tuple
    horiz_jets: tuple
    vert_values: np.ndarray  # (r, dim)
    horiz_values: np.ndarray  # (n, dim)
    order: int

    @property
    def r(self) -> int:
        return len(self.vert_jets)

    @property
    def n(self) -> int:
        return len(self.horiz_jets)


def adapted_frame_at(sub: SubmersionModel, coords, order: int = 2) -> AdaptedFrame:
    """Gram-Schmidt over the declared fields, vertical block first.

    The arithmetic runs on coordinate jets, so the resulting frame is a
    differentiable field in a neighborhood of ``coords``; later fields are
    orthogonalized against everything before them, which keeps a Reeb field
    declared last in its block fixed whenever the earlier fields are already
    orthogonal to it.
    """
    coords = np.asarray(coords, dtype=float)
    model = sub.total.model
    model.check_domain(coords)
    pt = seed(coords, order=order)
    gjets = _metric_jets(model, pt)
    d = model.dim
    raw = [
        [f.evaluate(pt.vars, d, order=order) for f in sub.vertical_fields],
        [f.evaluate(pt.vars, d, order=order) for f in sub.horizontal_fields],
    ]
    done = []
    blocks = []
    for block in raw:
        out = []
        for w in block:
            v = list(w)
            for e in done:
                c = _pair_jets(gjets, v, e)
                v = [vi - c * ei for vi, ei in zip(v, e)]
            nsq = _pair_jets(gjets, v, v)
            if nsq.value < _GS_PIVOT_SQ:
                raise DegenerateFrameError(
                    f"declared fields of {sub.name!r} are dependent at "
                    f"{coords.tolist()}"
                )
            inv = 1.0 / sqrt(nsq)
            unit = [inv * vi for vi in v]
            done.append(unit)
            out.append(unit)
        blocks.append(out)
    vert_jets = tuple(tuple(u) for u in blocks[0])
    horiz_jets = tuple(tuple(u) for u in blocks[1])
    vert_values = np.array([[j.value for j in u] for u in vert_jets])
    horiz_values = np.array([[j.value for j in u] for u in horiz_jets])
    return AdaptedFrame(
        vert_jets=vert_jets,
        horiz_jets=horiz_jets,
        vert_values=vert_values,
        horiz_values=horiz_values,
        order=order,
    )


class PointCalculus:
    """Per-point state shared by the tensor and curvature layers.

    Holds the connection and curvature of the total space, the contact data,
    the adapted frame as order-2 jet fields, and covariant-derivative helpers
    that spend one derivative order per differentiation.
    """

    def __init__(self, sub: SubmersionModel, coords):
        self.sub = sub
        self.model = sub.total.model
        self.dim = self.model.dim
        self.coords = np.asarray(coords, dtype=float)
        self.model.check_domain(self.coords)
        self.conn = christoffel_at(self.model, self.coords)
        self._curv = None
        self.frame = adapted_frame_at(sub, self.coords, order=2)
        self.r = self.frame.r
        self.n = self.frame.n
        pt = seed(self.coords, order=2)
        self.metric_jets = _metric_jets(self.model, pt)
        gam, dgam = self.conn.gamma, self.conn.dgamma
        d = self.dim
        self.gamma_jets = [
            [
                [
                    ScalarJet(float(gam[k, i, j]), dgam[k, i, j, :].copy(), None)
                    for j in range(d)
                ]
                for i in range(d)
            ]
            for k in range(d)
        ]
        st = sub.total.structure
        self.phi_values, _ = st.phi_at(self.coords, order=1)
        self.eta_values = st.eta_at(self.coords)
        self.xi_values = st.xi_at(self.coords)
        self._t_tab = None
        self._a_tab = None
        self._decomp = None
        self._t_fields = None
        self._a_fields = None

    @property
    def curvature(self):
        if self._curv is None:
            self._curv = riemann_at(self.model, self.coords)
        return self._curv

    # ---- pairings and projections ----

    def pair(self, x, y):
        return _pair_jets(self.metric_jets, x, y)

    def pair_values(self, xv, yv) -> float:
        return float(np.asarray(xv) @ self.conn.metric.value @ np.asarray(yv))

    def _project(self, w, block):
        acc = None
        for e in block:
            c = self.pair(w, e)
            term = [c * ei for ei in e]
            acc = term if acc is None else [a + t for a, t in zip(acc, term)]
        return acc

    def v_project(self, w):
        return self._project(w, self.frame.vert_jets)

    def h_project(self, w):
        return self._project(w, self.frame.horiz_jets)

    def v_project_values(self, wv) -> np.ndarray:
        u = self.frame.vert_values
        coeffs = u @ (self.conn.metric.value @ np.asarray(wv))
        return coeffs @ u

    def h_project_values(self, wv) -> np.ndarray:
        u = self.frame.horiz_values
        coeffs = u @ (self.conn.metric.value @ np.asarray(wv))
        return coeffs @ u

    # ---- covariant derivatives ----

    def cov_field(self, x, y):
        """Components of the covariant derivative of field ``y`` along ``x``;
        both are jet component lists, ``y`` of order 2.  Result is order 1."""
        d = self.dim
        out = []
        for k in range(d):
            if y[k].hessian is None:
                raise RejectedInputError("cov_field needs order-2 components")
            acc = None
            for i in range(d):
                term = x[i] * deriv(y[k], i)
                acc = term if acc is None else acc + term
            for i in range(d):
                for j in range(d):
                    acc = acc + self.gamma_jets[k][i][j] * (x[i] * y[j])
            out.append(acc)
        return out

    def cov_point(self, x, y) -> np.ndarray:
        """Value of the covariant derivative of jet field ``y`` along ``x``
        given by values or jets; only the value of ``x`` is used."""
        xv = np.asarray([c.value if isinstance(c, ScalarJet) else float(c) for c in x])
        ygrad = np.array([c.gradient for c in y])
        yval = np.array([c.value for c in y])
        return ygrad @ xv + np.einsum("kij,i,j->k", self.conn.gamma, xv, yval)

    def _lift(self, w):
        if all(isinstance(c, ScalarJet) for c in w):
            return list(w)
        return [constant(float(c), self.dim, order=2) for c in w]

    # ---- fundamental tensors ----

    def t_field(self, e, f):
        """Vertical-block fundamental tensor applied to order-2 jet fields;
        result components are order-1 jets."""
        ve = self.v_project(e)
        vf = self.v_project(f)
        hf = [a - b for a, b in zip(f, vf)]
        first = self.h_project(self.cov_field(ve, vf))
        second = self.v_project(self.cov_field(ve, hf))
        return [a + b for a, b in zip(first, second)]

    def a_field(self, e, f):
        """Horizontal-block fundamental tensor; same conventions."""
        he = self.h_project(e)
        vf = self.v_project(f)
        hf = [a - b for a, b in zip(f, vf)]
        first = self.v_project(self.cov_field(he, hf))
        second = self.h_project(self.cov_field(he, vf))
        return [a + b for a, b in zip(first, second)]

    def _values_of(self, w) -> np.ndarray:
        return np.array(
            [c.value if isinstance(c, ScalarJet) else float(c) for c in w]
        )

    def _tensor_tables(self):
        """Values of both fundamental tensors on all frame pairs.

        Both tensors are pointwise bilinear, so evaluation on arbitrary
        vectors reduces to one covariant derivative per frame pair plus
        projections; the jet-level t_field/a_field path stays the reference
        implementation and is only needed where first derivatives matter."""
        if self._t_tab is None:
            r, n, d = self.r, self.n, self.dim
            jets = list(self.frame.vert_jets) + list(self.frame.horiz_jets)
            vals = [self._values_of(j) for j in jets]
            nab = [[self.cov_point(vals[i], jets[j]) for j in range(d)] for i in range(d)]
            t_tab = np.zeros((d, d, d))
            a_tab = np.zeros((d, d, d))
            for i in range(r):
                for j in range(r):
                    t_tab[i, j] = self.h_project_values(nab[i][j])
                for j in range(n):
                    t_tab[i, r + j] = self.v_project_values(nab[i][r + j])
            for i in range(n):
                for j in range(n):
                    a_tab[r + i, r + j] = self.v_project_values(nab[r + i][r + j])
                for j in range(r):
                    a_tab[r + i, j] = self.h_project_values(nab[r + i][j])
            frame_rows = np.array(vals)
            self._decomp = frame_rows @ self.conn.metric.value
            self._t_tab, self._a_tab = t_tab, a_tab
        return self._t_tab, self._a_tab

    def t_point(self, e, f) -> np.ndarray:
        t_tab, _ = self._tensor_tables()
        ce = self._decomp @ self._values_of(e)
        cf = self._decomp @ self._values_of(f)
        return np.einsum("i,j,ijk->k", ce, cf, t_tab)

    def a_point(self, e, f) -> np.ndarray:
        _, a_tab = self._tensor_tables()
        ce = self._decomp @ self._values_of(e)
        cf = self._decomp @ self._values_of(f)
        return np.einsum("i,j,ijk->k", ce, cf, a_tab)

    def nabla_t(self, e, f, g) -> np.ndarray:
        """Value of the covariant derivative of the vertical-block tensor:
        d/de of T(f, g) minus the two slot corrections.  ``f`` and ``g`` must
        be order-2 jet fields; only the value of ``e`` matters."""
        main = self.cov_point(e, self.t_field(f, g))
        c1 = self.t_point(self.cov_point(e, f), self._values_of(g))
        c2 = self.t_point(self._values_of(f), self.cov_point(e, g))
        return main - c1 - c2

    def nabla_a(self, e, f, g) -> np.ndarray:
        main = self.cov_point(e, self.a_field(f, g))
        c1 = self.a_point(self.cov_point(e, f), self._values_of(g))
        c2 = self.a_point(self._values_of(f), self.cov_point(e, g))
        return main - c1 - c2

    def _exchange_fields(self):
        """Jets of T on vertical frame pairs and of A on horizontal frame
        pairs, computed once and shared by every derivative evaluation."""
        if self._t_fields is None:
            vj, hj = self.frame.vert_jets, self.frame.horiz_jets
            self._t_fields = [
                [self.t_field(vj[k], vj[l]) for l in range(self.r)]
                for k in range(self.r)
            ]
            self._a_fields = [
                [self.a_field(hj[i], hj[j]) for j in range(self.n)]
                for i in range(self.n)
            ]
        return self._t_fields, self._a_fields

    def nabla_t_frame(self, e_values, k, l) -> np.ndarray:
        """(nabla_e T)(U_k, U_l) reusing the cached frame-pair jets."""
        t_fields, _ = self._exchange_fields()
        vj = self.frame.vert_jets
        main = self.cov_point(e_values, t_fields[k][l])
        c1 = self.t_point(self.cov_point(e_values, vj[k]), self._values_of(vj[l]))
        c2 = self.t_point(self._values_of(vj[k]), self.cov_point(e_values, vj[l]))
        return main - c1 - c2

    def nabla_a_frame(self, e_values, i, j) -> np.ndarray:
        """(nabla_e A)(X_i, X_j) reusing the cached frame-pair jets."""
        _, a_fields = self._exchange_fields()
        hj = self.frame.horiz_jets
        main = self.cov_point(e_values, a_fields[i][j])
        c1 = self.a_point(self.cov_point(e_values, hj[i]), self._values_of(hj[j]))
        c2 = self.a_point(self._values_of(hj[i]), self.cov_point(e_values, hj[j]))
        return main - c1 - c2

    def delta_n(self) -> float:
        """Divergence-type trace: sum over the horizontal frame of the
        pairing of (nabla_X T)(U, U) with X, summed over the vertical frame."""
        if not self.sub.analytic_frames:
            raise UnsupportedComputationError(
                "first derivatives of the fundamental tensors need analytic frames"
            )
        total = 0.0
        for xs in self.frame.horiz_jets:
            xv = self._values_of(xs)
            for k in range(self.r):
                total += self.pair_values(self.nabla_t_frame(xv, k, k), xv)
        return float(total)


@dataclass(frozen=True)
class OneillData:
    """Frame components of the fundamental tensors and derived norms."""

    point: np.ndarray
    r: int
    n: int
    t_coeff: np.ndarray  # (r, r, n): component of T(U_a, U_b) along X_s
    a_coeff: np.ndarray  # (n, n, r): component of A(X_s, X_t) along U_a
    t_uu: np.ndarray  # (r, r, dim): chart components of T(U_a, U_b)
    a_xx: np.ndarray  # (n, n, dim): chart components of A(X_s, X_t)
    sum_t_sq: float
    sum_a_sq: float
    norm_tv_sq: float  # mixed-slot norm of the vertical-block tensor
    norm_ah_sq: float  # mixed-slot norm of the horizontal-block tensor
    n_vec: np.ndarray  # trace of the vertical-block tensor over the fiber
    h_vec: np.ndarray  # mean curvature vector of the fibers (n_vec / r)
    n_norm_sq: float
    trace_phi_b: float
    c_norms_sq: np.ndarray  # (n,): squared lengths of the horizontal parts of phi X_s
    eta_vert: np.ndarray  # (r,): eta on the vertical frame
    eta_horiz: np.ndarray  # (n,): eta on the horizontal frame


def tensors_from_calculus(calc: PointCalculus) -> OneillData:
    r, n, g = calc.r, calc.n, calc.conn.metric.value
    uvals, xvals = calc.frame.vert_values, calc.frame.horiz_values
    t_uu = np.array([[calc.t_point(uvals[a], uvals[b]) for b in range(r)] for a in range(r)])
    t_coeff = np.zeros((r, r, n))
    for a in range(r):
        for b in range(r):
            for s in range(n):
                t_coeff[a, b, s] = calc.pair_values(t_uu[a][b], xvals[s])
    a_xx = np.array([[calc.a_point(xvals[s], xvals[t]) for t in range(n)] for s in range(n)])
    a_coeff = np.zeros((n, n, r))
    for s in range(n):
        for t in range(n):
            for a in range(r):
                a_coeff[s, t, a] = calc.pair_values(a_xx[s][t], uvals[a])
    norm_tv_sq = 0.0
    for a in range(r):
        for s in range(n):
            w = calc.t_point(uvals[a], xvals[s])
            norm_tv_sq += calc.pair_values(w, w)
    norm_ah_sq = 0.0
    for s in range(n):
        for a in range(r):
            w = calc.a_point(xvals[s], uvals[a])
            norm_ah_sq += calc.pair_values(w, w)
    n_vec = np.zeros(calc.dim)
    for a in range(r):
        n_vec = n_vec + t_uu[a][a]
    h_vec = n_vec / r
    phi = calc.phi_values
    trace_phi_b = 0.0
    c_norms_sq = np.zeros(n)
    for s in range(n):
        phix = phi @ xvals[s]
        b_part = calc.v_project_values(phix)
        c_part = calc.h_project_values(phix)
        trace_phi_b += calc.pair_values(phi @ b_part, xvals[s])
        c_norms_sq[s] = calc.pair_values(c_part, c_part)
    eta_vert = np.array([float(calc.eta_values @ uvals[a]) for a in range(r)])
    eta_horiz = np.array([float(calc.eta_values @ xvals[s]) for s in range(n)])
    return OneillData(
        point=calc.coords.copy(),
        r=r,
        n=n,
        t_coeff=t_coeff,
        a_coeff=a_coeff,
        t_uu=t_uu,
        a_xx=a_xx,
        sum_t_sq=float(np.sum(t_coeff**2)),
        sum_a_sq=float(np.sum(a_coeff**2)),
        norm_tv_sq=float(norm_tv_sq),
        norm_ah_sq=float(norm_ah_sq),
        n_vec=n_vec,
        h_vec=h_vec,
        n_norm_sq=calc.pair_values(n_vec, n_vec),
        trace_phi_b=float(trace_phi_b),
        c_norms_sq=c_norms_sq,
        eta_vert=eta_vert,
        eta_horiz=eta_horiz,
    )


def oneill_tensors_at(sub: SubmersionModel, coords) -> OneillData:
    return tensors_from_calculus(PointCalculus(sub, coords))


def bc_decompose(sub: SubmersionModel, coords, vector_values):
    """Split phi of a vector into its vertical and horizontal parts."""
    calc = PointCalculus(sub, coords)
    w = calc.phi_values @ np.asarray(vector_values, dtype=float)
    return calc.v_project_values(w), calc.h_project_values(w)


def verify_structure_lemmas(sub: SubmersionModel, coords) -> dict:
    """Pointwise residuals of the structural identities of the split.

    ``t_symmetry``: the vertical-block tensor is symmetric on fiber pairs.
    ``a_alternation``: the horizontal-block tensor alternates on horizontal
    pairs.  ``skew_t``/``skew_a``: both tensors are skew-adjoint as operators.
    ``anti_invariance``: phi maps the vertical space into the horizontal one.
    ``c_square``: the horizontal part of phi squares to minus the identity up
    to the vertical part of phi and, with the Reeb field horizontal, the Reeb
    correction.
    """
    calc = PointCalculus(sub, coords)
    data = tensors_from_calculus(calc)
    r, n = calc.r, calc.n
    uvals, xvals = calc.frame.vert_values, calc.frame.horiz_values
    res = {}
    res["t_symmetry"] = float(
        np.max(np.abs(data.t_coeff - np.swapaxes(data.t_coeff, 0, 1)))
    )
    res["a_alternation"] = float(
        np.max(np.abs(data.a_coeff + np.swapaxes(data.a_coeff, 0, 1)))
    )
    all_vals = [uvals[a] for a in range(r)] + [xvals[s] for s in range(n)]
    t_img = [[calc.t_point(e, f) for f in all_vals] for e in all_vals]
    a_img = [[calc.a_point(e, f) for f in all_vals] for e in all_vals]
    skew_t = 0.0
    skew_a = 0.0
    m = len(all_vals)
    for e in range(m):
        for f in range(m):
            for gidx in range(m):
                skew_t = max(
                    skew_t,
                    abs(
                        calc.pair_values(t_img[e][f], all_vals[gidx])
                        + calc.pair_values(all_vals[f], t_img[e][gidx])
                    ),
                )
                skew_a = max(
                    skew_a,
                    abs(
                        calc.pair_values(a_img[e][f], all_vals[gidx])
                        + calc.pair_values(all_vals[f], a_img[e][gidx])
                    ),
                )
    res["skew_t"] = float(skew_t)
    res["skew_a"] = float(skew_a)
    phi = calc.phi_values
    anti = 0.0
    for a in range(r):
        for b in range(r):
            anti = max(anti, abs(calc.pair_values(phi @ uvals[a], uvals[b])))
    res["anti_invariance"] = float(anti)
    c_sq = 0.0
    xiv = calc.xi_values
    for s in range(n):
        phix = phi @ xvals[s]
        b_part = calc.v_project_values(phix)
        c_part = calc.h_project_values(phix)
        ccx = calc.h_project_values(phi @ c_part)
        phib = phi @ b_part
        if sub.xi_case == "vertical":
            resid = ccx + xvals[s] + phib
        else:
            eta_x = float(calc.eta_values @ xvals[s])
            resid = ccx + xvals[s] - eta_x * xiv + phib
        c_sq = max(c_sq, float(np.max(np.abs(resid))))
    res["c_square"] = float(c_sq)
    return res


def load_custom_model(path) -> SubmersionModel:
    """Build a submersion model from a JSON description.

    Schema ``oneill-lab-model/1``: chart and metric for the total space, a
    contact block (phi matrix, Reeb components, eta components, the constant
    phi-sectional curvature), the projection expressions, the target chart
    and metric, the two field blocks, and the Reeb case.  All entries are
    expression strings over the respective chart variables.  Optional
    ``domain`` / ``base_domain`` expressions restrict the charts to where
    they evaluate positive.
    """
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if data.get("schema") != "oneill-lab-model/1":
        raise RejectedInputError(
            f"unsupported model schema {data.get('schema')!r}; "
            "expected 'oneill-lab-model/1'"
        )
    for key in (
        "name",
        "chart",
        "metric",
        "projection",
        "base_chart",
        "base_metric",
        "vertical",
        "horizontal",
        "xi_case",
        "contact",
    ):
        if key not in data:
            raise RejectedInputError(f"model file is missing key {key!r}")
    chart = tuple(str(v) for v in data["chart"])
    dim = len(chart)

    def compile_matrix(rows, variables, shape):
        if len(rows) != shape[0] or any(len(row) != shape[1] for row in rows):
            raise RejectedInputError("matrix block has the wrong shape")
        return tuple(
            tuple(compile_expression(str(entry), variables) for entry in row)
            for row in rows
        )

    def compile_guard(text, variables):
        f = compile_expression(str(text), variables)
        return lambda coords: float(f(tuple(float(c) for c in coords))) > 0.0

    metric = compile_matrix(data["metric"], chart, (dim, dim))
    guard = compile_guard(data["domain"], chart) if "domain" in data else None
    model = ManifoldModel(
        name=str(data["name"]), dim=dim, chart=chart, metric=metric, domain_guard=guard
    )
    contact = data["contact"]
    for key in ("c", "phi", "xi", "eta"):
        if key not in contact:
            raise RejectedInputError(f"contact block is missing key {key!r}")
    phi = compile_matrix(contact["phi"], chart, (dim, dim))
    if len(contact["xi"]) != dim or len(contact["eta"]) != dim:
        raise RejectedInputError("contact field blocks must match the chart dimension")
    xi = VectorField(
        components=tuple(compile_expression(str(e), chart) for e in contact["xi"]),
        name="xi",
    )
    eta = tuple(compile_expression(str(e), chart) for e in contact["eta"])
    structure = ContactStructure(model=model, phi=phi, xi=xi, eta=eta)
    total = SasakianSpaceFormSpec(
        c=float(contact["c"]), structure=structure, frame=()
    )
    base_chart = tuple(str(v) for v in data["base_chart"])
    bdim = len(base_chart)
    base_metric = compile_matrix(data["base_metric"], base_chart, (bdim, bdim))
    base_guard = (
        compile_guard(data["base_domain"], base_chart) if "base_domain" in data else None
    )
    base = ManifoldModel(
        name=str(data["name"]) + "-base",
        dim=bdim,
        chart=base_chart,
        metric=base_metric,
        domain_guard=base_guard,
    )
    projection = tuple(compile_expression(str(e), chart) for e in data["projection"])

    def field_block(rows, label):
        fields = []
        for idx, row in enumerate(rows):
            if len(row) != dim:
                raise RejectedInputError(
                    f"{label} field {idx} must have {dim} components"
                )
            fields.append(
                VectorField(
                    components=tuple(compile_expression(str(e), chart) for e in row),
                    name=f"{label}{idx + 1}",
                )
            )
        return tuple(fields)

    vertical = field_block(data["vertical"], "V")
    horizontal = field_block(data["horizontal"], "H")
    locus = compile_guard(data["locus"], chart) if "locus" in data else None
    return SubmersionModel(
        name=str(data["name"]),
        total=total,
        base=base,
        projection=projection,
        vertical_fields=vertical,
        horizontal_fields=horizontal,
        xi_case=str(data["xi_case"]),
        analytic_frames=True,
        locus_guard=locus,
    )
