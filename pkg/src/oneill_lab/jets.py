"""Forward-mode jets carrying value, gradient, and Hessian.

A :class:`ScalarJet` propagates exact first and second derivatives through
arithmetic. Hessians are stored as full dense symmetric arrays; every
product rule uses :func:`_sym_outer` so symmetry holds bit-exactly, not just
to rounding. Dimensions stay small (chart dims <= 5) so dense storage wins
over any sparse cleverness.

A jet with ``hessian=None`` is an order-1 jet: gradient only. Mixing an
order-1 jet into any operation demotes the result to order 1. This is how
derivative-of-a-computed-field work avoids paying for second derivatives it
cannot use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RejectedInputError, SingularEvaluationError

# Reciprocal guard: denominators below this magnitude raise instead of
# overflowing to inf and poisoning every downstream tensor.
_DIV_GUARD = 1e-300


def _sym_outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # a b^T + b a^T; bit-exact symmetric because float + and * commute.
    return np.outer(a, b) + np.outer(b, a)


@dataclass(frozen=True, eq=False)
class ScalarJet:
    """Truncated Taylor data of a scalar function at one point."""

    value: float
    gradient: np.ndarray
    hessian: np.ndarray | None

    @property
    def dim(self) -> int:
        return self.gradient.shape[0]

    @property
    def order(self) -> int:
        return 1 if self.hessian is None else 2

    # -- lifting -----------------------------------------------------------

    def _coerce(self, other) -> "ScalarJet":
        if isinstance(other, ScalarJet):
            if other.dim != self.dim:
                raise RejectedInputError(
                    f"jet dimension mismatch: {self.dim} vs {other.dim}"
                )
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return constant(float(other), self.dim, order=self.order)
        return NotImplemented  # type: ignore[return-value]

    def _result_hessian_pair(self, other: "ScalarJet"):
        # None is contagious: order-1 in, order-1 out.
        if self.hessian is None or other.hessian is None:
            return None, None
        return self.hessian, other.hessian

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        ha, hb = self._result_hessian_pair(o)
        hess = None if ha is None else ha + hb
        return ScalarJet(self.value + o.value, self.gradient + o.gradient, hess)

    __radd__ = __add__

    def __neg__(self):
        hess = None if self.hessian is None else -self.hessian
        return ScalarJet(-self.value, -self.gradient, hess)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        ha, hb = self._result_hessian_pair(o)
        hess = None if ha is None else ha - hb
        return ScalarJet(self.value - o.value, self.gradient - o.gradient, hess)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o.__sub__(self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        ha, hb = self._result_hessian_pair(o)
        grad = self.value * o.gradient + o.value * self.gradient
        if ha is None:
            hess = None
        else:
            hess = (
                o.value * ha
                + self.value * hb
                + _sym_outer(self.gradient, o.gradient)
            )
        return ScalarJet(self.value * o.value, grad, hess)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if abs(o.value) < _DIV_GUARD:
            raise SingularEvaluationError(
                f"jet division by near-zero denominator {o.value!r}"
            )
        # u = w v  =>  w' = (u' - w v') / v,  w'' = (u'' - sym(w', v') - w v'') / v
        w_val = self.value / o.value
        w_grad = (self.gradient - w_val * o.gradient) / o.value
        ha, hb = self._result_hessian_pair(o)
        if ha is None:
            hess = None
        else:
            hess = (ha - _sym_outer(w_grad, o.gradient) - w_val * hb) / o.value
        return ScalarJet(w_val, w_grad, hess)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o.__truediv__(self)

    def __pow__(self, exponent):
        if isinstance(exponent, ScalarJet):
            raise RejectedInputError("jet exponents are not supported")
        if isinstance(exponent, (int, np.integer)) or (
            isinstance(exponent, float) and exponent.is_integer()
        ):
            n = int(exponent)
            if n == 0:
                return constant(1.0, self.dim, order=self.order)
            if n < 0:
                return 1.0 / (self ** (-n))
            out = self
            for _ in range(n - 1):
                out = out * self
            return out
        if self.value <= 0.0:
            raise SingularEvaluationError(
                f"fractional power of non-positive base {self.value!r}"
            )
        p = float(exponent)
        v = self.value**p
        dv = p * self.value ** (p - 1.0)
        grad = dv * self.gradient
        if self.hessian is None:
            hess = None
        else:
            d2v = p * (p - 1.0) * self.value ** (p - 2.0)
            hess = dv * self.hessian + d2v * np.outer(self.gradient, self.gradient)
        return ScalarJet(v, grad, hess)

    def sqrt(self) -> "ScalarJet":
        if self.value <= 0.0:
            raise SingularEvaluationError(
                f"sqrt of non-positive jet value {self.value!r}"
            )
        w = math.sqrt(self.value)
        grad = self.gradient / (2.0 * w)
        if self.hessian is None:
            hess = None
        else:
            hess = (self.hessian / 2.0 - np.outer(grad, grad)) / w
        return ScalarJet(w, grad, hess)

    def __repr__(self) -> str:  # debugging aid only
        return f"ScalarJet({self.value!r}, grad={self.gradient!r}, order={self.order})"


def constant(value: float, dim: int, order: int = 2) -> ScalarJet:
    """Jet of a constant: zero gradient, zero (or absent) Hessian."""
    hess = None if order == 1 else np.zeros((dim, dim))
    return ScalarJet(float(value), np.zeros(dim), hess)


def variable(value: float, index: int, dim: int, order: int = 2) -> ScalarJet:
    """Jet of the coordinate function ``x[index]`` seeded at ``value``."""
    if not 0 <= index < dim:
        raise RejectedInputError(f"variable index {index} out of range for dim {dim}")
    grad = np.zeros(dim)
    grad[index] = 1.0
    hess = None if order == 1 else np.zeros((dim, dim))
    return ScalarJet(float(value), grad, hess)


@dataclass(frozen=True)
class JetPoint:
    """A chart point with its tuple of seeded coordinate jets."""

    coords: np.ndarray
    vars: tuple
    order: int

    @property
    def dim(self) -> int:
        return self.coords.shape[0]


def seed(coords, order: int = 2) -> JetPoint:
    """Seed coordinate jets at ``coords``. Rejects empty or non-finite input."""
    arr = np.asarray(coords, dtype=float)
    if arr.ndim != 1 or arr.shape[0] == 0:
        raise RejectedInputError(f"seed expects a nonempty 1-d point, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise RejectedInputError("seed coordinates must be finite")
    if order not in (1, 2):
        raise RejectedInputError(f"jet order must be 1 or 2, got {order}")
    dim = arr.shape[0]
    vs = tuple(variable(arr[i], i, dim, order) for i in range(dim))
    return JetPoint(coords=arr, vars=vs, order=order)


def as_jet(x, dim: int, order: int = 2) -> ScalarJet:
    """Normalize a float-or-jet into a ScalarJet of the given dimension."""
    if isinstance(x, ScalarJet):
        if x.dim != dim:
            raise RejectedInputError(f"jet dimension mismatch: expected {dim}, got {x.dim}")
        return x
    return constant(float(x), dim, order=order)


def deriv(jet: ScalarJet, index: int) -> ScalarJet:
    """Partial derivative of an order-2 jet as an order-1 jet.

    The derivative's gradient is the corresponding Hessian row; its own
    second derivatives are unknown, hence the demotion.
    """
    if jet.hessian is None:
        raise RejectedInputError("deriv needs an order-2 jet")
    if not 0 <= index < jet.dim:
        raise RejectedInputError(f"deriv index {index} out of range for dim {jet.dim}")
    return ScalarJet(float(jet.gradient[index]), jet.hessian[index].copy(), None)


def jet_eval(f, coords, order: int = 2) -> ScalarJet:
    """Evaluate ``f(vars) -> jet|float`` on freshly seeded coordinates."""
    p = seed(coords, order=order)
    return as_jet(f(p.vars), p.dim, order=order)


def jet_solve(matrix, rhs) -> list:
    """Solve A x = b by Gaussian elimination where entries may be jets.

    Pivoting compares ``|value|`` only; derivative parts ride along. Used for
    Gram-matrix solves whose entries are jets of metric pairings.
    """
    n = len(matrix)
    if n == 0 or any(len(row) != n for row in matrix) or len(rhs) != n:
        raise RejectedInputError("jet_solve expects a square system")
    a = [list(row) for row in matrix]
    b = list(rhs)
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(_jet_value(a[r][col])))
        if abs(_jet_value(a[piv][col])) < 1e-12:
            raise SingularEvaluationError("jet_solve pivot collapsed")
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            b[col], b[piv] = b[piv], b[col]
        for r in range(col + 1, n):
            factor = a[r][col] / a[col][col]
            for c in range(col, n):
                a[r][c] = a[r][c] - factor * a[col][c]
            b[r] = b[r] - factor * b[col]
    x: list = [None] * n
    for r in range(n - 1, -1, -1):
        acc = b[r]
        for c in range(r + 1, n):
            acc = acc - a[r][c] * x[c]
        x[r] = acc / a[r][r]
    return x


def _jet_value(x) -> float:
    return x.value if isinstance(x, ScalarJet) else float(x)


def sqrt(x):
    """sqrt that dispatches on jets and plain floats alike."""
    if isinstance(x, ScalarJet):
        return x.sqrt()
    if x <= 0.0:
        raise SingularEvaluationError(f"sqrt of non-positive value {x!r}")
    return math.sqrt(x)
