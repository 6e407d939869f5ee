"""Linear solves through the kernel representation, plus exact oracles.

``operator_matrix`` discretizes u(t) = integral of H(t, s) y(s) ds as a
dense matrix M acting on grid values of y.  M is built by product
integration: y is replaced by its piecewise-quadratic interpolant on
node-pair panels and the kernel moments are integrated exactly
(3-point Gauss per panel, split at the diagonal kink of G when it falls
inside a panel).  Two properties follow that a plain
sample-the-kernel-at-nodes Nystrom matrix does not give:

* the matrix is exact (to roundoff) whenever y is piecewise quadratic,
  so polynomial oracle comparisons are limited only by interpolation of
  y, not by kernel quadrature error across the kink;
* the discretization error varies smoothly with t, so fourth-difference
  residuals of solutions are not polluted by panel-parity noise from the
  kink (that noise is O(1) after division by h^4).

The matrix depends only on (context, n); it is assembled once and
memoized on the context, and shared by the nonlinear operator.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernel
from .errors import HypothesisViolation
from .grid import GridFunction
from .kernel import KernelContext

CONE_SLACK = 1e-10

# 3-point Gauss-Legendre on [0, 1]: exact through degree 5, enough for
# (cubic kernel branch) x (quadratic basis)
_GX, _GW = np.polynomial.legendre.leggauss(3)
_GX = (_GX + 1.0) / 2.0
_GW = _GW / 2.0


def _quad_basis(x: np.ndarray) -> np.ndarray:
    """Lagrange basis on nodes {0, 1/2, 1} evaluated at x; shape (len(x), 3)."""
    return np.stack(
        [(1.0 - x) * (1.0 - 2.0 * x), 4.0 * x * (1.0 - x), x * (2.0 * x - 1.0)], axis=-1
    )


def operator_matrix(ctx: KernelContext, n: int) -> np.ndarray:
    """Dense (n+1) x (n+1) matrix mapping grid y-values to grid u-values."""
    cached = ctx._op_cache.get(n)
    if cached is not None:
        return cached
    if n < 2 or n % 2 != 0:
        raise ValueError(f"operator grid needs even n >= 2, got n={n}")
    h = 1.0 / n
    panels = n // 2
    ts = np.linspace(0.0, 1.0, n + 1)

    # smooth panel contributions: nodes at s = 2h (k + x), weights folded
    # with basis values -> (node, basis) matrix shared by every panel
    s_nodes = (2.0 * h) * (np.arange(panels)[:, None] + _GX[None, :])  # (panels, 3)
    wb = (2.0 * h * _GW)[:, None] * _quad_basis(_GX)  # (3, 3)
    gm = kernel.green_matrix(ts, s_nodes.ravel()).reshape(n + 1, panels, 3)
    blocks = np.einsum("ipm,mb->ipb", gm, wb)

    m = np.zeros((n + 1, n + 1))
    m[:, 0:n:2] += blocks[:, :, 0]
    m[:, 1:n:2] += blocks[:, :, 1]
    m[:, 2 : n + 1 : 2] += blocks[:, :, 2]

    # odd rows: the kink of G(t_i, .) sits at the midpoint of panel
    # (i-1)//2; replace that panel's contribution by the split-exact one
    rows = np.arange(1, n, 2)
    t_odd = rows * h
    x6 = np.concatenate([_GX, 1.0 + _GX])  # half-panel nodes in units of h
    s6 = h * (rows[:, None] - 1.0 + x6[None, :])  # (len(rows), 6)
    wb6 = (h * np.concatenate([_GW, _GW]))[:, None] * _quad_basis(x6 / 2.0)  # (6, 3)
    exact = kernel._green_raw(t_odd[:, None], s6) @ wb6
    smooth = kernel._green_raw(t_odd[:, None], h * (rows[:, None] - 1.0 + 2.0 * _GX[None, :])) @ wb
    cols = rows[:, None] + np.array([-1, 0, 1])[None, :]
    m[rows[:, None], cols] += exact - smooth

    # t-independent nonlocal correction: same product integration of c(s)
    cvals = kernel.correction_values(ctx, s_nodes.ravel()).reshape(panels, 3)
    crow = np.zeros(n + 1)
    cblocks = cvals @ wb
    crow[0:n:2] += cblocks[:, 0]
    crow[1:n:2] += cblocks[:, 1]
    crow[2 : n + 1 : 2] += cblocks[:, 2]
    m += crow[None, :]

    ctx._op_cache[n] = m
    return m


def solve_linear(y: GridFunction, ctx: KernelContext) -> GridFunction:
    """Solution of u'''' + y = 0 under the problem's boundary conditions.

    Nonnegative y gives nonnegative u lying in the cone (see
    :func:`cone_ratio`); the map is linear in y.
    """
    m = operator_matrix(ctx, y.n)
    return GridFunction(y.n, m @ y.values)


def polynomial_oracle(
    y_coeffs: Sequence[float], a_coeffs: Sequence[float]
) -> np.ndarray:
    """Exact solution coefficients when y and a are polynomials.

    Antidifferentiates -y four times, fixes the cubic/linear/quadratic
    coefficients from u'(0) = u''(0) = u'(1) = 0, then solves
    c0 (1 - alpha) = integral of a * (particular part) for the constant
    term, all in rational arithmetic.  Returns ascending coefficients as
    floats.  Independent of the kernel machinery by construction.
    """
    y = [Fraction(c) for c in y_coeffs]
    a = [Fraction(c) for c in a_coeffs]
    alpha = sum((c / (m + 1) for m, c in enumerate(a)), Fraction(0))
    if not 0 < alpha < 1:
        raise HypothesisViolation("H2", f"polynomial weight has total mass {alpha}")

    # particular part p with p'''' = -y and p(0)=p'(0)=p''(0)=p'''(0)=0
    p = [Fraction(0)] * (len(y) + 4)
    for k, c in enumerate(y):
        p[k + 4] = -c / ((k + 1) * (k + 2) * (k + 3) * (k + 4))
    c3 = -sum(k * c for k, c in enumerate(p)) / 3  # from u'(1) = 0
    q = list(p)
    q[3] += c3
    moment = sum(
        am * qk / (mdeg + kdeg + 1) for mdeg, am in enumerate(a) for kdeg, qk in enumerate(q)
    )
    c0 = moment / (1 - alpha)
    q[0] += c0
    return np.array([float(c) for c in q])


@dataclass(frozen=True)
class ConeCheck:
    """Result of the cone inequality min over [theta, 1-theta] of u
    >= theta^3 (1 - alpha + beta) * sup-norm."""

    min_inner: float
    norm: float
    ratio: float | None
    threshold: float
    satisfied: bool


def cone_ratio(u: GridFunction, ctx: KernelContext) -> ConeCheck:
    """Evaluate the cone inequality for arbitrary grid data.

    Pure inequality evaluator: u need not solve anything.  The inner
    minimum runs over grid points inside [theta, 1-theta], admitting
    boundary nodes up to 1e-12 of floating slack so exact hits like
    theta = 1/4 on a multiple-of-4 grid are kept.
    """
    n = u.n
    i_lo = int(np.ceil((ctx.theta - 1e-12) * n))
    i_hi = int(np.floor((1.0 - ctx.theta + 1e-12) * n))
    min_inner = float(np.min(u.values[i_lo : i_hi + 1]))
    norm = u.sup_norm()
    threshold = ctx.cone_constant
    return ConeCheck(
        min_inner=min_inner,
        norm=norm,
        ratio=(min_inner / norm) if norm > 0.0 else None,
        threshold=threshold,
        satisfied=min_inner >= threshold * norm - CONE_SLACK,
    )
