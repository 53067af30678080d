"""Symmetric-weight Jacobi polynomials, Gauss-Lobatto quadrature, nodal bases.

Everything here lives on the reference interval [-1, 1] with the even weight
w(x) = (1 - x^2)^mu, -1 < mu < 1 (mu = 0: Legendre, mu = -1/2: Chebyshev).
The quadrature nodes are -1, 1 and the zeros of the derivative of the
degree-N Jacobi polynomial; the rule is exact on polynomials of degree
<= 2N - 1 against w.  A ``JacobiBasis`` bundles that rule with the Lagrange
(nodal) differentiation matrices and the auxiliary matrix produced by
differentiating the weight inside weak forms.

Normalization of the polynomials is the standard one (J_n(1) = C(n+mu, n));
none of the nodal quantities depend on it because they only involve ratios
of J_N and its derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import linalg

_NODE_TOL = 1e-14          # Newton stopping tolerance for node search
_NODE_MAX_ITERS = 100
_WEIGHT_VERIFY_TOL = 1e-9  # moment-oracle gate on the computed weights
_HIT_TOL = 1e-12           # removable-singularity branch in nodal evaluation


class QuadratureError(RuntimeError):
    """Node search or weight verification failed; indicates an internal bug."""


def validate_mu(mu: float) -> float:
    """Check -1 < mu < 1 (weight integrability) and return mu as float."""
    mu = float(mu)
    if not -1.0 < mu < 1.0:
        raise ValueError(f"weight exponent must satisfy -1 < mu < 1, got {mu}")
    return mu


def weight_moment(mu: float, k: int) -> float:
    """Exact value of the k-th monomial moment of the weight.

    Integrates x^k (1-x^2)^mu over [-1, 1]: zero for odd k; for k = 2m the
    Beta value B(m + 1/2, mu + 1), computed via log-Gamma.
    """
    mu = validate_mu(mu)
    k = int(k)
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    if k % 2 == 1:
        return 0.0
    m = k // 2
    return math.exp(
        math.lgamma(m + 0.5) + math.lgamma(mu + 1.0) - math.lgamma(m + mu + 1.5)
    )


def _jacobi_rows(a: float, n: int, x: np.ndarray) -> np.ndarray:
    """Rows 0..n of the symmetric Jacobi family J_k^(a,a)(x), standard normalization."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n + 1,) + x.shape)
    out[0] = 1.0
    if n >= 1:
        out[1] = (a + 1.0) * x
    for k in range(2, n + 1):
        s = 2.0 * k + 2.0 * a
        c1 = 2.0 * k * (k + 2.0 * a) * (s - 2.0)
        c2 = (s - 1.0) * s * (s - 2.0)
        c3 = 2.0 * (k + a - 1.0) ** 2 * s
        out[k] = (c2 * x * out[k - 1] - c3 * out[k - 2]) / c1
    return out


def _sym_jacobi(a: float, n: int, x):
    x = np.asarray(x, dtype=float)
    return _jacobi_rows(a, n, x)[-1] if n > 0 else np.ones_like(x)


def _check_x(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + 1e-12):
        raise ValueError("evaluation point outside [-1, 1]")
    return x


def jacobi_eval(mu: float, n: int, x):
    """Evaluate J_n(x) for the symmetric weight exponent mu (scalar or array x)."""
    mu = validate_mu(mu)
    if n < 0:
        raise ValueError("polynomial degree must be nonnegative")
    x = _check_x(x)
    out = _sym_jacobi(mu, n, x)
    return out if out.shape else float(out)


def jacobi_deriv(mu: float, n: int, x, order: int = 1):
    """First or second derivative of J_n, same normalization as jacobi_eval.

    Uses the parameter-raising identity d/dx J_n^(a,a) = (n + 2a + 1)/2 *
    J_{n-1}^(a+1,a+1), applied once or twice.
    """
    mu = validate_mu(mu)
    x = _check_x(x)
    if order == 1:
        if n < 1:
            raise ValueError("order-1 derivative needs degree n >= 1")
        out = 0.5 * (n + 2.0 * mu + 1.0) * _sym_jacobi(mu + 1.0, n - 1, x)
    elif order == 2:
        if n < 2:
            raise ValueError("order-2 derivative needs degree n >= 2")
        c = 0.25 * (n + 2.0 * mu + 1.0) * (n + 2.0 * mu + 2.0)
        out = c * _sym_jacobi(mu + 2.0, n - 2, x)
    else:
        raise ValueError("order must be 1 or 2")
    return out if out.shape else float(out)


def _bisect(fn, lo: float, hi: float, iters: int = 200) -> float:
    """Plain bisection on a bracketed sign change of fn."""
    flo = fn(lo)
    if flo == 0.0:
        return lo
    if flo * fn(hi) > 0.0:
        raise QuadratureError("bisection fallback called without a sign change")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if fm == 0.0 or hi - lo < 4e-16:
            return mid
        if flo * fm < 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def glj_nodes(mu: float, n: int) -> np.ndarray:
    """Gauss-Lobatto-Jacobi nodes: -1, 1 and the n-1 interior zeros of J_n'.

    Newton iteration from Chebyshev-Gauss-Lobatto guesses cos(pi j / n),
    with a bisection fallback on bracketed sign changes if Newton stalls.
    The returned array is strictly increasing and exactly antisymmetric.
    """
    mu = validate_mu(mu)
    if n < 2:
        raise ValueError("need degree n >= 2")

    def g(x):
        return jacobi_deriv(mu, n, x, 1)

    def gp(x):
        return jacobi_deriv(mu, n, x, 2)

    x = np.cos(np.pi * np.arange(n - 1, 0, -1) / n)
    converged = False
    for _ in range(_NODE_MAX_ITERS):
        dx = g(x) / gp(x)
        x -= dx
        np.clip(x, -1.0, 1.0, out=x)
        if np.max(np.abs(dx)) < _NODE_TOL:
            converged = True
            break
    if not converged or np.any(np.diff(x) <= 0.0):
        # Newton stalled or roots collided; rebracket from a fine sampling.
        grid = np.cos(np.pi * np.arange(8 * n, -1, -1) / (8 * n))
        vals = g(grid)
        idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
        if idx.size != n - 1:
            raise QuadratureError(f"node search failed for mu={mu}, n={n}")
        x = np.array([_bisect(lambda t: float(g(t)), grid[i], grid[i + 1]) for i in idx])

    x = 0.5 * (x - x[::-1])  # even weight: enforce exact antisymmetry
    resid = np.abs(g(x))
    scale = np.maximum(1.0, np.abs(gp(x)))
    if np.any(resid > 1e-13 * scale):
        raise QuadratureError(f"node residual too large for mu={mu}, n={n}")
    return np.concatenate(([-1.0], x, [1.0]))


def glj_weights(mu: float, nodes: np.ndarray) -> np.ndarray:
    """Unique weights making the Lobatto rule exact on P_{2N-1} against w.

    Determined by the moment conditions sum_j w_j J_k(x_j) = m0 * delta_{k0},
    k = 0..N (exactness on P_N in the orthogonal basis; the node choice then
    gives 2N-1).  Verified post-construction against the monomial moment
    oracle up to degree 2N-1; failure signals ill-conditioning or bad nodes.
    """
    mu = validate_mu(mu)
    nodes = np.asarray(nodes, dtype=float)
    n = nodes.size - 1
    vand = _jacobi_rows(mu, n, nodes)
    rhs = np.zeros(n + 1)
    rhs[0] = weight_moment(mu, 0)
    w = linalg.lu_solve(linalg.lu_factor(vand), rhs)

    if np.any(w <= 0.0):
        raise QuadratureError(f"nonpositive quadrature weight for mu={mu}, n={n}")
    p = np.ones_like(nodes)
    worst = 0.0
    for k in range(2 * n):
        m = weight_moment(mu, k)
        scale = m if k % 2 == 0 else weight_moment(mu, k - 1)
        worst = max(worst, abs(w @ p - m) / scale)
        p *= nodes
    if worst > _WEIGHT_VERIFY_TOL:
        raise QuadratureError(
            f"weight verification failed for mu={mu}, n={n}: rel err {worst:.3e}"
        )
    return w


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Lobatto-Jacobi rule: N+1 nodes in [-1, 1] and positive weights."""

    mu: float
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n(self) -> int:
        return self.nodes.size - 1

    def integrate(self, values) -> float:
        return float(self.weights @ np.asarray(values, dtype=float))


@lru_cache(maxsize=64)
def glj_rule(mu: float, n: int) -> QuadratureRule:
    """Build (and cache) the N+1 point Gauss-Lobatto-Jacobi rule."""
    nodes = glj_nodes(mu, n)
    weights = glj_weights(mu, nodes)
    for a in (nodes, weights):
        a.setflags(write=False)
    return QuadratureRule(mu=float(mu), nodes=nodes, weights=weights)


def _bary_weights(nodes: np.ndarray) -> np.ndarray:
    # factors scaled by 2 (inverse capacity of [-1,1]) so products stay in range
    diff = 2.0 * (nodes[:, None] - nodes[None, :])
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=1)


def diff_matrices(nodes: np.ndarray, bary: np.ndarray | None = None):
    """Nodal differentiation matrices (d1[i, j] = psi_j'(x_i), d2 = d1 @ d1).

    Barycentric form with the negative-sum diagonal, so d1 annihilates
    constants exactly; the product form for d2 is exact on polynomials.
    """
    nodes = np.asarray(nodes, dtype=float)
    if bary is None:
        bary = _bary_weights(nodes)
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    d1 = (bary[None, :] / bary[:, None]) / diff
    np.fill_diagonal(d1, 0.0)
    np.fill_diagonal(d1, -d1.sum(axis=1))
    return d1, d1 @ d1


def aux_matrix(mu: float, nodes: np.ndarray, d1: np.ndarray) -> np.ndarray:
    """Nodal values of the weight-derivative auxiliary functions.

    Column j holds 2 x mu psi_j(x) / (1 - x^2) sampled at the nodes, for the
    interior basis functions j = 1..N-1.  Interior rows vanish off the
    diagonal; the diagonal is 2 x_j mu / (1 - x_j^2).  At the endpoints the
    value equals -mu psi_j'(+-1) (write psi_j = (1-x^2) q; then the column
    function is 2 x mu q(x) and psi_j'(+-1) = -(+-2) q(+-1)).
    """
    mu = validate_mu(mu)
    nodes = np.asarray(nodes, dtype=float)
    n = nodes.size - 1
    psi = np.zeros((n + 1, n - 1))
    xj = nodes[1:n]
    cols = np.arange(n - 1)
    psi[1 + cols, cols] = 2.0 * xj * mu / (1.0 - xj * xj)
    psi[0, :] = -mu * d1[0, 1:n]
    psi[n, :] = -mu * d1[n, 1:n]
    return psi


@dataclass(frozen=True)
class JacobiBasis:
    """Degree-N nodal basis on the Gauss-Lobatto-Jacobi points.

    Immutable after construction (arrays are read-only), so instances can be
    shared freely across threads and cached.
    """

    mu: float
    n: int
    rule: QuadratureRule
    bary: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    psi: np.ndarray
    jn_at_nodes: np.ndarray

    @property
    def nodes(self) -> np.ndarray:
        return self.rule.nodes

    @property
    def weights(self) -> np.ndarray:
        return self.rule.weights


def _build_basis(mu: float, n: int) -> JacobiBasis:
    rule = glj_rule(mu, n)
    bary = _bary_weights(rule.nodes)
    d1, d2 = diff_matrices(rule.nodes, bary)
    psi = aux_matrix(mu, rule.nodes, d1)
    jn = np.asarray(jacobi_eval(mu, n, rule.nodes))
    for a in (bary, d1, d2, psi, jn):
        a.setflags(write=False)
    return JacobiBasis(
        mu=float(mu), n=n, rule=rule, bary=bary, d1=d1, d2=d2, psi=psi, jn_at_nodes=jn
    )


build_basis = lru_cache(maxsize=32)(_build_basis)


def nodal_eval(basis: JacobiBasis, values, x, deriv: int = 0) -> np.ndarray:
    """Evaluate the nodal interpolant of ``values`` (and derivatives) at x.

    Second-form barycentric evaluation; derivative quotients follow the
    Schneider-Werner recurrence.  Points within 1e-12 of a node take the
    analytic limit (nodal value / differentiation-matrix rows).
    """
    if deriv not in (0, 1, 2):
        raise ValueError("deriv must be 0, 1 or 2")
    values = np.asarray(values, dtype=float)
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    nodes, bary = basis.nodes, basis.bary

    d = x[:, None] - nodes[None, :]
    hit = np.abs(d) < _HIT_TOL
    is_hit = hit.any(axis=1)
    dsafe = np.where(hit, 1.0, d)
    beta = bary[None, :] / dsafe
    denom = beta.sum(axis=1)

    p0 = (beta @ values) / denom
    out = [p0]
    if deriv >= 1:
        q1 = (p0[:, None] - values[None, :]) / dsafe
        p1 = (beta * q1).sum(axis=1) / denom
        out.append(p1)
    if deriv >= 2:
        q2 = (p1[:, None] - q1) / dsafe
        p2 = 2.0 * (beta * q2).sum(axis=1) / denom
        out.append(p2)

    if np.any(is_hit):
        rows = np.nonzero(is_hit)[0]
        cols = hit[rows].argmax(axis=1)
        out[0][rows] = values[cols]
        if deriv >= 1:
            out[1][rows] = basis.d1[cols] @ values
        if deriv >= 2:
            out[2][rows] = basis.d2[cols] @ values

    res = out[deriv]
    return float(res[0]) if scalar else res


def nodal_basis_eval(basis: JacobiBasis, j: int, x, deriv: int = 0):
    """psi_j(x) or psi_j'(x): the Kronecker nodal basis evaluated off-grid."""
    if not 0 <= j <= basis.n:
        raise ValueError(f"basis index {j} out of range 0..{basis.n}")
    if deriv not in (0, 1):
        raise ValueError("deriv must be 0 or 1")
    unit = np.zeros(basis.n + 1)
    unit[j] = 1.0
    return nodal_eval(basis, unit, x, deriv)
