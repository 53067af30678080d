"""G-NI assembly of the coefficient ODE system and its vector field.

The unknowns are the interior nodal values eta_1..eta_{N-1}, u_1..u_{N-1};
boundary values are Dirichlet data and enter the right-hand side.  With K
the diagonal of quadrature weights, D1/D2 the nodal differentiation
matrices and Psi the auxiliary matrix (all in physical scaling), the test
matrix against interior basis functions is

    G = (D1[:, 1:N] - Psi)^T K,

and the weak second/third derivative blocks are B = G @ D1, B2 = G @ D2,
where the row sums run over ALL quadrature nodes including the endpoints
(the integrals reduce exactly to those full sums after one integration by
parts).  The system reads

    (W + b B) eta' = -(K D1) u - (coupling from boundary data) + G (eta.u)
    (W + d B) u'   = -(K D1 + |c| B2) eta + G (u.u/2) + (boundary data),

with W the interior weight diagonal.  ``gamma_rhs`` carries every
boundary-data contribution; interior blocks are factored once at assembly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .jacobi import JacobiBasis
from .model import BoundaryData, IntervalMap, SystemParams

# incremented on every assemble() call; lets tests pin "assembled once" reuse
assembly_count = 0


@dataclass(frozen=True)
class BoundaryValues:
    """Snapshot of the Dirichlet data and its time derivatives at one time."""

    eta_left: float = 0.0
    eta_right: float = 0.0
    u_left: float = 0.0
    u_right: float = 0.0
    deta_left: float = 0.0
    deta_right: float = 0.0
    du_left: float = 0.0
    du_right: float = 0.0

    @staticmethod
    def at_time(data: BoundaryData, t: float) -> "BoundaryValues":
        return BoundaryValues(
            eta_left=float(data.eta_left(t)),
            eta_right=float(data.eta_right(t)),
            u_left=float(data.u_left(t)),
            u_right=float(data.u_right(t)),
            deta_left=float(data.deta_left(t)),
            deta_right=float(data.deta_right(t)),
            du_left=float(data.du_left(t)),
            du_right=float(data.du_right(t)),
        )


@dataclass(frozen=True)
class State:
    """Interior nodal coefficients at time t plus the boundary snapshot."""

    eta: np.ndarray
    u: np.ndarray
    t: float
    bc: BoundaryValues

    def with_vector(self, y: np.ndarray, t: float, bc: BoundaryValues) -> "State":
        m = self.eta.size
        return State(eta=y[:m], u=y[m:], t=t, bc=bc)

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.eta, self.u])

    def eta_full(self) -> np.ndarray:
        return np.concatenate([[self.bc.eta_left], self.eta, [self.bc.eta_right]])

    def u_full(self) -> np.ndarray:
        return np.concatenate([[self.bc.u_left], self.u, [self.bc.u_right]])


@dataclass(frozen=True)
class AssembledSystem:
    """Constant blocks of the coefficient ODE system, assembled once.

    All blocks are in physical scaling: weights carry one factor of the
    interval scale, each differentiation order divides by it.  Immutable;
    reuse across the whole time integration.
    """

    basis: JacobiBasis
    params: SystemParams
    imap: IntervalMap
    w_int: np.ndarray            # interior physical quadrature weights
    d1_phys: np.ndarray          # full (N+1)^2 physical differentiation matrix
    lhs_eta: linalg.LuFactorization
    lhs_u: linalg.LuFactorization
    adv_int: np.ndarray          # (K D1) interior block
    stiff_u_int: np.ndarray      # (K D1 + |c| B2) interior block
    grad_test: np.ndarray        # G restricted to interior columns
    # boundary columns (left, right) of the corresponding full blocks:
    mass_cols: np.ndarray        # B[:, (0, N)]
    adv_cols: np.ndarray         # (K D1)[:, (0, N)]
    stiff_cols: np.ndarray       # |c| B2[:, (0, N)]
    grad_cols: np.ndarray        # G[:, (0, N)]

    @property
    def n(self) -> int:
        return self.basis.n


def _physical_blocks(basis: JacobiBasis, imap: IntervalMap):
    s = imap.scale
    w = s * basis.weights
    d1 = basis.d1 / s
    d2 = basis.d2 / (s * s)
    psi = basis.psi / s
    return w, d1, d2, psi


def assemble(basis: JacobiBasis, params: SystemParams, imap: IntervalMap,
             force_general: bool = False) -> AssembledSystem:
    """Build and factor the constant blocks of the semidiscrete system.

    The eta-equation mass uses coefficient b, the u-equation mass uses d.
    For mu = 0 the auxiliary matrix vanishes and its products are skipped
    unless ``force_general`` keeps the general path (testing hook).
    """
    global assembly_count
    assembly_count += 1

    n = basis.n
    w, d1, d2, psi = _physical_blocks(basis, imap)
    interior = slice(1, n)

    d1_int_cols = d1[:, interior]                      # (N+1, N-1)
    if basis.mu == 0.0 and not force_general:
        gfull = d1_int_cols.T * w[None, :]
    else:
        gfull = (d1_int_cols - psi).T * w[None, :]     # G, (N-1, N+1)
    bfull = gfull @ d1                                  # weak 2nd derivative block
    b2full = gfull @ d2                                 # weak 3rd derivative block

    w_int = w[interior]
    kd1 = w_int[:, None] * d1[interior, :]              # (K D1) interior rows
    absc = abs(params.c)

    lhs_eta = np.diag(w_int) + params.b * bfull[:, interior]
    lhs_u = np.diag(w_int) + params.d * bfull[:, interior]
    stiff_u = kd1[:, interior] + absc * b2full[:, interior]

    edge = [0, n]
    sys = AssembledSystem(
        basis=basis,
        params=params,
        imap=imap,
        w_int=w_int,
        d1_phys=d1,
        lhs_eta=linalg.lu_factor(lhs_eta),
        lhs_u=linalg.lu_factor(lhs_u),
        adv_int=kd1[:, interior],
        stiff_u_int=stiff_u,
        grad_test=gfull[:, interior],
        mass_cols=bfull[:, edge],
        adv_cols=kd1[:, edge],
        stiff_cols=absc * b2full[:, edge],
        grad_cols=gfull[:, edge],
    )
    return sys


def gamma_rhs(sys: AssembledSystem, state: State):
    """Boundary-data contributions to the right-hand sides of both equations.

    Collects, per equation: the mixed-derivative mass columns against the
    boundary time derivatives, the advection columns against the opposite
    component's boundary values, the weak third-derivative columns against
    eta (u equation only), and the nonlinear edge products eta*u and u^2/2
    hitting the boundary columns of the gradient-test matrix.
    """
    bc = state.bc
    p = sys.params
    edge_eta = np.array([bc.eta_left, bc.eta_right])
    edge_u = np.array([bc.u_left, bc.u_right])
    edge_deta = np.array([bc.deta_left, bc.deta_right])
    edge_du = np.array([bc.du_left, bc.du_right])

    gamma1 = (
        -p.b * (sys.mass_cols @ edge_deta)
        - sys.adv_cols @ edge_u
        + sys.grad_cols @ (edge_eta * edge_u)
    )
    gamma2 = (
        -p.d * (sys.mass_cols @ edge_du)
        - sys.adv_cols @ edge_eta
        - sys.stiff_cols @ edge_eta
        + sys.grad_cols @ (0.5 * edge_u * edge_u)
    )
    return gamma1, gamma2


def rhs_eval(sys: AssembledSystem, state: State):
    """Semidiscrete vector field: solve the factored mass systems for
    (eta'(t), u'(t)) given the current interior state and boundary snapshot."""
    eta, u = state.eta, state.u
    gamma1, gamma2 = gamma_rhs(sys, state)
    rhs1 = -(sys.adv_int @ u) + sys.grad_test @ (eta * u) + gamma1
    rhs2 = -(sys.stiff_u_int @ eta) + sys.grad_test @ (0.5 * u * u) + gamma2
    deta = linalg.lu_solve(sys.lhs_eta, rhs1)
    du = linalg.lu_solve(sys.lhs_u, rhs2)
    if not (np.all(np.isfinite(deta)) and np.all(np.isfinite(du))):
        raise FloatingPointError(
            f"semidiscrete vector field produced non-finite values at t={state.t}"
        )
    return deta, du


def initial_state(basis: JacobiBasis, imap: IntervalMap, eta_init, u_init,
                  bdata: BoundaryData) -> State:
    """Collocate the initial data at the mapped quadrature nodes."""
    x = imap.to_physical(basis.nodes)
    eta = np.asarray(eta_init(x), dtype=float)
    u = np.asarray(u_init(x), dtype=float)
    return State(
        eta=eta[1:-1].copy(),
        u=u[1:-1].copy(),
        t=0.0,
        bc=BoundaryValues.at_time(bdata, 0.0),
    )


def make_vector_field(sys: AssembledSystem, bdata: BoundaryData):
    """Wrap the assembled system as F(t, y) on the stacked interior vector."""
    m = sys.n - 1

    def field(t: float, y: np.ndarray) -> np.ndarray:
        bc = BoundaryValues.at_time(bdata, t)
        state = State(eta=y[:m], u=y[m:], t=t, bc=bc)
        deta, du = rhs_eval(sys, state)
        return np.concatenate([deta, du])

    return field
