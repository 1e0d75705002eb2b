r"""Independent finite-difference Newton oracle for the impermeable BVP.

A deliberately separate discretization of

.. math::
    \kappa\Bigl(\rho_{rr} + \frac{n-1}{r}\rho_r\Bigr) = h(\rho) - h(\rho_+),
    \qquad \rho_r(1) = \rho_b, \quad \rho(R) = \rho_+,

used to cross-check the Green-kernel fixed-point solver: uniform grid,
second-order central stencils (Neumann data eliminated through a ghost
node), and damped-free Newton with direct tridiagonal elimination.  The
only code shared with the kernel solver is the enthalpy and the parameter
container.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import solve_banded

from .errors import ConfigError, NewtonDivergenceError, PositivityError
from .grid import EXPONENTIAL, auto_r_max, build_grid
from .kernel import ModelParams, enthalpy_h, enthalpy_h_prime
from .impermeable import solve_impermeable

__all__ = ["fd_nodes", "solve_fd", "cross_validate"]


def fd_nodes(node_count: int, R_max: float) -> np.ndarray:
    return np.linspace(1.0, R_max, node_count)


def solve_fd(
    params: ModelParams,
    node_count: int,
    R_max: float,
    newton_tol: float = 1e-12,
    max_newton: int = 60,
) -> np.ndarray:
    """Density samples on ``fd_nodes(node_count, R_max)``.

    Newton on the central-difference discretization; the initial guess is
    the flat-space lifting ``rho_+ - (rho_b/beta) e^{-beta(r-1)}`` with
    ``beta = sqrt(h'(rho_+)/kappa)``, computed inline to keep this solver
    independent of the kernel module.
    """
    if params.u_minus != 0.0:
        raise ConfigError("oracle covers the impermeable problem only (u_minus = 0)")
    if node_count < 100:
        raise ConfigError("node_count must be at least 100")
    r = fd_nodes(node_count, R_max)
    h = r[1] - r[0]
    kappa = params.kappa
    gamma = params.gamma
    rp = params.rho_plus
    h_plus = enthalpy_h(gamma, rp)

    beta = math.sqrt(enthalpy_h_prime(gamma, rp) / kappa)
    rho = rp - (params.rho_b / beta) * np.exp(-beta * (r - 1.0))
    if np.any(rho <= 0.0):
        raise PositivityError("initial guess not positive; boundary data too large")

    M = node_count
    inv_h2 = 1.0 / h**2
    drift = (params.n - 1) / r
    last_res = np.inf
    for _ in range(max_newton):
        F = np.empty(M)
        # interior rows: central second and first differences
        F[1:-1] = kappa * (
            (rho[:-2] - 2.0 * rho[1:-1] + rho[2:]) * inv_h2
            + drift[1:-1] * (rho[2:] - rho[:-2]) / (2.0 * h)
        ) - (enthalpy_h(gamma, rho[1:-1]) - h_plus)
        # wall row: ghost node eliminated via rho_r(1) = rho_b
        F[0] = kappa * (
            (2.0 * rho[1] - 2.0 * rho[0] - 2.0 * h * params.rho_b) * inv_h2
            + drift[0] * params.rho_b
        ) - (enthalpy_h(gamma, rho[0]) - h_plus)
        F[-1] = rho[-1] - rp

        res = float(np.max(np.abs(F)))
        if res <= newton_tol:
            return rho
        if not np.isfinite(res) or res > 10.0 * last_res + newton_tol:
            raise NewtonDivergenceError(f"Newton residual grew to {res:.3e}")
        last_res = max(res, newton_tol)

        # banded Jacobian: (1,1) tridiagonal
        ab = np.zeros((3, M))
        ab[0, 2:] = kappa * (inv_h2 + drift[1:-1] / (2.0 * h))  # superdiag
        ab[1, 1:-1] = -2.0 * kappa * inv_h2 - enthalpy_h_prime(gamma, rho[1:-1])
        ab[2, :-2] = kappa * (inv_h2 - drift[1:-1] / (2.0 * h))  # subdiag
        ab[0, 1] = 2.0 * kappa * inv_h2
        ab[1, 0] = -2.0 * kappa * inv_h2 - enthalpy_h_prime(gamma, rho[0])
        ab[1, -1] = 1.0
        ab[2, -2] = 0.0
        step = solve_banded((1, 1), ab, -F)
        rho = rho + step
        if np.any(rho <= 0.0):
            raise PositivityError("Newton iterate lost positivity")
        if np.max(np.abs(step)) <= 1e-14 * max(1.0, float(np.max(np.abs(rho)))):
            # residual sits at its roundoff floor (~eps/h^2); the iterate is done
            return rho
    raise NewtonDivergenceError(f"no convergence in {max_newton} Newton steps (residual {res:.3e})")


def _fd_resolution(alpha: float, rho_b: float, R_max: float, tol: float) -> int:
    """Uniform spacing so the O(h^2) stencil error sits below ``tol/3``.

    The error constant is the fourth derivative of the solution; with the
    ``e^{-alpha(r-1)} r^{-(n-1)/2}`` profile of amplitude ``|rho_b|/alpha``
    it is bounded by ``(alpha+2)^4 |rho_b| / max(alpha, 1)`` (the ``+2``
    absorbs the algebraic-prefactor derivatives that dominate at small
    alpha).
    """
    amp = max(abs(rho_b), 1e-8)
    c4 = (alpha + 2.0) ** 4 * amp / max(alpha, 1.0)
    h = 2.0 * math.sqrt(tol / c4)
    h = min(h, 0.01)
    count = int(math.ceil((R_max - 1.0) / h)) + 1
    return min(max(count, 2000), 1_000_000)


def cross_validate(
    params: ModelParams,
    tol: float,
    node_count: int | None = None,
    points_per_unit_alpha: float = 24.0,
    backend: str = "auto",
):
    """Run both impermeable solvers and compare on the kernel solver's grid.

    Returns ``(sup_diff, passed)`` with ``passed = sup_diff <= tol``.
    """
    alpha = math.sqrt(enthalpy_h_prime(params.gamma, params.rho_plus) / params.kappa)
    grid = build_grid(
        params.n, alpha, points_per_unit_alpha=points_per_unit_alpha, decay=EXPONENTIAL, growth=1.04
    )
    field, report = solve_impermeable(params, grid, tol=1e-12, max_iter=400, backend=backend)
    R_max = auto_r_max(params.n, alpha, EXPONENTIAL)
    if node_count is None:
        node_count = _fd_resolution(alpha, params.rho_b, R_max, tol)
    rho_fd = solve_fd(params, node_count, R_max, newton_tol=1e-10)
    rho_fd_on_grid = CubicSpline(fd_nodes(node_count, R_max), rho_fd)(grid.nodes)
    sup_diff = float(np.max(np.abs((params.rho_plus + field.phi) - rho_fd_on_grid)))
    return sup_diff, bool(sup_diff <= tol)
