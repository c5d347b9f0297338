"""Gibbs-measure thermodynamics of the chain and the dispersion scale factor.

The canonical bond distribution is w(y) = exp(-(y^2/2 + beta y^4/4)/theta).
Given the energy density the temperature theta follows from

    theta/2 + <y^2>/2 + beta <y^4>/4 = edensity

(equipartition of kinetic energy plus the mean bond energy), and the
renormalization of the bare dispersion is eta = sqrt(theta / <y^2>).
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad


@dataclass(frozen=True)
class ThermoSolution:
    """All equilibrium scalars for one (beta, edensity) point."""
    beta: float
    edensity: float
    theta: float
    y2: float
    y4: float
    eta: float
    eta_sc: float
    a_coef: float
    b_coef: float
    ae: float
    ae_tilde: float


def _quad_checked(f, a, b, points=None):
    val, err = quad(f, a, b, epsabs=0.0, epsrel=1e-12, limit=300,
                    points=points)
    if val != 0.0 and err / abs(val) > 1e-10:
        raise RuntimeError("bond-moment quadrature did not reach 1e-10 "
                           "relative accuracy (got %g)" % (err / abs(val)))
    return val


def bond_moments(beta, theta):
    """(<y^2>, <y^4>, Z_y) under w(y) = exp(-(y^2/2 + beta y^4/4)/theta).

    beta = 0 is the Gaussian case and is returned in closed form so the
    harmonic limits are exact.
    """
    if theta <= 0:
        raise ValueError("theta must be positive")
    if beta < 0:
        raise ValueError("beta must be non-negative")
    if beta == 0.0:
        return theta, 3.0 * theta ** 2, np.sqrt(2.0 * np.pi * theta)

    cut = 12.0 * max(np.sqrt(theta), (4.0 * theta / beta) ** 0.25)
    scale = min(np.sqrt(theta), (4.0 * theta / beta) ** 0.25)

    def w(y):
        return np.exp(-(0.5 * y * y + 0.25 * beta * y ** 4) / theta)

    pts = (scale, 4.0 * scale) if 4.0 * scale < cut else (scale,)
    z = 2.0 * _quad_checked(w, 0.0, cut, points=pts)
    m2 = 2.0 * _quad_checked(lambda y: y * y * w(y), 0.0, cut, points=pts)
    m4 = 2.0 * _quad_checked(lambda y: y ** 4 * w(y), 0.0, cut, points=pts)
    return m2 / z, m4 / z, z


def solve_temperature(beta, edensity):
    """Temperature with mean energy density `edensity`, by bisection.

    The per-site energy theta/2 + <y^2>/2 + beta <y^4>/4 is strictly
    increasing in theta, zero at theta = 0, and exceeds edensity at
    theta = 2 edensity, so the root is bracketed by (0, 2 edensity).
    """
    if edensity <= 0:
        raise ValueError("edensity must be positive")
    if beta == 0.0:
        return edensity

    def mean_energy(theta):
        y2, y4, _ = bond_moments(beta, theta)
        return 0.5 * theta + 0.5 * y2 + 0.25 * beta * y4

    lo, hi = 0.0, 2.0 * edensity
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mean_energy(mid) < edensity:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * mid:
            break
    return 0.5 * (lo + hi)


def eta_exact(beta, edensity):
    """Dispersion scale factor eta = sqrt(theta / <y^2>) at equilibrium."""
    theta = solve_temperature(beta, edensity)
    y2, _, _ = bond_moments(beta, theta)
    return float(np.sqrt(theta / y2))


def eta_selfconsistent(beta, edensity):
    """Closed-form approximation eta_sc and its coefficients (A, B).

    eta_sc^2 = (A + sqrt(A^2 + 4B)) / 2 with A = 1 + (3 beta / 2) <y^2>
    and B = (3 beta / 2) theta. Quartic correlations are factorized
    Gaussian-style, so eta_sc tracks eta from below/above at the few-percent
    level through the crossover.
    """
    theta = solve_temperature(beta, edensity)
    y2, _, _ = bond_moments(beta, theta)
    a = 1.0 + 1.5 * beta * y2
    b = 1.5 * beta * theta
    eta_sc = np.sqrt(0.5 * (a + np.sqrt(a * a + 4.0 * b)))
    return float(eta_sc), float(a), float(b)


def effective_nonlinearity(beta, edensity):
    """Strength measures (ae, ae_tilde) of the quartic term at equilibrium.

    ae is the mean quartic-to-quadratic energy ratio <H4>/<H2>; it grows to
    1/2 in the strong-coupling limit. ae_tilde = |edensity - theta| / theta
    compares the same energies after the wave renormalization has absorbed
    most of the quartic term (the renormalized quadratic energy per site is
    theta); it saturates near 1/4 and stays below ae for all beta > 0.
    """
    theta = solve_temperature(beta, edensity)
    y2, y4, _ = bond_moments(beta, theta)
    h2 = 0.5 * theta + 0.5 * y2
    h4 = 0.25 * beta * y4
    ae = h4 / h2
    ae_tilde = abs(edensity - theta) / theta
    return float(ae), float(ae_tilde)


def thermo_solution(beta, edensity):
    """Solve the full equilibrium description once and package it."""
    theta = solve_temperature(beta, edensity)
    y2, y4, _ = bond_moments(beta, theta)
    eta = float(np.sqrt(theta / y2))
    a = 1.0 + 1.5 * beta * y2
    b = 1.5 * beta * theta
    eta_sc = float(np.sqrt(0.5 * (a + np.sqrt(a * a + 4.0 * b))))
    h2 = 0.5 * theta + 0.5 * y2
    h4 = 0.25 * beta * y4
    sol = ThermoSolution(
        beta=float(beta), edensity=float(edensity), theta=float(theta),
        y2=float(y2), y4=float(y4), eta=eta, eta_sc=eta_sc,
        a_coef=float(a), b_coef=float(b),
        ae=float(h4 / h2), ae_tilde=float(abs(edensity - theta) / theta))
    if not (0.0 < sol.theta < 2.0 * sol.edensity):
        raise RuntimeError("temperature left its bracket")
    if sol.eta < 1.0 - 1e-12 or sol.eta_sc < 1.0 - 1e-12:
        raise RuntimeError("dispersion scale factor fell below 1")
    return sol
