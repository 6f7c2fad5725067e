"""Weyl function and Weyl solution, by direct evaluation and by pole series.

The boundary trace M(lambda) has simple poles exactly at the eigenvalues
with residues 1/alpha_n, giving the partial-fraction representation checked
here against the direct boundary-value formula.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PoleError
from .model import ProblemConfig
from . import charfn, integrator

_POLE_GUARD = 1e-8


@dataclass(frozen=True)
class WeylSample:
    """One Weyl-function evaluation with its consistency record."""

    lam: complex
    m_direct: complex
    m_series: complex
    series_terms: int
    identity_defect: float


def _direct_from_psi(config: ProblemConfig, lam, psi_ys):
    b = config.boundary
    numer = b.b4 * psi_ys[0, 0] + b.b3 * psi_ys[0, 1]
    dval = charfn.u1_form(config, lam, psi_ys[0, 0], psi_ys[0, 1])
    if abs(dval) <= _POLE_GUARD:
        return complex("nan"), dval
    return -numer / (b.k1 * dval), dval


def _nearest_root_estimate(config: ProblemConfig, lam, dval) -> complex:
    # one Newton step from lam; adequate for an error message
    try:
        ddot = charfn.delta_dot(config, lam)
        if ddot != 0:
            return complex(lam - dval / ddot)
    except Exception:
        pass
    return complex(lam)


def weyl_direct(config: ProblemConfig, lam) -> complex:
    """Boundary trace of the Weyl solution at lambda (off the spectrum)."""
    lam = complex(lam)
    psi_t = integrator.psi(config, lam)
    m, dval = _direct_from_psi(config, lam, psi_t.ys)
    if abs(dval) <= _POLE_GUARD:
        raise PoleError(lam, nearest=_nearest_root_estimate(config, lam, dval))
    return complex(m)


def weyl_series(config: ProblemConfig, lam, data) -> complex:
    """Symmetric partial sum of the pole expansion over the supplied data."""
    if len(data) == 0:
        raise ValueError("empty spectral data set")
    lam = complex(lam)
    lams = np.array([d.lambda_n for d in data])
    alphas = np.array([d.alpha_n for d in data])
    gaps = lam - lams
    if np.any(np.abs(gaps) < 1e-12):
        raise PoleError(lam, nearest=float(lams[np.argmin(np.abs(gaps))]))
    # accumulate from the outermost indices inward: pairs at +-n nearly cancel
    order = np.argsort(-np.abs(lams))
    return complex(np.sum(1.0 / (alphas[order] * gaps[order])))


def weyl_solution(config: ProblemConfig, lam):
    """Weyl solution trajectory and the defect of its two representations.

    Returns ``(trajectory, identity_defect)`` where the defect is the
    max-norm over the grid of the difference between psi/Delta and
    C + M*phi, both computed independently.
    """
    lam = complex(lam)
    psi_t = integrator.psi(config, lam)
    m, dval = _direct_from_psi(config, lam, psi_t.ys)
    if abs(dval) <= _POLE_GUARD:
        raise PoleError(lam, nearest=_nearest_root_estimate(config, lam, dval))
    phi_w = psi_t.ys / dval

    phi_t = integrator.phi(config, lam)
    c_t = integrator.solution_c(config, lam)
    alt = c_t.ys + m * phi_t.ys
    defect = float(np.max(np.abs(phi_w - alt)))
    traj = integrator.Trajectory(lam=lam, xs=psi_t.xs, ys=phi_w,
                                 index_a=psi_t.index_a)
    return traj, defect


def weyl_sample(config: ProblemConfig, lam, data=None) -> WeylSample:
    """Full evaluation record; the series column is NaN without data."""
    lam = complex(lam)
    traj, defect = weyl_solution(config, lam)
    m_direct = weyl_direct(config, lam)
    if data is not None and len(data):
        m_series = weyl_series(config, lam, data)
        terms = len(data)
    else:
        m_series = complex(np.nan, np.nan)
        terms = 0
    return WeylSample(lam=lam, m_direct=m_direct, m_series=m_series,
                      series_terms=terms, identity_defect=defect)


def residue_check(config: ProblemConfig, datum) -> float:
    """Relative defect of the numerical residue at an eigenvalue vs 1/alpha_n."""
    lam_n = datum.lambda_n
    radius = 1e-3
    points = lam_n + radius * np.exp(1j * np.array([0.0, 0.5, 1.0, 1.5]) * np.pi)
    vals = [complex((p - lam_n) * weyl_direct(config, p)) for p in points]
    estimate = np.mean(vals)
    target = 1.0 / datum.alpha_n
    return float(abs(estimate - target) / abs(target))
