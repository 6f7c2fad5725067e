"""Real eigenvalue location, norming constants, and spectral identities.

Roots of the characteristic function are bracketed around closed-form
asymptotic seeds and refined by batched bisection with a secant polish; all
heavy evaluations run as single batched propagations.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np
from scipy.integrate import simpson

from .errors import MissingRootError, NonProportionalError
from .model import PI, ProblemConfig, config_fingerprint, mu
from . import charfn, expansion, integrator

_DEDUP_TOL = 1e-8
_SIMPLE_TOL = 1e-6
_PROP_RESIDUAL_TOL = 1e-5


@dataclass(frozen=True)
class SpectralDatum:
    """One eigenvalue with its norming constant and companion quantities."""

    n: int
    lambda_n: float
    alpha_n: float
    beta_n: float
    delta_dot_n: float
    seed_gap: float
    simple: bool = True


@dataclass(frozen=True)
class SpectralDataSet:
    """Ordered eigenvalue records for a contiguous index range."""

    fingerprint: str
    data: Tuple[SpectralDatum, ...]

    def __post_init__(self):
        lams = [d.lambda_n for d in self.data]
        if any(b - a <= _DEDUP_TOL for a, b in zip(lams, lams[1:])):
            raise ValueError("eigenvalues must be strictly increasing")

    def __len__(self):
        return len(self.data)

    def __iter__(self):
        return iter(self.data)

    def __getitem__(self, i):
        return self.data[i]

    def by_index(self, n: int) -> SpectralDatum:
        for d in self.data:
            if d.n == n:
                return d
        raise KeyError(f"no datum with index {n}")

    def lambdas(self) -> np.ndarray:
        return np.array([d.lambda_n for d in self.data])

    def alphas(self) -> np.ndarray:
        return np.array([d.alpha_n for d in self.data])

    def to_dict(self) -> dict:
        return {
            "fingerprint": self.fingerprint,
            "data": [
                {"n": d.n, "lambda": d.lambda_n, "alpha": d.alpha_n,
                 "beta": d.beta_n, "delta_dot": d.delta_dot_n,
                 "seed_gap": d.seed_gap, "simple": d.simple}
                for d in self.data
            ],
        }

    @staticmethod
    def from_dict(doc: dict) -> "SpectralDataSet":
        data = tuple(
            SpectralDatum(n=int(r["n"]), lambda_n=float(r["lambda"]),
                          alpha_n=float(r["alpha"]), beta_n=float(r["beta"]),
                          delta_dot_n=float(r["delta_dot"]),
                          seed_gap=float(r["seed_gap"]),
                          simple=bool(r.get("simple", True)))
            for r in doc["data"]
        )
        return SpectralDataSet(fingerprint=doc["fingerprint"], data=data)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @staticmethod
    def load(path) -> "SpectralDataSet":
        with open(path, "r", encoding="utf-8") as fh:
            return SpectralDataSet.from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# Root search
# ---------------------------------------------------------------------------

def _real_delta(config: ProblemConfig, lams) -> np.ndarray:
    return np.real(charfn.delta_many(config, np.asarray(lams, dtype=float)))


def _refine_brackets(config: ProblemConfig, lo, hi, flo, iters=48):
    """Batched bisection, then two secant steps for a machine-level polish."""
    lo = np.array(lo, float)
    hi = np.array(hi, float)
    flo = np.array(flo, float)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fmid = _real_delta(config, mid)
        take_left = (flo * fmid) <= 0.0
        hi = np.where(take_left, mid, hi)
        lo = np.where(take_left, lo, mid)
        flo = np.where(take_left, flo, fmid)
    roots = 0.5 * (lo + hi)
    for _ in range(2):
        h = np.maximum(1e-9, 1e-9 * np.abs(roots))
        vals = _real_delta(config, np.concatenate([roots, roots + h]))
        f0, f1 = vals[: len(roots)], vals[len(roots):]
        slope = (f1 - f0) / h
        step = np.where(slope != 0.0, f0 / np.where(slope == 0.0, 1.0, slope), 0.0)
        roots = np.where(np.abs(step) < 1e-6, roots - step, roots)
    return roots


def find_eigenvalues(config: ProblemConfig, n_min: int, n_max: int) -> SpectralDataSet:
    """Locate eigenvalues for indices n_min..n_max and complete their data."""
    if n_min > n_max:
        raise ValueError(f"n_min = {n_min} exceeds n_max = {n_max}")
    ns = list(range(n_min, n_max + 1))
    mu_pi = mu(PI, config.weight)
    half = PI / (2.0 * mu_pi)
    seeds = np.array([charfn.asymptotic_seed(config, n) for n in ns])

    # one batched scan over all windows; small-|n| windows are widened and
    # sampled finely because the asymptotic seeds are unreliable there
    windows = []
    for n, s in zip(ns, seeds):
        w = 1.5 * half if abs(n) <= 3 else half
        k = 64 if abs(n) <= 3 else 24
        windows.append(np.linspace(s - w, s + w, k))
    flat = np.concatenate(windows)
    fvals = _real_delta(config, flat)

    lo, hi, flo = [], [], []
    missing = []
    pos = 0
    for n, pts in zip(ns, windows):
        vals = fvals[pos: pos + len(pts)]
        pos += len(pts)
        # exact-zero samples create twin brackets; deduplication removes them
        sign_change = np.where(vals[:-1] * vals[1:] <= 0.0)[0]
        if len(sign_change) == 0:
            missing.append(n)
            continue
        for j in sign_change:
            lo.append(pts[j])
            hi.append(pts[j + 1])
            flo.append(vals[j])

    roots = _refine_brackets(config, lo, hi, flo) if lo else np.array([])
    roots = np.sort(roots)
    if len(roots):
        keep = np.concatenate([[True], np.diff(roots) > _DEDUP_TOL * (1 + np.abs(roots[1:]))])
        roots = roots[keep]

    expected = len(ns)
    if len(roots) > expected:
        # widened windows can capture a neighbor's root; keep the contiguous
        # run best matching the seed ladder
        best, best_cost = 0, np.inf
        for off in range(len(roots) - expected + 1):
            cost = float(np.sum(np.abs(roots[off: off + expected] - seeds)))
            if cost < best_cost:
                best, best_cost = off, cost
        roots = roots[best: best + expected]

    if missing or len(roots) < expected:
        partial = None
        if len(roots):
            avail = [n for n in ns if n not in missing][: len(roots)]
            partial = _complete(config, avail, roots[: len(avail)],
                                np.array([charfn.asymptotic_seed(config, n) for n in avail]))
        raise MissingRootError(missing or ns[len(roots):], partial=partial)

    return _complete(config, ns, roots, seeds)


def _complete(config: ProblemConfig, ns, roots, seeds) -> SpectralDataSet:
    roots = np.asarray(roots, float)
    alphas = _alphas_batch(config, roots)
    betas, residuals = _betas_batch(config, roots)
    ddots = np.real(charfn.delta_dot_many(config, roots))
    data = []
    for i, n in enumerate(ns):
        simple = bool(abs(ddots[i]) > _SIMPLE_TOL)
        if not simple:
            warnings.warn(
                f"eigenvalue {roots[i]:.6g} (index {n}) may be non-simple: "
                f"|dDelta/dlambda| = {abs(ddots[i]):.3e}")
        data.append(SpectralDatum(
            n=n, lambda_n=float(roots[i]), alpha_n=float(alphas[i]),
            beta_n=float(betas[i]), delta_dot_n=float(ddots[i]),
            seed_gap=float(roots[i] - seeds[i]), simple=simple))
    return SpectralDataSet(fingerprint=config_fingerprint(config), data=tuple(data))


# ---------------------------------------------------------------------------
# Per-root quantities
# ---------------------------------------------------------------------------

def _alphas_batch(config: ProblemConfig, roots) -> np.ndarray:
    b = config.boundary
    xs, ys, ia = integrator.phi_many(config, np.asarray(roots, float))
    f1 = ys[:, :, 0].real
    f2 = ys[:, :, 1].real
    s = f1 ** 2 + f2 ** 2
    left = simpson(s[:, : ia + 1], x=xs[: ia + 1], axis=1)
    right = config.weight.alpha * simpson(s[:, ia:], x=xs[ia:], axis=1)
    y3 = b.b3 * f2[:, 0] + b.b4 * f1[:, 0]
    y4 = b.c3 * f2[:, -1] + b.c4 * f1[:, -1]
    return left + right + y3 ** 2 / b.k1 + y4 ** 2 / b.k2


def _betas_batch(config: ProblemConfig, roots):
    """Global least-squares ratio psi/phi over all samples and components."""
    roots = np.asarray(roots, float)
    _, phis, _ = integrator.phi_many(config, roots)
    _, psis, _ = integrator.psi_many(config, roots)
    phis = phis.real
    psis = psis.real
    num = np.sum(psis * phis, axis=(1, 2))
    den = np.sum(phis * phis, axis=(1, 2))
    betas = num / den
    resid = (np.linalg.norm(psis - betas[:, None, None] * phis, axis=(1, 2))
             / np.linalg.norm(psis, axis=(1, 2)))
    return betas, resid


def norming_constant(config: ProblemConfig, lambda_n: float) -> float:
    """Squared weighted norm of the eigen-element at a root of Delta."""
    _assert_eigenvalue(config, lambda_n)
    return float(_alphas_batch(config, [lambda_n])[0])


def beta(config: ProblemConfig, lambda_n: float) -> float:
    """Proportionality factor between the right- and left-normalized solutions."""
    betas, residuals = _betas_batch(config, [lambda_n])
    if residuals[0] > _PROP_RESIDUAL_TOL:
        raise NonProportionalError(lambda_n, float(residuals[0]))
    return float(betas[0])


def _assert_eigenvalue(config: ProblemConfig, lambda_n: float) -> None:
    _, residuals = _betas_batch(config, [lambda_n])
    if residuals[0] > _PROP_RESIDUAL_TOL:
        raise NonProportionalError(lambda_n, float(residuals[0]))


def orthogonality_check(config: ProblemConfig, data: SpectralDataSet) -> float:
    """Max normalized off-diagonal Gram entry of the eigen-elements."""
    if len(data) < 2:
        return 0.0
    elements = expansion.eigen_elements(config, [d.lambda_n for d in data])
    alphas = data.alphas()
    worst = 0.0
    for i in range(len(data)):
        for j in range(i + 1, len(data)):
            val = abs(expansion.inner(config, elements[i], elements[j]))
            worst = max(worst, val / np.sqrt(alphas[i] * alphas[j]))
    return float(worst)
