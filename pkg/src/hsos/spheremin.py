"""Deterministic minimization of a hermitian form over the unit sphere.

Multi-start projected gradient descent with Armijo backtracking (all starts
advanced as one vectorized batch), followed for n <= 3 by a coarse certified
grid pass.  The certificate uses the crude sphere Lipschitz bound
L = 2m * sum |c_ab| together with an explicit covering radius of the
(moduli, phases) parameter grid, so the reported uncertainty radius is safe
but far from tight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from . import forms
from .forms import HermitianForm


@dataclass(frozen=True)
class SphereMinResult:
    value: float
    minimizer: tuple[complex, ...]
    uncertainty: float  # radius of the certified interval; inf when not certified
    certified: bool
    converged: bool
    starts: int
    grid_points: int

    @property
    def certified_lower_bound(self) -> float:
        return self.value - self.uncertainty


def lipschitz_bound(form: HermitianForm) -> float:
    """Crude but safe Lipschitz constant of f on the sphere: 2m * sum |c_ab|."""
    return 2.0 * form.m * float(form.coefficient_l1())


class _Objective:
    """Batched f and Euclidean gradient on R^{2n} via Wirtinger derivatives."""

    def __init__(self, form: HermitianForm):
        self.n = form.n
        keys = list(form.coeffs.keys())
        self.A = np.array([k[0] for k in keys], dtype=np.int64).reshape(len(keys), form.n)
        self.B = np.array([k[1] for k in keys], dtype=np.int64).reshape(len(keys), form.n)
        self.C = np.array([complex(form.coeffs[k]) for k in keys])
        self.empty = len(keys) == 0

    def _z(self, X: np.ndarray) -> np.ndarray:
        return X[:, : self.n] + 1j * X[:, self.n :]

    def value(self, X: np.ndarray) -> np.ndarray:
        if self.empty:
            return np.zeros(X.shape[0])
        z = self._z(X)
        za = np.prod(z[:, None, :] ** self.A[None, :, :], axis=2)
        zb = np.prod(np.conj(z)[:, None, :] ** self.B[None, :, :], axis=2)
        return np.real(za * zb @ self.C)

    def value_grad(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        B_pts = X.shape[0]
        n = self.n
        if self.empty:
            return np.zeros(B_pts), np.zeros((B_pts, 2 * n))
        z = self._z(X)
        zc = np.conj(z)
        Zp = z[:, None, :] ** self.A[None, :, :]      # (B, K, n)
        Zq = zc[:, None, :] ** self.B[None, :, :]
        za = np.prod(Zp, axis=2)
        zb = np.prod(Zq, axis=2)
        val = np.real(za * zb @ self.C)
        # dbar_k f = sum_terms c * z^a * b_k * z̄^(b - e_k)
        g = np.empty((B_pts, n), dtype=complex)
        for k in range(n):
            bk = self.B[:, k]
            col = np.where(
                bk[None, :] > 0,
                bk[None, :] * zc[:, k][:, None] ** np.maximum(bk - 1, 0)[None, :],
                0.0,
            )
            rest = Zq.copy()
            rest[:, :, k] = col
            g[:, k] = (za * np.prod(rest, axis=2)) @ self.C
        grad = np.concatenate([2.0 * g.real, 2.0 * g.imag], axis=1)
        return val, grad


def _normalize_rows(X: np.ndarray) -> np.ndarray:
    nrm = np.linalg.norm(X, axis=1, keepdims=True)
    if np.any(nrm == 0):
        raise ValueError("cannot project the origin to the sphere")
    return X / nrm


def _pgd_batch(obj: _Objective, X0: np.ndarray, max_iter: int, tol: float):
    """Armijo projected gradient on all rows at once; returns (values, points, converged)."""
    X = _normalize_rows(X0.astype(float))
    fx, G = obj.value_grad(X)
    step = np.ones(X.shape[0])
    converged = np.zeros(X.shape[0], dtype=bool)
    for _ in range(max_iter):
        Gt = G - np.sum(G * X, axis=1, keepdims=True) * X
        gn = np.linalg.norm(Gt, axis=1)
        converged |= gn <= tol * (1.0 + np.abs(fx))
        active = ~converged
        if not active.any():
            break
        step[active] = np.minimum(step[active] * 2.0, 1e3)
        pending = active.copy()
        for _bt in range(70):
            Xc = _normalize_rows(X[pending] - step[pending, None] * Gt[pending])
            fc = obj.value(Xc)
            ok = fc <= fx[pending] - 1e-4 * step[pending] * gn[pending] ** 2
            idx = np.flatnonzero(pending)
            good = idx[ok]
            X[good] = Xc[ok]
            fx[good] = fc[ok]
            pending[good] = False
            step[idx[~ok]] *= 0.5
            if not pending.any():
                break
            dead = pending & (step < 1e-18)
            if dead.any():
                converged |= dead  # no float-resolution descent left
                pending &= ~dead
                if not pending.any():
                    break
        moved = active & ~pending
        if not moved.any():
            break
        fx_new, G_new = obj.value_grad(X[moved])
        fx[moved] = fx_new
        G[moved] = G_new
    return fx, X, converged


def _starting_points(n: int, quasi_starts: int) -> list[np.ndarray]:
    pts: list[np.ndarray] = []
    for k in range(n):
        e = np.zeros(2 * n)
        e[k] = 1.0
        pts.append(e)
    # balanced points with a few deterministic phase patterns
    for phases in list(product((1.0, 1j), repeat=n))[:8]:
        z = np.array(phases, dtype=complex) / math.sqrt(n)
        pts.append(np.concatenate([z.real, z.imag]))
    if quasi_starts > 0:
        sampler = qmc.Halton(d=2 * n, scramble=False)
        u = sampler.random(quasi_starts)
        u = np.clip(u, 1e-12, 1.0 - 1e-12)
        gauss = ndtri(u)
        for row in gauss:
            nrm = np.linalg.norm(row)
            if nrm > 0:
                pts.append(row / nrm)
    return pts


def _certified_grid(form: HermitianForm, grid_budget: int):
    """Coarse covering of the sphere by (moduli-angle, phase-angle) cells.

    Returns (grid_min, covering_radius, points_used).  Every sphere point is
    within covering_radius of an evaluated point (after removing the global
    phase, which leaves f invariant), so grid_min - L * covering_radius
    certifies a lower bound.
    """
    n = form.n
    if n == 1:
        z = np.array([[1.0 + 0j]])
        val = float(forms.evaluate_batch(form, z)[0])
        return val, 0.0, 1
    axes = 2 * (n - 1)
    K = max(4, int(grid_budget ** (1.0 / axes)))
    dpsi = (math.pi / 2) / K
    dtheta = (2 * math.pi) / K
    psi_vals = (np.arange(K) + 0.5) * dpsi
    theta_vals = (np.arange(K) + 0.5) * dtheta
    cover = (n - 1) * dpsi / 2 + dtheta / 2

    grids = np.meshgrid(*([psi_vals] * (n - 1) + [theta_vals] * (n - 1)), indexing="ij")
    flat = [g.reshape(-1) for g in grids]
    total = flat[0].size
    psis = np.stack(flat[: n - 1], axis=1)
    thetas = np.stack(flat[n - 1 :], axis=1)

    # spherical moduli: r_1 = cos psi_1, r_2 = sin psi_1 cos psi_2, ..., r_n = prod sin
    r = np.empty((total, n))
    sin_acc = np.ones(total)
    for j in range(n - 1):
        r[:, j] = sin_acc * np.cos(psis[:, j])
        sin_acc = sin_acc * np.sin(psis[:, j])
    r[:, n - 1] = sin_acc

    Z = r.astype(complex)
    for j in range(n - 1):
        Z[:, j] = Z[:, j] * np.exp(1j * thetas[:, j])

    best = math.inf
    chunk = 65536
    for lo in range(0, total, chunk):
        vals = forms.evaluate_batch(form, Z[lo : lo + chunk])
        if vals.size:
            best = min(best, float(vals.min()))
    return best, cover, total


def minimize_on_sphere(
    form: HermitianForm,
    tol: float = 1e-9,
    max_iter: int = 500,
    quasi_starts: int = 64,
    grid_budget: int = 160_000,
    certify: bool = True,
) -> SphereMinResult:
    """Multi-start projected gradient minimum of f on the unit sphere."""
    if form.is_zero:
        e = tuple(1.0 + 0j if k == 0 else 0j for k in range(form.n))
        return SphereMinResult(0.0, e, 0.0, True, True, 0, 0)

    obj = _Objective(form)
    starts = np.array(_starting_points(form.n, quasi_starts))
    vals, X, conv = _pgd_batch(obj, starts, max_iter, tol)
    best = int(np.argmin(vals))
    best_val = float(vals[best])
    best_x = X[best]
    any_converged = bool(conv.any())

    grid_points = 0
    uncertainty = math.inf
    certified = False
    if certify and form.n <= 3:
        grid_min, cover, grid_points = _certified_grid(form, grid_budget)
        lower = grid_min - lipschitz_bound(form) * cover
        best_val = min(best_val, grid_min)
        uncertainty = max(0.0, best_val - lower)
        certified = True

    z = tuple(complex(best_x[k], best_x[form.n + k]) for k in range(form.n))
    return SphereMinResult(
        best_val, z, uncertainty, certified, any_converged, len(starts), grid_points
    )


def sup_abs_on_sphere(form: HermitianForm, **options) -> SphereMinResult:
    """sup |f| on the sphere = max(-min(-f), -min(f))."""
    neg = forms.scale(form, -1)
    r_min = minimize_on_sphere(form, **options)
    r_max = minimize_on_sphere(neg, **options)
    sup_f = -r_max.value
    inf_f = r_min.value
    if sup_f >= -inf_f:
        value, point = sup_f, r_max.minimizer
    else:
        value, point = -inf_f, r_min.minimizer
    value = max(value, 0.0)
    unc = max(r_min.uncertainty, r_max.uncertainty)
    return SphereMinResult(
        value,
        point,
        unc,
        r_min.certified and r_max.certified,
        r_min.converged and r_max.converged,
        r_min.starts + r_max.starts,
        r_min.grid_points + r_max.grid_points,
    )
