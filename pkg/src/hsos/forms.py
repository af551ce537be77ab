"""Bihomogeneous hermitian forms and their scalar invariants.

A form f(z, z̄) = sum_{|a|=|b|=m} c_ab z^a z̄^b is stored as a sparse map from
exponent pairs to exact complex-rational coefficients.  Reality of f on C^n is
equivalent to hermitian symmetry c_ba = conj(c_ab), which is what validate()
checks.  The four scalar invariants live here:

  sphere_min   min of f on the unit sphere            (numerical, certified radius)
  frob_weight  weighted Frobenius norm  (sum (a!b!/m!^2)|c_ab|^2)^(1/2)   (exact square)
  diag_max     max over diagonal of (a!/m!)|c_aa|                         (exact)
  sphere_sup   sup of |f| on the unit sphere          (numerical)
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import multiindex as mi
from .exact import QC, QC_ZERO, as_fraction, qc


class FormError(ValueError):
    pass


class DegreeMismatch(FormError):
    def __init__(self, index, expected_degree):
        self.index = index
        self.expected_degree = expected_degree
        super().__init__(f"index {index} has degree {sum(index)}, expected {expected_degree}")


class SymmetryViolation(FormError):
    def __init__(self, alpha, beta, value, conj_value):
        self.alpha = alpha
        self.beta = beta
        self.value = value
        self.conj_value = conj_value
        super().__init__(
            f"c[{beta},{alpha}] = {conj_value} is not the conjugate of c[{alpha},{beta}] = {value}"
        )


class DimensionMismatch(FormError):
    pass


class DegreeZeroError(FormError):
    pass


class NotDiagonalWarning(UserWarning):
    """Raised as a warning when a diagonal-only invariant is taken on a non-diagonal form."""


CoeffKey = tuple[mi.MultiIndex, mi.MultiIndex]


@dataclass(frozen=True)
class HermitianForm:
    """Sparse coefficient map of a bidegree-(m, m) form in n complex variables.

    Treated as immutable after construction; safe to share.
    """

    n: int
    m: int
    coeffs: dict[CoeffKey, QC]

    @staticmethod
    def from_terms(n: int, m: int, terms: Iterable[tuple[Sequence[int], Sequence[int], QC]]) -> "HermitianForm":
        """Build a form from (alpha, beta, coefficient) triples, summing repeats."""
        acc: dict[CoeffKey, QC] = {}
        for alpha, beta, c in terms:
            a = mi.validate_index(alpha)
            b = mi.validate_index(beta)
            if len(a) != n or len(b) != n:
                raise DimensionMismatch(f"index pair ({a}, {b}) incompatible with n = {n}")
            c = qc(c)
            key = (a, b)
            acc[key] = acc.get(key, QC_ZERO) + c
        return HermitianForm(n, m, {k: v for k, v in acc.items() if not v.is_zero})

    @staticmethod
    def zero(n: int, m: int) -> "HermitianForm":
        return HermitianForm(n, m, {})

    def coeff(self, alpha, beta) -> QC:
        return self.coeffs.get((tuple(alpha), tuple(beta)), QC_ZERO)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient_l1(self) -> Fraction:
        """Rational upper bound on sum |c_ab| via |re| + |im|."""
        total = Fraction(0)
        for c in self.coeffs.values():
            total += abs(c.re) + abs(c.im)
        return total

    def sorted_items(self):
        return sorted(
            self.coeffs.items(),
            key=lambda kv: (mi.graded_lex_key(kv[0][0]), mi.graded_lex_key(kv[0][1])),
        )


def fc_form(c) -> HermitianForm:
    """The standard two-variable family |z1|^4 + |z2|^4 - c |z1|^2 |z2|^2."""
    c = as_fraction(c)
    return HermitianForm.from_terms(
        2,
        2,
        [
            ((2, 0), (2, 0), qc(1)),
            ((0, 2), (0, 2), qc(1)),
            ((1, 1), (1, 1), qc(-c)),
        ],
    )


def inner_power(n: int, m: int) -> HermitianForm:
    """<z, z̄>^m = ||z||^(2m), with c_mu,mu = m!/mu!."""
    terms = []
    for mu in mi.iter_degree(n, m):
        terms.append((mu, mu, qc(mi.multinomial(mu))))
    return HermitianForm.from_terms(n, m, terms)


def coordinate_power(n: int, m: int, i: int = 0) -> HermitianForm:
    """|z_i|^(2m)."""
    alpha = tuple(m if j == i else 0 for j in range(n))
    return HermitianForm.from_terms(n, m, [(alpha, alpha, qc(1))])


def scale(form: HermitianForm, t) -> HermitianForm:
    t = qc(t)
    return HermitianForm(form.n, form.m, {k: v * t for k, v in form.coeffs.items() if not (v * t).is_zero})


def add_forms(a: HermitianForm, b: HermitianForm) -> HermitianForm:
    if a.n != b.n or a.m != b.m:
        raise FormError("cannot add forms of different shape")
    out = dict(a.coeffs)
    for k, v in b.coeffs.items():
        s = out.get(k, QC_ZERO) + v
        if s.is_zero:
            out.pop(k, None)
        else:
            out[k] = s
    return HermitianForm(a.n, a.m, out)


def validate(form: HermitianForm) -> list[FormError]:
    """Check bidegree homogeneity and hermitian symmetry; return violations."""
    problems: list[FormError] = []
    for (alpha, beta), c in form.coeffs.items():
        if len(alpha) != form.n or len(beta) != form.n:
            problems.append(DegreeMismatch(alpha if len(alpha) != form.n else beta, form.m))
            continue
        if sum(alpha) != form.m:
            problems.append(DegreeMismatch(alpha, form.m))
        if sum(beta) != form.m:
            problems.append(DegreeMismatch(beta, form.m))
    seen = set()
    for (alpha, beta), c in form.coeffs.items():
        if (beta, alpha) in seen or (alpha, beta) in seen:
            continue
        seen.add((alpha, beta))
        mirror = form.coeff(beta, alpha)
        if mirror != c.conj():
            problems.append(SymmetryViolation(alpha, beta, c, mirror))
    return problems


def require_valid(form: HermitianForm) -> HermitianForm:
    problems = validate(form)
    if problems:
        raise problems[0]
    return form


def is_diagonal(form: HermitianForm) -> bool:
    return all(a == b for (a, b) in form.coeffs)


def _check_point(form: HermitianForm, z: Sequence) -> None:
    if len(z) != form.n:
        raise DimensionMismatch(f"point has {len(z)} coordinates, form has n = {form.n}")


def evaluate(form: HermitianForm, z: Sequence[complex], reality_tol: float = 1e-12) -> float:
    """f(z, z̄) in double precision; the imaginary residue must vanish."""
    _check_point(form, z)
    zv = [complex(w) for w in z]
    total = 0j
    for (alpha, beta), c in form.coeffs.items():
        term = complex(c)
        for j in range(form.n):
            if alpha[j]:
                term *= zv[j] ** alpha[j]
            if beta[j]:
                term *= zv[j].conjugate() ** beta[j]
        total += term
    normsq = sum(abs(w) ** 2 for w in zv)
    scale_bound = float(form.coefficient_l1()) * normsq**form.m
    if abs(total.imag) > reality_tol * scale_bound + 1e-300:
        raise FormError(
            f"evaluation has non-real residue {total.imag:.3e}; form is not hermitian-symmetric"
        )
    return total.real


def evaluate_exact(form: HermitianForm, z: Sequence[QC]) -> Fraction:
    """f at a Gaussian-rational point, exactly; raises if the sum is not real."""
    _check_point(form, z)
    zv = [qc(w) for w in z]
    total = QC_ZERO
    for (alpha, beta), c in form.coeffs.items():
        term = c
        for j in range(form.n):
            for _ in range(alpha[j]):
                term = term * zv[j]
            for _ in range(beta[j]):
                term = term * zv[j].conj()
        total = total + term
    if total.im != 0:
        raise FormError("exact evaluation is not real; form violates hermitian symmetry")
    return total.re


def evaluate_batch(form: HermitianForm, Z: np.ndarray) -> np.ndarray:
    """Vectorized f over rows of Z (complex array of shape (batch, n))."""
    Z = np.asarray(Z, dtype=complex)
    if Z.ndim != 2 or Z.shape[1] != form.n:
        raise DimensionMismatch(f"batch shape {Z.shape} incompatible with n = {form.n}")
    out = np.zeros(Z.shape[0], dtype=complex)
    Zc = np.conj(Z)
    for (alpha, beta), c in form.coeffs.items():
        term = np.full(Z.shape[0], complex(c))
        for j in range(form.n):
            if alpha[j]:
                term = term * Z[:, j] ** alpha[j]
            if beta[j]:
                term = term * Zc[:, j] ** beta[j]
        out += term
    return out.real


def quarter_laplacian(form: HermitianForm) -> HermitianForm:
    """(1/4)Δ f = sum_i ∂_{z_i} ∂_{z̄_i} f, one bidegree down, exact.

    Coefficientwise: d_{γρ} = sum_i (γ_i+1)(ρ_i+1) c_{γ+e_i, ρ+e_i}.
    """
    if form.m == 0:
        raise DegreeZeroError("quarter-Laplacian of a bidegree-0 form")
    acc: dict[CoeffKey, QC] = {}
    for (alpha, beta), c in form.coeffs.items():
        for i in range(form.n):
            if alpha[i] >= 1 and beta[i] >= 1:
                gamma = alpha[:i] + (alpha[i] - 1,) + alpha[i + 1 :]
                rho = beta[:i] + (beta[i] - 1,) + beta[i + 1 :]
                key = (gamma, rho)
                acc[key] = acc.get(key, QC_ZERO) + c * (alpha[i] * beta[i])
    return HermitianForm(form.n, form.m - 1, {k: v for k, v in acc.items() if not v.is_zero})


def laplacian_iterates(form: HermitianForm) -> list[HermitianForm]:
    """[f, (1/4)Δ f, ..., (1/4)^m Δ^m f]; the last entry has bidegree 0."""
    out = [form]
    for _ in range(form.m):
        out.append(quarter_laplacian(out[-1]))
    return out


def big_lambda_sq(form: HermitianForm) -> Fraction:
    """Exact square of the weighted Frobenius norm: sum (a! b! / m!^2) |c_ab|^2."""
    msq = Fraction(mi.factorial(form.m)) ** 2
    total = Fraction(0)
    for (alpha, beta), c in form.coeffs.items():
        w = Fraction(mi.index_factorial(alpha) * mi.index_factorial(beta)) / msq
        total += w * c.abs2()
    return total


def big_lambda(form: HermitianForm) -> float:
    return math.sqrt(float(big_lambda_sq(form)))


def lambda_tilde(form: HermitianForm) -> Fraction:
    """max over diagonal entries of (a!/m!) |c_aa|, exact.

    Warns when off-diagonal coefficients exist: the diagonal (Polya-type)
    bound that consumes this value requires a diagonal form.
    """
    if not is_diagonal(form):
        warnings.warn(
            "form has off-diagonal coefficients; diagonal max is still returned",
            NotDiagonalWarning,
            stacklevel=2,
        )
    mfact = mi.factorial(form.m)
    best = Fraction(0)
    for (alpha, beta), c in form.coeffs.items():
        if alpha != beta:
            continue
        if c.im != 0:
            raise SymmetryViolation(alpha, beta, c, c.conj())
        val = Fraction(mi.index_factorial(alpha), mfact) * abs(c.re)
        best = max(best, val)
    return best


def lambda_min(form: HermitianForm, **options):
    """Minimum of f over the unit sphere with minimizer and uncertainty radius.

    See spheremin.minimize_on_sphere for options (seed, tol, grid_budget, ...).
    """
    from . import spheremin

    return spheremin.minimize_on_sphere(form, **options)


def lambda_sharp(form: HermitianForm, **options):
    """sup of |f| on the unit sphere, via minimization of f and -f."""
    from . import spheremin

    return spheremin.sup_abs_on_sphere(form, **options)


@dataclass(frozen=True)
class QLayer:
    j: int
    weight: Fraction  # (-1)^j h^j / j!; the sign convention lives here, not in the form
    form: HermitianForm


@dataclass(frozen=True)
class QSymbol:
    """Semiclassical symbol q = sum_j (h^j/j!) (-(1/4)Δ)^j f of a bidegree-m form."""

    h: Fraction
    n: int
    m: int
    layers: tuple[QLayer, ...]


def q_symbol(form: HermitianForm, h) -> QSymbol:
    h = as_fraction(h)
    if h <= 0:
        raise FormError(f"semiclassical parameter must be positive, got {h}")
    layers = []
    for j, g in enumerate(laplacian_iterates(form)):
        weight = Fraction((-1) ** j) * h**j / mi.factorial(j)
        layers.append(QLayer(j, weight, g))
    return QSymbol(h, form.n, form.m, tuple(layers))


def q_evaluate(q: QSymbol, z: Sequence[complex]) -> float:
    return sum(float(layer.weight) * evaluate(layer.form, z) for layer in q.layers)


def q_evaluate_batch(q: QSymbol, Z: np.ndarray) -> np.ndarray:
    Z = np.asarray(Z, dtype=complex)
    out = np.zeros(Z.shape[0])
    for layer in q.layers:
        out += float(layer.weight) * evaluate_batch(layer.form, Z)
    return out
