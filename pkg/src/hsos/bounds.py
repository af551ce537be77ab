"""Published sufficient shift-degree bounds and their comparison report.

Four bounds are evaluated from the scalar invariants: the semiclassical bound
C (Λ/λ)(m+n)^3 log^3 n with its unspecified universal constant exposed as a
parameter, the Powers-Resnick diagonal bound, the To-Yeung bound, and the
Nie-Schweighofer bound (comparative only).  All logs are natural, rounding is
ceil (or "smallest integer strictly greater" where the source inequality is
strict), and results are floored at 0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import forms as forms_mod
from . import multiplier as mult
from .exact import as_fraction
from .forms import HermitianForm


class NonPositiveLambda(ValueError):
    pass


class NotDiagonal(ValueError):
    pass


def _smallest_int_greater(x: float) -> int:
    return math.floor(x) + 1


def certified_N(form: HermitianForm, C, lambda_value: float, big_lambda_value: float) -> int:
    """ceil( C * (Λ/λ) * (m+n)^3 * ln(n)^3 ), the semiclassical sufficient bound."""
    if form.n < 2:
        raise ValueError("bound requires n >= 2 (log n > 0)")
    if lambda_value <= 0:
        raise NonPositiveLambda(f"lambda = {lambda_value} must be positive")
    C = float(C)
    if C == 0:
        warnings.warn("C = 0 gives the degenerate bound 0", UserWarning, stacklevel=2)
        return 0
    value = C * (big_lambda_value / lambda_value) * (form.m + form.n) ** 3 * math.log(form.n) ** 3
    return max(0, math.ceil(value))


def powers_resnick_N(form: HermitianForm, lambda_value: Optional[float] = None) -> int:
    """Smallest N > (m(m-1)/2) (diag_max/λ) - m; diagonal forms only."""
    if not forms_mod.is_diagonal(form):
        raise NotDiagonal("Powers-Resnick bound applies to diagonal forms only")
    if lambda_value is None:
        lambda_value = forms_mod.lambda_min(form).value
    if lambda_value <= 0:
        raise NonPositiveLambda(f"lambda = {lambda_value} must be positive")
    lt = float(forms_mod.lambda_tilde(form))
    rhs = (form.m * (form.m - 1) / 2.0) * (lt / lambda_value) - form.m
    return max(0, _smallest_int_greater(rhs))


def to_yeung_N(
    form: HermitianForm,
    lambda_value: Optional[float] = None,
    sharp_value: Optional[float] = None,
) -> int:
    """ceil( n m (2m-1) Λ#/(ln 2 · λ) - n - m ), floored at 0."""
    if lambda_value is None:
        lambda_value = forms_mod.lambda_min(form).value
    if lambda_value <= 0:
        raise NonPositiveLambda(f"lambda = {lambda_value} must be positive")
    if sharp_value is None:
        sharp_value = forms_mod.lambda_sharp(form).value
    n, m = form.n, form.m
    rhs = n * m * (2 * m - 1) * sharp_value / (math.log(2.0) * lambda_value) - n - m
    return max(0, math.ceil(rhs))


def nie_schweighofer_N(
    form: HermitianForm,
    c: float = 1.0,
    lambda_value: Optional[float] = None,
) -> Optional[int]:
    """Smallest N > c * exp(m^2 n^m (diag_max/λ))^c, None on double overflow."""
    if c <= 0:
        warnings.warn("c <= 0 gives a degenerate bound", UserWarning, stacklevel=2)
    if lambda_value is None:
        lambda_value = forms_mod.lambda_min(form).value
    if lambda_value <= 0:
        raise NonPositiveLambda(f"lambda = {lambda_value} must be positive")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", forms_mod.NotDiagonalWarning)
        lt = float(forms_mod.lambda_tilde(form))
    exponent = c * (form.m**2) * (form.n**form.m) * (lt / lambda_value)
    if exponent > 700.0:
        return None  # overflow flag
    return max(0, _smallest_int_greater(c * math.exp(exponent)))


@dataclass
class BoundReport:
    n: int
    m: int
    diagonal: bool
    lambda_value: float
    lambda_uncertainty: float
    big_lambda: float
    lambda_tilde: float
    lambda_sharp: float
    universal_C_used: Fraction
    certified_N: Optional[int] = None
    powers_resnick_N: Optional[int] = None
    to_yeung_N: Optional[int] = None
    nie_schweighofer_N: Optional[int] = None
    nie_schweighofer_overflow: bool = False
    empirical_minimal_N: Optional[int] = None
    smallest_sufficient_C: Optional[Fraction] = None
    notes: dict[str, str] = field(default_factory=dict)
    checks: dict[str, bool] = field(default_factory=dict)


def _smallest_sufficient_C(
    form: HermitianForm,
    lambda_value: float,
    big_lambda_value: float,
    empirical_N: Optional[int],
    n_max: int,
    size_cap: int,
    resolution: int = 64,
    c_max: int = 8,
) -> Optional[Fraction]:
    """Binary search for the smallest C on the 1/resolution grid whose bound is PSD-sufficient.

    PSD at a shift is monotone in the shift, so the predicate is monotone in C.
    When the empirical minimum is known the predicate reduces to N(C) >= minimum.
    """

    def sufficient(k: int) -> bool:
        N = certified_N(form, Fraction(k, resolution), lambda_value, big_lambda_value)
        if empirical_N is not None:
            return N >= empirical_N
        if mult.mi.dim_homogeneous(form.n, form.m + N) > size_cap or N > 4 * n_max:
            return False
        return mult.is_psd(mult.multiplier_matrix(form, N, size_cap=size_cap)).is_psd

    lo, hi = 1, resolution * c_max
    if not sufficient(hi):
        return None
    while lo < hi:
        mid = (lo + hi) // 2
        if sufficient(mid):
            hi = mid
        else:
            lo = mid + 1
    return Fraction(hi, resolution)


def bound_report(
    form: HermitianForm,
    C=Fraction(1),
    n_max: int = 10,
    size_cap: int = mult.DEFAULT_SIZE_CAP,
    ns_c: float = 1.0,
    search_C: bool = True,
) -> BoundReport:
    """Compute all invariants and bounds, run the empirical scan, and record checks."""
    forms_mod.require_valid(form)
    C = as_fraction(C)
    lam = forms_mod.lambda_min(form)
    sharp = forms_mod.lambda_sharp(form)
    big = forms_mod.big_lambda(form)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", forms_mod.NotDiagonalWarning)
        lt = float(forms_mod.lambda_tilde(form))
    diagonal = forms_mod.is_diagonal(form)

    report = BoundReport(
        n=form.n,
        m=form.m,
        diagonal=diagonal,
        lambda_value=lam.value,
        lambda_uncertainty=lam.uncertainty,
        big_lambda=big,
        lambda_tilde=lt,
        lambda_sharp=sharp.value,
        universal_C_used=C,
    )

    try:
        report.empirical_minimal_N = mult.minimal_sos_N(
            form, n_max, size_cap=size_cap, warn_nonpositive=False
        )
        if report.empirical_minimal_N is None:
            report.notes["empirical_minimal_N"] = f"no PSD shift found up to N = {n_max}"
    except mult.SizeCapExceeded as exc:
        report.notes["empirical_minimal_N"] = str(exc)

    for name, fn in [
        ("certified_N", lambda: certified_N(form, C, lam.value, big)),
        ("powers_resnick_N", lambda: powers_resnick_N(form, lam.value)),
        ("to_yeung_N", lambda: to_yeung_N(form, lam.value, sharp.value)),
    ]:
        try:
            setattr(report, name, fn())
        except (NonPositiveLambda, NotDiagonal, ValueError) as exc:
            report.notes[name] = str(exc)

    try:
        ns = nie_schweighofer_N(form, ns_c, lam.value)
        if ns is None:
            report.nie_schweighofer_overflow = True
            report.notes["nie_schweighofer_N"] = "double-precision overflow"
        else:
            report.nie_schweighofer_N = ns
    except NonPositiveLambda as exc:
        report.notes["nie_schweighofer_N"] = str(exc)

    if lam.value > 0:
        report.checks["lambda_le_sharp"] = lam.value <= sharp.value * (1 + 1e-9) + 1e-12
        report.checks["sharp_le_big_lambda"] = sharp.value <= big * (1 + 1e-9) + 1e-12
    emp = report.empirical_minimal_N
    if emp is not None:
        if report.powers_resnick_N is not None:
            report.checks["empirical_le_powers_resnick"] = emp <= report.powers_resnick_N
        if report.to_yeung_N is not None:
            report.checks["empirical_le_to_yeung"] = emp <= report.to_yeung_N
        if report.certified_N is not None:
            report.checks["empirical_le_certified"] = emp <= report.certified_N

    if search_C and lam.value > 0:
        try:
            report.smallest_sufficient_C = _smallest_sufficient_C(
                form, lam.value, big, emp, n_max, size_cap
            )
        except (mult.SizeCapExceeded, ValueError) as exc:
            report.notes["smallest_sufficient_C"] = str(exc)

    return report
