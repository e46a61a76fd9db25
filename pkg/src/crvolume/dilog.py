"""Bloch-Wigner dilogarithm and the Lobachevsky function.

``D(z) = Im Li2(z) + arg(1 - z) log|z|`` is real-analytic on C minus {0, 1}
and extends continuously to the Riemann sphere with ``D(0) = D(1) = D(inf) = 0``.

Evaluation reduces the argument with ``D(1/z) = -D(z)`` and ``D(1 - z) = -D(z)``
to the region ``|z| <= 1, Re z <= 1/2``.  Inside the disk ``|z| <= 1/2`` the
power series of Li2 is summed directly; in the rest of the region Li2 is
expanded in ``w = -log(1 - z)`` with Bernoulli-number coefficients, which
converges for ``|w| < 2 pi`` (here ``|w| < 1.3``).
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import NamedTuple, Union

from .errors import DomainError

__all__ = [
    "INFINITY",
    "DilogResult",
    "bloch_wigner",
    "D",
    "lobachevsky",
    "five_term_defect",
    "trisection_defect",
]

EPS = 2.220446049250313e-16
ULP_SLACK = 10 * EPS
# Arguments closer than this to 0, 1 or infinity collapse onto the exceptional point.
SINGULAR_RADIUS = 1e-14


class _Infinity:
    """The point at infinity of the Riemann sphere."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()

ExtendedComplex = Union[complex, float, int, _Infinity]


class DilogResult(NamedTuple):
    value: float
    estimated_error: float


def _bernoulli_even(count):
    """B_2, B_4, ..., B_{2 count} as exact fractions (Akiyama-Tanigawa)."""
    n_max = 2 * count
    a = [Fraction(0)] * (n_max + 1)
    out = []
    for m in range(n_max + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        if m >= 2 and m % 2 == 0:
            out.append(a[0])
    return out


def _bernoulli_coefficients(count=40):
    coeffs = []
    for k, b in enumerate(_bernoulli_even(count), start=1):
        coeffs.append(float(b / math.factorial(2 * k + 1)))
    return tuple(coeffs)


# B_{2k} / (2k+1)!  for k = 1, 2, ...
_BERNOULLI_COEFFS = _bernoulli_coefficients()


def _coerce(z):
    if z is INFINITY:
        return INFINITY
    try:
        z = complex(z)
    except TypeError:
        raise DomainError(f"cannot interpret {z!r} as a point of the Riemann sphere") from None
    if math.isnan(z.real) or math.isnan(z.imag):
        raise DomainError(f"NaN is not a point of the Riemann sphere: {z!r}")
    if math.isinf(z.real) or math.isinf(z.imag):
        return INFINITY
    return z


def _li2_power_series(z):
    """Li2(z) for |z| <= 1/2 and a bound on the truncation error."""
    r = abs(z)
    total = 0j
    power = z
    n = 1
    while True:
        term = power / (n * n)
        total += term
        n += 1
        power *= z
        tail = r ** n / (n * n * (1.0 - r)) if r > 0 else 0.0
        if tail <= 0.1 * EPS * max(abs(total), 1e-300) or n > 200:
            return total, tail


def _li2_bernoulli_series(z):
    """Li2(z) for |z| <= 1, Re z <= 1/2 via the expansion in -log(1 - z)."""
    w = -cmath.log(1.0 - z)
    w2 = w * w
    total = w - 0.25 * w2
    power = w
    ratio = abs(w2) / (4 * math.pi * math.pi)
    tail = 0.0
    for c in _BERNOULLI_COEFFS:
        power *= w2
        term = c * power
        total += term
        if abs(term) <= 0.1 * EPS * abs(total):
            tail = abs(term) * ratio / (1.0 - ratio)
            break
    else:
        tail = abs(term) * ratio / (1.0 - ratio)
    return total, tail


def _d_reduced(z):
    """D(z) on |z| <= 1, Re z <= 1/2 with its error estimate."""
    if abs(z) <= 0.5:
        li2, trunc = _li2_power_series(z)
    else:
        li2, trunc = _li2_bernoulli_series(z)
    log_term = cmath.phase(1.0 - z) * math.log(abs(z))
    value = li2.imag + log_term
    return value, trunc + ULP_SLACK * (abs(li2) + abs(log_term))


def _near_singular(u):
    """Bound on |D| for |u| tiny: |Im Li2(u)| + |arg(1-u) log|u||."""
    r = abs(u)
    if r == 0.0:
        return 0.0
    return 2.0 * r * (1.0 + abs(math.log(r)))


def bloch_wigner(z: ExtendedComplex) -> DilogResult:
    """Bloch-Wigner dilogarithm with an estimate of the absolute error.

    Total on the Riemann sphere: 0, 1 and ``INFINITY`` (or any complex with an
    infinite part) map to exactly 0.  NaN raises ``DomainError``.
    """
    z = _coerce(z)
    if z is INFINITY or z.imag == 0.0:
        return DilogResult(0.0, 0.0)
    if abs(z) < SINGULAR_RADIUS:
        return DilogResult(0.0, _near_singular(z))
    if abs(1.0 - z) < SINGULAR_RADIUS:
        return DilogResult(0.0, _near_singular(1.0 - z))
    if abs(z) > 1.0 / SINGULAR_RADIUS:
        return DilogResult(0.0, _near_singular(1.0 / z))

    sign = 1.0
    if abs(z) > 1.0:
        z = 1.0 / z
        sign = -sign
    if z.real > 0.5:
        z = 1.0 - z
        sign = -sign
    value, err = _d_reduced(z)
    return DilogResult(sign * value, err)


def D(z: ExtendedComplex) -> float:
    """Value of the Bloch-Wigner dilogarithm (see :func:`bloch_wigner`)."""
    return bloch_wigner(z).value


def lobachevsky(theta: float) -> float:
    """Lobachevsky function, ``Lambda(theta) = D(exp(2 i theta)) / 2``."""
    theta = float(theta)
    if math.isnan(theta) or math.isinf(theta):
        raise DomainError(f"angle must be finite, got {theta!r}")
    # reduce to (-pi/2, pi/2] first so exp(2i theta) is computed on a small angle
    theta = math.remainder(theta, math.pi)
    return 0.5 * D(cmath.exp(2j * theta))


def _check_generic(name, value):
    value = _coerce(value)
    if value is INFINITY:
        raise DomainError(f"{name} must be finite")
    if value == 0 or value == 1:
        raise DomainError(f"{name} must avoid 0 and 1, got {value!r}")
    return value


def _safe_ratio(num, den):
    # degenerate intermediate ratios are points where D vanishes continuously
    if den == 0:
        return INFINITY
    return num / den


def five_term_defect(x: complex, y: complex) -> float:
    """``|D(x) - D(y) + D(y/x) - D((1-y)/(1-x)) + D((1-1/y)/(1-1/x))|``."""
    x = _check_generic("x", x)
    y = _check_generic("y", y)
    terms = (
        bloch_wigner(x),
        bloch_wigner(y),
        bloch_wigner(y / x),
        bloch_wigner(_safe_ratio(1 - y, 1 - x)),
        bloch_wigner(_safe_ratio(1 - 1 / y, 1 - 1 / x)),
    )
    signs = (1, -1, 1, -1, 1)
    return abs(math.fsum(s * t.value for s, t in zip(signs, terms)))


def trisection_defect(z: complex) -> float:
    """Defect of ``D(z) = (D(z/zb) + D((1-1/z)/(1-1/zb)) + D((1-zb)/(1-z))) / 2``."""
    z = _check_generic("z", z)
    if z.imag == 0.0:
        raise DomainError(f"z must be non-real, got {z!r}")
    zb = z.conjugate()
    rhs = 0.5 * math.fsum(
        (D(z / zb), D((1 - 1 / z) / (1 - 1 / zb)), D((1 - zb) / (1 - z)))
    )
    return abs(D(z) - rhs)
