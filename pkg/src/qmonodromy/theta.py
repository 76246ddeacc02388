"""Jacobi-type theta function of base q and signed theta ratios.

The convention is

    theta_q(x) = sum_{n in Z} q^{n(n-1)/2} x^n,

so that theta_q(q x) = theta_q(x) / x, x theta_q(1/x) = theta_q(x), and the
zeros are the points of -q^Z.  ``T(x) = theta_q(-x)`` has its zeros on q^Z.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "PrecisionPolicy",
    "ThetaZeroError",
    "ThetaRatioSpec",
    "default_policy",
    "check_nome",
    "theta",
    "theta_triple_product",
    "T",
    "zero_distance",
    "t_ratio",
    "three_term_terms",
]

PRECISION_ENV = "QMONODROMY_PRECISION"


class ThetaZeroError(ValueError):
    """A theta factor that must be inverted sits on (or next to) a zero."""


@dataclass(frozen=True)
class PrecisionPolicy:
    """How theta series are evaluated.

    Parameters
    ----------
    mode : {"double", "extended"}
        ``double`` uses complex128 arithmetic; ``extended`` delegates to mpmath.
    tol : float
        Truncation threshold relative to the running partial sum.
    dps : int
        Decimal digits used in extended mode.
    max_terms : int
        Cap on |n| in the series.
    zero_tol : float
        Distance below which a T argument is treated as a zero.
    """

    mode: str = "double"
    tol: float = 1e-10
    dps: int = 30
    max_terms: int = 10_000
    zero_tol: float = 1e-9

    def __post_init__(self):
        if self.mode not in ("double", "extended"):
            raise ValueError(f"unknown precision mode {self.mode!r}")
        if not self.tol > 0 or not self.zero_tol > 0:
            raise ValueError("tolerances must be positive")


def default_policy() -> PrecisionPolicy:
    """Policy from the environment, e.g. ``double`` or ``extended:50``."""
    spec = os.environ.get(PRECISION_ENV, "double").strip().lower()
    if not spec or spec == "double":
        return PrecisionPolicy()
    mode, _, digits = spec.partition(":")
    if mode != "extended":
        raise ValueError(f"{PRECISION_ENV}={spec!r} not understood")
    return PrecisionPolicy(mode="extended", dps=int(digits) if digits else 30)


def check_nome(q) -> complex:
    q = complex(q)
    if not 0 < abs(q) < 1:
        raise ValueError(f"nome must satisfy 0 < |q| < 1, got {q}")
    return q


def _series(q: complex, y: complex, tol: float, max_terms: int) -> complex:
    # Sum outward from n = 0 on both sides; stop each side after three
    # consecutive terms below tol * |partial sum|.
    total = 1.0 + 0j
    t_pos = 1.0 + 0j
    t_neg = 1.0 + 0j
    small_pos = small_neg = 0
    done_pos = done_neg = False
    qn = 1.0 + 0j
    for n in range(1, max_terms + 1):
        if not done_pos:
            t_pos = t_pos * qn * y  # q^{n(n-1)/2} y^n
            total += t_pos
        qn = qn * q
        if not done_neg:
            t_neg = t_neg * qn / y  # q^{n(n+1)/2} y^{-n}
            total += t_neg
        scale = abs(total)
        if not done_pos:
            small_pos = small_pos + 1 if abs(t_pos) <= tol * scale else 0
            done_pos = small_pos >= 3
        if not done_neg:
            small_neg = small_neg + 1 if abs(t_neg) <= tol * scale else 0
            done_neg = small_neg >= 3
        if done_pos and done_neg:
            break
    return total


def _theta_extended(q: complex, x: complex, dps: int) -> complex:
    import mpmath

    with mpmath.workdps(dps):
        s = mpmath.sqrt(mpmath.mpc(q))
        z = -0.5j * mpmath.log(mpmath.mpc(x) / s)
        return complex(mpmath.jtheta(3, z, s))


def _theta_scalar(q: complex, x: complex, policy: PrecisionPolicy) -> complex:
    if x == 0:
        raise ValueError("theta_q is not defined at x = 0")
    if policy.mode == "extended":
        return _theta_extended(q, x, policy.dps)
    logq = math.log(abs(q))
    k = int(round(math.log(abs(x)) / logq))
    y = x / q**k if k >= 0 else x * q ** (-k)
    # theta(q^k y) = q^{-k(k-1)/2} y^{-k} theta(y)
    log_pref = -0.5 * k * (k - 1) * logq - k * math.log(abs(y))
    if log_pref > 700:
        raise OverflowError("theta prefactor overflows after argument reduction")
    s = _series(q, y, policy.tol, policy.max_terms)
    if k == 0:
        return s
    m = k * (k - 1) // 2
    pref = q ** (-m) * y ** (-k)
    return pref * s


def theta(q, x, policy: PrecisionPolicy | None = None):
    """Evaluate theta_q(x) for scalar or array ``x``.

    The argument is first moved into the annulus |q|^{1/2} <= |x| <= |q|^{-1/2}
    with the functional equation, and the prefactor is reapplied exactly.
    """
    q = check_nome(q)
    policy = policy or default_policy()
    if np.ndim(x) == 0:
        return _theta_scalar(q, complex(x), policy)
    xs = np.asarray(x, dtype=complex)
    out = np.empty(xs.shape, dtype=complex)
    for idx, v in np.ndenumerate(xs):
        out[idx] = _theta_scalar(q, complex(v), policy)
    return out


def theta_triple_product(q, x, terms: int = 400) -> complex:
    """Independent evaluator: (q;q)_inf (-x;q)_inf (-q/x;q)_inf."""
    q = check_nome(q)
    x = complex(x)
    out = 1.0 + 0j
    qn = 1.0 + 0j
    for _ in range(terms):
        qn1 = qn * q
        out *= (1 - qn1) * (1 + x * qn) * (1 + qn1 / x)
        qn = qn1
        if abs(qn) < 1e-18:
            break
    return out


def T(q, x, policy: PrecisionPolicy | None = None):
    """T(x) = theta_q(-x); its zeros are the points of q^Z."""
    return theta(q, -np.asarray(x) if np.ndim(x) else -complex(x), policy)


def zero_distance(q, z) -> float:
    """min_k |z q^{-k} - 1| over the few k compatible with |z|."""
    q = check_nome(q)
    z = complex(z)
    if z == 0:
        return math.inf
    k0 = int(round(math.log(abs(z)) / math.log(abs(q))))
    return min(abs(z / q**k - 1) if k >= 0 else abs(z * q ** (-k) - 1)
               for k in (k0 - 1, k0, k0 + 1))


@dataclass(frozen=True)
class ThetaRatioSpec:
    """Stacked ratio T(n_1, ..., n_a / d_1, ..., d_b)."""

    numerators: tuple = field(default_factory=tuple)
    denominators: tuple = field(default_factory=tuple)


def t_ratio(q, numerators: Sequence | ThetaRatioSpec,
            denominators: Sequence = (), policy: PrecisionPolicy | None = None) -> complex:
    """Return prod T(numerators) / prod T(denominators).

    Factors are paired (numerator i over denominator i) before multiplying so
    that the large dynamic range of individual theta values cancels early.
    """
    if isinstance(numerators, ThetaRatioSpec):
        numerators, denominators = numerators.numerators, numerators.denominators
    q = check_nome(q)
    policy = policy or default_policy()
    nums = [complex(a) for a in numerators]
    dens = [complex(b) for b in denominators]
    for b in dens:
        if zero_distance(q, b) < policy.zero_tol:
            raise ThetaZeroError(f"denominator argument {b} is congruent to 1 mod q^Z")
    out = 1.0 + 0j
    for a, b in zip(nums, dens):
        out *= _theta_scalar(q, -a, policy) / _theta_scalar(q, -b, policy)
    for a in nums[len(dens):]:
        out *= _theta_scalar(q, -a, policy)
    for b in dens[len(nums):]:
        out /= _theta_scalar(q, -b, policy)
    return out


def three_term_terms(q, a, b, c, x, d=None, form: int = 1,
                     policy: PrecisionPolicy | None = None) -> np.ndarray:
    """The three terms of a three-term relation between products of four T factors.

    Each form sums to zero:

    1. c T(a)T(b/c)T(x/a)T(x/bc) + a T(b)T(c/a)T(x/b)T(x/ac) + b T(c)T(a/b)T(x/c)T(x/ab)
    2. T(b)T(a/c)T(x/b)T(x/ac) - T(a)T(b/c)T(x/a)T(x/bc) - (b/c) T(c)T(a/b)T(x/c)T(x/ab)
    3. c T(a/b)T(d/c)T(x/ab)T(x/cd) - c T(a/c)T(d/b)T(x/ac)T(x/bd) + d T(c/b)T(a/d)T(x/ad)T(x/bc)

    Form 3 needs ``d``.
    """
    a, b, c, x = (complex(v) for v in (a, b, c, x))

    def t4(*args):
        out = 1.0 + 0j
        for z in args:
            out *= T(q, z, policy)
        return out

    if form == 1:
        return np.array([c * t4(a, b / c, x / a, x / (b * c)),
                         a * t4(b, c / a, x / b, x / (a * c)),
                         b * t4(c, a / b, x / c, x / (a * b))])
    if form == 2:
        return np.array([t4(b, a / c, x / b, x / (a * c)),
                         -t4(a, b / c, x / a, x / (b * c)),
                         -(b / c) * t4(c, a / b, x / c, x / (a * b))])
    if form == 3:
        if d is None:
            raise ValueError("form 3 needs d")
        d = complex(d)
        return np.array([c * t4(a / b, d / c, x / (a * b), x / (c * d)),
                         -c * t4(a / c, d / b, x / (a * c), x / (b * d)),
                         d * t4(c / b, a / d, x / (a * d), x / (b * c))])
    raise ValueError(f"unknown form {form}")
