"""Interpolation coefficients, the gamma/alpha/beta constants, quadric coefficients,
discriminant and Delta, each with a closed theta form and an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .params import ParamSet, bracket
from .theta import PrecisionPolicy, default_policy, t_ratio, theta

__all__ = [
    "basis_value",
    "InterpCoeffs",
    "interp_coeffs",
    "interp_coeffs_oracle",
    "GammaConstants",
    "gamma_constants",
    "gamma_functional_residuals",
    "QuadricCoeffs",
    "quadric_coeffs",
    "quadric_A_factored",
    "delta",
    "discriminant",
    "discriminant_closed",
    "gram_matrix",
    "xy_form_residual",
]


def basis_value(p: ParamSet, i: int, j: int, k: int, xx, policy: PrecisionPolicy | None = None):
    """e^k_{i,j}(x) = theta(-x/x_k) theta(-x x_k sigma_j / rho_i), vanishing at x = x_k."""
    xk = p.x[k - 1]
    c = xk * p.sigma[j - 1] / p.rho[i - 1]
    return theta(p.q, -xx / xk, policy) * theta(p.q, -xx * c, policy)


@dataclass(frozen=True)
class InterpCoeffs:
    """lambda, mu, lambda', mu' as 2x2 arrays indexed [i-1, j-1]."""

    lam: np.ndarray
    mu: np.ndarray
    lamp: np.ndarray
    mup: np.ndarray

    def get(self, name: str, i: int, j: int) -> complex:
        return complex(getattr(self, name)[i - 1, j - 1])

    def stacked(self) -> np.ndarray:
        return np.stack([self.lam, self.mu, self.lamp, self.mup])


def interp_coeffs(p: ParamSet, policy: PrecisionPolicy | None = None) -> InterpCoeffs:
    """Closed forms, every theta argument passed through T(x) = theta(-x)."""
    policy = policy or default_policy()
    q, x = p.q, p.x
    out = {k: np.zeros((2, 2), dtype=complex) for k in ("lam", "mu", "lamp", "mup")}
    for i in (1, 2):
        for j in (1, 2):
            b12 = bracket(p, 1, 2, j, i)
            out["lam"][i - 1, j - 1] = t_ratio(
                q, [x[2] / x[1], bracket(p, 2, 3, j, i)], [x[0] / x[1], b12], policy)
            out["mu"][i - 1, j - 1] = t_ratio(
                q, [x[2] / x[0], bracket(p, 1, 3, j, i)], [x[1] / x[0], b12], policy)
            out["lamp"][i - 1, j - 1] = t_ratio(
                q, [x[3] / x[1], bracket(p, 2, 4, j, i)], [x[0] / x[1], b12], policy)
            out["mup"][i - 1, j - 1] = t_ratio(
                q, [x[3] / x[0], bracket(p, 1, 4, j, i)], [x[1] / x[0], b12], policy)
    return InterpCoeffs(**out)


def interp_coeffs_oracle(p: ParamSet, policy: PrecisionPolicy | None = None) -> InterpCoeffs:
    """Solve w = lambda u + mu v (and w' likewise) on the basis e^1, e^2 directly.

    For each (i, j) the rows of the 2x2 system are the evaluations (u, v) of e^1
    and e^2 at x_1, x_2; right-hand sides are their values at x_3 or x_4.
    """
    out = {k: np.zeros((2, 2), dtype=complex) for k in ("lam", "mu", "lamp", "mup")}
    for i in (1, 2):
        for j in (1, 2):
            ev = np.array([[basis_value(p, i, j, m, p.x[k], policy) for k in range(4)]
                           for m in (1, 2)])
            system = ev[:, :2]
            if abs(np.linalg.det(system)) < 1e-300:
                raise np.linalg.LinAlgError("singular interpolation system")
            lam, mu = np.linalg.solve(system, ev[:, 2])
            lamp, mup = np.linalg.solve(system, ev[:, 3])
            out["lam"][i - 1, j - 1], out["mu"][i - 1, j - 1] = lam, mu
            out["lamp"][i - 1, j - 1], out["mup"][i - 1, j - 1] = lamp, mup
    return InterpCoeffs(**out)


@dataclass
class GammaConstants:
    alpha: complex
    beta: complex
    gamma: complex
    gamma_ratios: list
    alpha_alt: complex
    beta_alt: complex
    residuals: list = field(default_factory=list)


def gamma_constants(p: ParamSet, ic: InterpCoeffs | None = None,
                    policy: PrecisionPolicy | None = None) -> GammaConstants:
    """gamma from its closed form; alpha, beta from the (11)(22) identifications.

    ``residuals`` holds the eight identification equations evaluated with these
    constants (the first and third vanish by construction).
    """
    policy = policy or default_policy()
    ic = ic or interp_coeffs(p, policy)
    x = p.x
    g0 = t_ratio(p.q, [x[3] / x[1], x[3] / x[0]], [x[2] / x[1], x[2] / x[0]], policy)
    gamma = g0 * x[3] / x[2]
    L, M, Lp, Mp = ic.lam, ic.mu, ic.lamp, ic.mup
    alpha = Lp[0, 0] * Lp[1, 1] - gamma * L[0, 0] * L[1, 1]
    beta = Mp[0, 0] * Mp[1, 1] - gamma * M[0, 0] * M[1, 1]
    alpha_alt = Lp[0, 1] * Lp[1, 0] - gamma * L[0, 1] * L[1, 0]
    beta_alt = Mp[0, 1] * Mp[1, 0] - gamma * M[0, 1] * M[1, 0]
    ratios = [
        Lp[0, 0] * Mp[1, 1] / (L[0, 0] * M[1, 1]),
        Lp[1, 1] * Mp[0, 0] / (L[1, 1] * M[0, 0]),
        Lp[0, 1] * Mp[1, 0] / (L[0, 1] * M[1, 0]),
        Lp[1, 0] * Mp[0, 1] / (L[1, 0] * M[0, 1]),
    ]

    def rel(a, b):
        return abs(a - b) / max(abs(a), abs(b), 1e-300)

    residuals = [
        rel(Lp[0, 0] * Lp[1, 1], alpha + gamma * L[0, 0] * L[1, 1]),
        rel(Lp[0, 1] * Lp[1, 0], alpha + gamma * L[0, 1] * L[1, 0]),
        rel(Mp[0, 0] * Mp[1, 1], beta + gamma * M[0, 0] * M[1, 1]),
        rel(Mp[0, 1] * Mp[1, 0], beta + gamma * M[0, 1] * M[1, 0]),
        rel(Lp[0, 0] * Mp[1, 1], gamma * L[0, 0] * M[1, 1]),
        rel(Lp[1, 1] * Mp[0, 0], gamma * L[1, 1] * M[0, 0]),
        rel(Lp[0, 1] * Mp[1, 0], gamma * L[0, 1] * M[1, 0]),
        rel(Lp[1, 0] * Mp[0, 1], gamma * L[1, 0] * M[0, 1]),
    ]
    return GammaConstants(alpha, beta, gamma, ratios, alpha_alt, beta_alt, residuals)


def gamma_functional_residuals(p: ParamSet, rng: np.random.Generator, n: int = 20,
                               gc: GammaConstants | None = None,
                               policy: PrecisionPolicy | None = None) -> np.ndarray:
    """Relative residuals of f(x4) - (alpha f(x1) + beta f(x2) + gamma f(x3)).

    f ranges over m11 m22 and m12 m21 for ``n`` random points (m_ij) of V.
    """
    gc = gc or gamma_constants(p, policy=policy)
    E = np.array([[[[basis_value(p, i, j, m, p.x[k], policy) for k in range(4)]
                    for m in (1, 2)] for j in (1, 2)] for i in (1, 2)])
    out = []
    for _ in range(n):
        c = rng.normal(size=(2, 2, 2)) + 1j * rng.normal(size=(2, 2, 2))
        m = np.einsum("ijm,ijmk->ijk", c, E)  # m_ij evaluated at x_1..x_4
        for f in (m[0, 0] * m[1, 1], m[0, 1] * m[1, 0]):
            pred = gc.alpha * f[0] + gc.beta * f[1] + gc.gamma * f[2]
            scale = max(abs(gc.alpha * f[0]), abs(gc.beta * f[1]), abs(gc.gamma * f[2]), abs(f[3]))
            out.append(abs(f[3] - pred) / scale)
    return np.array(out)


@dataclass(frozen=True)
class QuadricCoeffs:
    """Coefficients of A rho sigma + B tau tau' + C rho tau - D rho tau' - E sigma tau + F sigma tau'."""

    A: complex
    B: complex
    C: complex
    D: complex
    E: complex
    F: complex
    i: int = 0

    def as_array(self) -> np.ndarray:
        return np.array([self.A, self.B, self.C, self.D, self.E, self.F], dtype=complex)

    @classmethod
    def from_array(cls, a, i: int = 0) -> "QuadricCoeffs":
        a = [complex(v) for v in a]
        return cls(*a, i=i)

    def normalized(self) -> "QuadricCoeffs":
        a = self.as_array()
        return QuadricCoeffs.from_array(a / a[np.argmax(np.abs(a))], self.i)


def quadric_coeffs(p: ParamSet, i: int, ic: InterpCoeffs | None = None,
                   policy: PrecisionPolicy | None = None) -> QuadricCoeffs:
    """Coefficients of the quadric on which (rho_1, ..., rho_4) of every datum lies.

    E_i = lambda_{i,1} mu'_{i,2} and F_i = lambda'_{i,1} mu_{i,2}: these are
    the labels that come out of expanding the defining 2x2 determinant.
    """
    ic = ic or interp_coeffs(p, policy)
    L, M, Lp, Mp = ic.lam[i - 1], ic.mu[i - 1], ic.lamp[i - 1], ic.mup[i - 1]
    A = L[1] * Mp[1] - Lp[1] * M[1]
    B = L[0] * Mp[0] - Lp[0] * M[0]
    C = Lp[1] * M[0]
    D = L[1] * Mp[0]
    E = L[0] * Mp[1]
    F = Lp[0] * M[1]
    return QuadricCoeffs(A, B, C, D, E, F, i)


def quadric_A_factored(p: ParamSet, i: int, which: str = "A",
                       policy: PrecisionPolicy | None = None) -> complex:
    """A_i = (x3/x1) T(x4/x3 / x2/x1) T([34.2i] / [12.2i]); ``which="B"`` uses j = 1."""
    j = 2 if which == "A" else 1
    x = p.x
    return (x[2] / x[0]) * t_ratio(
        p.q, [x[3] / x[2], bracket(p, 3, 4, j, i)], [x[1] / x[0], bracket(p, 1, 2, j, i)], policy)


def delta(p: ParamSet, i: int, method: str = "bilinear", ic: InterpCoeffs | None = None,
          policy: PrecisionPolicy | None = None) -> complex:
    """Square root of the discriminant, bilinear or fully factored.

    The factored product carries an overall minus sign relative to the
    bilinear expression; it is included here so both methods agree.
    """
    if method == "bilinear":
        ic = ic or interp_coeffs(p, policy)
        L, M, Lp, Mp = ic.lam[i - 1], ic.mu[i - 1], ic.lamp[i - 1], ic.mup[i - 1]
        return Lp[0] * L[1] * M[0] * Mp[1] - L[0] * Lp[1] * Mp[0] * M[1]
    if method != "factored":
        raise ValueError(f"unknown method {method!r}")
    x = p.x
    ii = 3 - i
    nums = [x[2] / x[1], x[3] / x[1], x[2] / x[0], x[3] / x[0], x[3] / x[2],
            p.sigma[0] / p.sigma[1], p.rho[ii - 1] / p.rho[i - 1]]
    b1, b2 = bracket(p, 1, 2, 1, i), bracket(p, 1, 2, 2, i)
    dens = [x[0] / x[1], x[1] / x[0], x[1] / x[0], b1, b1, b2, b2]
    return -bracket(p, 2, 3, 2, i) * t_ratio(p.q, nums, dens, policy)


def gram_matrix(c: QuadricCoeffs) -> np.ndarray:
    """Symmetric matrix (times 2) of the form in the order (rho, sigma, tau, tau')."""
    A, B, C, D, E, F = c.as_array()
    return np.array([[0, A, C, -D], [A, 0, -E, F], [C, -E, 0, B], [-D, F, B, 0]], dtype=complex)


def discriminant(c: QuadricCoeffs) -> complex:
    return complex(np.linalg.det(gram_matrix(c)))


def discriminant_closed(c: QuadricCoeffs) -> complex:
    A, B, C, D, E, F = c.as_array()
    return complex((A * B - C * F - D * E) ** 2 - 4 * C * D * E * F)


def xy_form_residual(c: QuadricCoeffs, ic: InterpCoeffs, pt) -> tuple[float, float]:
    """Check A Phi = X Y + Z Z' at an affine point (rho, sigma, tau, tau').

    Returns the relative residuals of the bracket identity
    A Phi - X Y = E C tau^2 + D F tau'^2 + (AB - CF - DE) tau tau' and of its
    factorisation Z Z' with Z = lam_{i1} lam'_{i2} tau - lam'_{i1} lam_{i2} tau',
    Z' = mu_{i1} mu'_{i2} tau - mu'_{i1} mu_{i2} tau'.
    """
    A, B, C, D, E, F = c.as_array()
    r, s, t, tp = (complex(v) for v in pt)
    phi = A * r * s + B * t * tp + C * r * t - D * r * tp - E * s * t + F * s * tp
    X = A * r - E * t + F * tp
    Y = A * s + C * t - D * tp
    br = E * C * t**2 + D * F * tp**2 + (A * B - C * F - D * E) * t * tp
    i = c.i
    L, M, Lp, Mp = ic.lam[i - 1], ic.mu[i - 1], ic.lamp[i - 1], ic.mup[i - 1]
    Z = L[0] * Lp[1] * t - Lp[0] * L[1] * tp
    Zp = M[0] * Mp[1] * t - Mp[0] * M[1] * tp
    scale = max(abs(A * phi), abs(X * Y), abs(br), 1e-300)
    return abs(A * phi - X * Y - br) / scale, abs(br - Z * Zp) / max(abs(br), abs(Z * Zp), 1e-300)
