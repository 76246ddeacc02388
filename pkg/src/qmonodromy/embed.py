"""eta coordinates in C^6, elimination to two quadrics in C^4, the 16 lines and
the cubic surface equation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .coeffs import QuadricCoeffs, quadric_coeffs
from .monodromy import CONSTRAINTS, rho_tuple, sample_point
from .params import ParamSet
from .quadric import Quad4Point

__all__ = [
    "PAIRS",
    "EtaPoint",
    "EtaPoleError",
    "eta",
    "linear_form",
    "c6_residuals",
    "EliminatedQuadrics",
    "eliminate_to_c4",
    "LineSpec",
    "LinesReport",
    "lines16",
    "fit_line",
    "lines_equal",
    "CubicSurface",
    "cubic_surface_eq",
    "sylvester_resultant",
]

PAIRS = ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))
C4_PAIRS = ((1, 2), (1, 3), (1, 4), (2, 3))
CANCEL = 1e-13


class EtaPoleError(ValueError):
    """The point lies on the reference quadric, where eta has a pole."""


@dataclass(frozen=True)
class EtaPoint:
    eta: dict

    def __getitem__(self, ij):
        return self.eta[tuple(ij)]

    def as_array(self) -> np.ndarray:
        return np.array([self.eta[ij] for ij in PAIRS])

    def c4(self) -> np.ndarray:
        return np.array([self.eta[ij] for ij in C4_PAIRS])

    def plucker_residuals(self) -> tuple:
        a = self.eta[1, 2] * self.eta[3, 4]
        b = self.eta[1, 3] * self.eta[2, 4]
        c = self.eta[1, 4] * self.eta[2, 3]
        s = max(abs(a), abs(b), abs(c), 1e-300)
        return abs(a - b) / s, abs(b - c) / s


def _reference(p: ParamSet, i: int = 1) -> QuadricCoeffs:
    return quadric_coeffs(p.at_omega(1.0), i)


def eta(p: ParamSet, pt: Quad4Point, i: int = 1, ref: QuadricCoeffs | None = None,
        pole_tol: float = 1e-12) -> EtaPoint:
    """eta_ij = rho_i rho_j / Phi_{A(1)}(rho), read bihomogeneously.

    Numerator and denominator both have degree one in every component, so the
    value does not depend on the representatives chosen for the four classes.
    """
    ref = ref or _reference(p, i)
    h = pt.homogeneous()
    X, Y = h[:, 0], h[:, 1]
    A, B, C, D, E, F = ref.as_array()
    mons = np.array([A * X[0] * X[1] * Y[2] * Y[3], B * Y[0] * Y[1] * X[2] * X[3],
                     C * X[0] * Y[1] * X[2] * Y[3], -D * X[0] * Y[1] * Y[2] * X[3],
                     -E * Y[0] * X[1] * X[2] * Y[3], F * Y[0] * X[1] * Y[2] * X[3]])
    phi = mons.sum()
    if abs(phi) < pole_tol * max(np.abs(mons).sum(), 1e-300):
        raise EtaPoleError("point lies on the reference quadric")
    out = {}
    for a, b in PAIRS:
        num = 1.0 + 0j
        for k in range(4):
            num *= X[k] if k in (a - 1, b - 1) else Y[k]
        out[a, b] = num / phi
    return EtaPoint(out)


def linear_form(c: QuadricCoeffs, e) -> complex:
    """A eta12 + C eta13 - D eta14 - E eta23 + F eta24 + B eta34."""
    A, B, C, D, E, F = c.as_array()
    g = e.eta if isinstance(e, EtaPoint) else e
    return (A * g[1, 2] + C * g[1, 3] - D * g[1, 4] - E * g[2, 3]
            + F * g[2, 4] + B * g[3, 4])


def c6_residuals(p: ParamSet, omega, e: EtaPoint, i: int = 1) -> np.ndarray:
    """Relative residuals of the four equations cutting the surface out of C^6.

    Linear form of A(omega) equal to 0, linear form of A(1) equal to 1, and the
    two relations eta12 eta34 = eta13 eta24 = eta14 eta23.
    """
    c = quadric_coeffs(p.at_omega(omega), i)
    ref = _reference(p, i)
    out = []
    for cc, target in ((c, 0.0), (ref, 1.0)):
        A, B, C, D, E, F = cc.as_array()
        g = e.eta
        terms = np.array([A * g[1, 2], C * g[1, 3], -D * g[1, 4], -E * g[2, 3],
                          F * g[2, 4], B * g[3, 4]])
        out.append(abs(terms.sum() - target) / max(np.abs(terms).sum(), abs(target)))
    out.extend(e.plucker_residuals())
    return np.array(out, dtype=float)


# ---- degree-2 polynomials in (eta12, eta13, eta14, eta23) -------------------

def _var(m: int) -> np.ndarray:
    v = np.zeros(5, dtype=complex)
    v[m + 1] = 1
    return v


def _mul(a: np.ndarray, b: np.ndarray) -> dict:
    # product of two affine forms [const, c12, c13, c14, c23]
    out: dict = {}
    for s, t in itertools.product(range(5), range(5)):
        c = a[s] * b[t]
        if c == 0:
            continue
        exp = [0, 0, 0, 0]
        if s:
            exp[s - 1] += 1
        if t:
            exp[t - 1] += 1
        out[tuple(exp)] = out.get(tuple(exp), 0) + c
    return out


def _sub(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) - v
    m = max((abs(v) for v in out.values()), default=0.0)
    return {k: complex(v) for k, v in out.items() if abs(v) > CANCEL * m}


def _eval_poly(P: dict, z) -> tuple:
    """Value and a scale sum_e |c_e| max(1, |z|)^deg(e) for relative residuals."""
    terms = np.array([c * np.prod([z[m] ** e for m, e in enumerate(exp)]) for exp, c in P.items()])
    m = max(1.0, float(np.abs(z).max()))
    scale = sum(abs(c) * m ** sum(exp) for exp, c in P.items())
    return complex(terms.sum()), float(scale)


@dataclass
class EliminatedQuadrics:
    """Two quadrics in (eta12, eta13, eta14, eta23) plus the affine formulas for eta24, eta34."""

    u: dict
    v: dict
    eta24: np.ndarray
    eta34: np.ndarray
    omega: complex
    condition: float

    def reconstruct(self, z) -> tuple:
        zz = np.concatenate([[1.0], np.asarray(z, dtype=complex)])
        return complex(self.eta24 @ zz), complex(self.eta34 @ zz)

    def evaluate(self, z) -> tuple:
        return _eval_poly(self.u, z)[0], _eval_poly(self.v, z)[0]

    def residuals(self, z) -> tuple:
        out = []
        for P in (self.u, self.v):
            val, s = _eval_poly(P, z)
            out.append(abs(val) / s if s > 0 else 0.0)
        return tuple(out)

    def degree2(self, which: str) -> dict:
        P = getattr(self, which)
        return {k: c for k, c in P.items() if sum(k) == 2}


def eliminate_to_c4(p: ParamSet, omega, i: int = 1, cond_cap: float = 1e8) -> EliminatedQuadrics:
    """Solve the two linear equations for eta24, eta34 and substitute into the Plucker relations.

    Returns u = eta12 eta34 - eta14 eta23 and v = eta13 eta24 - eta14 eta23.
    """
    c = quadric_coeffs(p.at_omega(omega), i)
    ref = _reference(p, i)
    A, B, C, D, E, F = c.as_array()
    A1, B1, C1, D1, E1, F1 = ref.as_array()
    Msys = np.array([[F, B], [F1, B1]])
    cond = float(np.linalg.cond(Msys))
    if not np.isfinite(cond) or cond > cond_cap:
        raise ValueError(f"elimination is ill conditioned (cond = {cond:.3g})")
    # right-hand sides as affine forms in (eta12, eta13, eta14, eta23)
    r0 = -np.array([0, A, C, -D, -E], dtype=complex)
    r1 = np.array([1, 0, 0, 0, 0], dtype=complex) - np.array([0, A1, C1, -D1, -E1], dtype=complex)
    sol = np.linalg.solve(Msys, np.array([r0, r1]))
    e24, e34 = sol[0], sol[1]
    u = _sub(_mul(_var(0), e34), _mul(_var(2), _var(3)))
    v = _sub(_mul(_var(1), e24), _mul(_var(2), _var(3)))
    return EliminatedQuadrics(u, v, e24, e34, complex(omega), cond)


# ---- lines ------------------------------------------------------------------

def fit_line(points: np.ndarray) -> tuple:
    """Best line through ``points``: (base, unit direction, collinearity).

    Collinearity is the largest distance to the line over the spread of the points.
    """
    P = np.asarray(points, dtype=complex)
    base = P.mean(axis=0)
    Z = P - base
    _, s, vh = np.linalg.svd(Z)
    d = vh[0]
    d = d / d[np.argmax(np.abs(d))]
    d = d / np.linalg.norm(d)
    perp = Z - np.outer(Z @ d.conj(), d)
    spread = max(np.linalg.norm(Z, axis=1).max(), 1e-300)
    return base, d, float(np.linalg.norm(perp, axis=1).max() / spread)


def lines_equal(b1, d1, b2, d2, tol: float = 1e-6) -> bool:
    d1, d2 = np.asarray(d1), np.asarray(d2)
    par = np.linalg.norm(d2 - (d1.conj() @ d2) * d1)
    off = np.asarray(b2) - np.asarray(b1)
    dist = np.linalg.norm(off - (d1.conj() @ off) * d1)
    scale = max(1.0, np.linalg.norm(b1), np.linalg.norm(b2))
    return bool(par < tol and dist < tol * scale)


@dataclass
class LineSpec:
    label: str
    base: np.ndarray
    direction: np.ndarray
    collinearity: float
    quad_residual: float
    points: np.ndarray
    ratio_spread: Optional[float] = None

    @property
    def family(self) -> str:
        return "rhoPrime" if self.label.startswith("rhoPrime") else "rho"

    def to_dict(self) -> dict:
        pair = lambda z: [float(z.real), float(z.imag)]
        out = {
            "label": self.label,
            "base": [pair(z) for z in self.base],
            "direction": [pair(z) for z in self.direction],
            "collinearity": self.collinearity,
            "quad_residual": self.quad_residual,
        }
        if self.ratio_spread is not None:
            out["ratio_spread"] = self.ratio_spread
        return out


@dataclass
class LinesReport:
    lines: list
    quadrics: EliminatedQuadrics
    diagnostics: dict = field(default_factory=dict)

    def by_label(self, label: str) -> LineSpec:
        return next(ln for ln in self.lines if ln.label == label)


def _ratio_spread(pts: list, k: int) -> float:
    # on a rho'_k line the three eta_{k,j} keep a fixed ratio
    keys = [tuple(sorted((k, j))) for j in range(1, 5) if j != k]
    V = np.array([[e[kk] for kk in keys] for e in pts])
    V = V / V[:, [np.argmax(np.abs(V[0]))]]
    return float(np.abs(V - V[0]).max())


def _printed_hyperplanes(pts: list) -> float:
    # eta13 = a eta23, eta12 = b eta23, b eta13 = g eta14, each fitted by least squares
    E = {ij: np.array([e[ij] for e in pts]) for ij in PAIRS}
    worst = 0.0
    for y, x in (((1, 3), (2, 3)), ((1, 2), (2, 3))):
        a = np.vdot(E[x], E[y]) / np.vdot(E[x], E[x])
        worst = max(worst, np.linalg.norm(E[y] - a * E[x]) / np.linalg.norm(E[y]))
    b = np.vdot(E[2, 3], E[1, 2]) / np.vdot(E[2, 3], E[2, 3])
    g = np.vdot(E[1, 4], b * E[1, 3]) / np.vdot(E[1, 4], E[1, 4])
    worst = max(worst, np.linalg.norm(b * E[1, 3] - g * E[1, 4]) / np.linalg.norm(b * E[1, 3]))
    return float(worst)


def lines16(p: ParamSet, omega=None, rng: np.random.Generator | None = None,
            n_samples: int = 4, convention: str = "rowclass", i: int = 1,
            tol: float = 1e-6) -> LinesReport:
    """Fit the 16 lines from constrained samples and check them against the quadrics.

    ``omega`` defaults to the parameter set's own omega (the only surface the
    samples are guaranteed to lie on).
    """
    rng = rng or np.random.default_rng(0)
    omega = p.omega if omega is None else complex(omega)
    pw = p.at_omega(omega)
    Q = eliminate_to_c4(p, omega, i)
    ref = _reference(p, i)
    lines = []
    for label in CONSTRAINTS:
        pts = []
        for _ in range(n_samples):
            M = sample_point(pw, rng, label, convention)
            pts.append(eta(pw, rho_tuple(M, convention).rho, i, ref=ref))
        Z = np.array([e.c4() for e in pts])
        base, d, col = fit_line(Z)
        proj = (Z - base) @ d.conj()
        span = np.abs(proj).max()
        svals = np.linspace(-2 * span, 2 * span, 9)
        qres = max(max(Q.residuals(base + s * d)) for s in svals)
        ln = LineSpec(label, base, d, col, float(qres), Z)
        if label.startswith("rhoPrime"):
            ln.ratio_spread = _ratio_spread(pts, int(label.split("_")[1][0]))
            if label == "rhoPrime_1=0":
                ln.printed_residual = _printed_hyperplanes(pts)
        lines.append(ln)
    diag: dict = {"within_family_coincidences": [], "cross_family_coincidences": []}
    for a, b in itertools.combinations(lines, 2):
        if lines_equal(a.base, a.direction, b.base, b.direction, tol):
            key = "within" if a.family == b.family else "cross"
            diag[f"{key}_family_coincidences"].append([a.label, b.label])
    distinct = []
    for ln in lines:
        if not any(lines_equal(ln.base, ln.direction, o.base, o.direction, tol) for o in distinct):
            distinct.append(ln)
    diag["distinct_count"] = len(distinct)
    diag["printed_rhoPrime_hyperplane_residual"] = getattr(
        next(ln for ln in lines if ln.label == "rhoPrime_1=0"), "printed_residual", None)
    return LinesReport(lines, Q, diag)


# ---- cubic surface ----------------------------------------------------------

def sylvester_resultant(P, Q) -> complex:
    """Resultant of two polynomials given by coefficients, highest degree first."""
    P = np.trim_zeros(np.asarray(P, dtype=complex), "f")
    Q = np.trim_zeros(np.asarray(Q, dtype=complex), "f")
    m, n = len(P) - 1, len(Q) - 1
    if m < 0 or n < 0:
        return 0j
    S = np.zeros((m + n, m + n), dtype=complex)
    for r in range(n):
        S[r, r:r + m + 1] = P
    for r in range(m):
        S[n + r, r:r + n + 1] = Q
    return complex(np.linalg.det(S)) if m + n else 1 + 0j


@dataclass
class CubicSurface:
    coeffs: QuadricCoeffs
    P_printed: np.ndarray
    Q_printed: np.ndarray
    P_derived: np.ndarray
    Q_derived: np.ndarray
    resultant_printed: complex
    resultant_derived: complex

    def terms(self, X, Y, Z) -> np.ndarray:
        A, B, C, D, E, F = self.coeffs.as_array()
        return np.array([A * X * Y * Y * Z, C * X * Y * Z, -D * X * Y, -E * Y * Z, F * Y, B])

    def F_eval(self, X, Y, Z) -> complex:
        return complex(self.terms(X, Y, Z).sum())

    def F_residual(self, X, Y, Z) -> float:
        t = self.terms(X, Y, Z)
        return float(abs(t.sum()) / np.abs(t).sum())

    def F_grad(self, X, Y, Z) -> np.ndarray:
        A, B, C, D, E, F = self.coeffs.as_array()
        return np.array([
            A * Y * Y * Z + C * Y * Z - D * Y,
            2 * A * X * Y * Z + C * X * Z - D * X - E * Z + F,
            A * X * Y * Y + C * X * Y - E * Y,
        ])


def cubic_surface_eq(c: QuadricCoeffs) -> CubicSurface:
    """F(X, Y, Z) = A X Y^2 Z + C X Y Z - D X Y - E Y Z + F Y + B and its singularity test.

    F_X = 0 and F_Z = 0 give Z = D/(AY + C), X = E/(AY + C) away from Y = 0;
    substituting into F and F_Y and clearing (AY + C)^2 gives Q and P below.
    The coefficient vectors as printed in the literature are kept alongside.
    Resultants are taken after scaling each polynomial to unit max-modulus.
    """
    A, B, C, D, E, F = c.as_array()
    P_pr = np.array([-A * A * E, A * (A * F - 2 * C * E), C * (2 * A * F - C * E), C * (D * E + C * F)])
    Q_pr = np.array([A * F * F, A * (2 * C * F - 2 * D * E + A * B),
                     C * (2 * A * B - 2 * D * E + C * F), B * C * C])
    Q_dv = np.array([A * A * F, A * A * B + 2 * A * C * F - A * D * E,
                     2 * A * B * C + C * C * F - C * D * E, B * C * C])
    P_dv = np.array([A * A * F, 2 * A * C * F, C * C * F - C * D * E])
    unit = lambda v: v / np.abs(v).max()
    return CubicSurface(c, P_pr, Q_pr, P_dv, Q_dv,
                        sylvester_resultant(unit(P_pr), unit(Q_pr)),
                        sylvester_resultant(unit(P_dv), unit(Q_dv)))
