"""Monodromy data: theta bases, sampling of points of F, rank-one projectivisation,
the det M = 0 curve, the e_q constants and the tensor model.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .params import ParamSet, congruence_class
from .quadric import Proj1Point, Quad4Point
from .theta import PrecisionPolicy, ThetaZeroError, default_policy, theta, zero_distance

__all__ = [
    "CONVENTIONS",
    "CONSTRAINTS",
    "MonodromyRep",
    "SamplingError",
    "basis_eval_matrix",
    "sample_point",
    "parse_constraint",
    "rho_rank1",
    "RhoTuple",
    "rho_tuple",
    "pi_mixed",
    "det_locus",
    "eq_constant",
    "ConventionChoice",
    "select_convention",
    "TensorPair",
    "tensor_pair",
    "default_x0",
]

CONVENTIONS = ("rowclass", "columnclass")
CONSTRAINTS = tuple(
    f"{name}_{k}={v}" for name in ("rho", "rhoPrime") for k in range(1, 5) for v in ("0", "inf")
)
RANK1_TOL = 1e-8


class SamplingError(RuntimeError):
    """No admissible sample found within the retry budget."""


def basis_eval_matrix(p: ParamSet, i: int, j: int,
                      policy: PrecisionPolicy | None = None) -> np.ndarray:
    """4 x 2 table of e^m_{i,j}(x_k); row k, column m.

    e^m vanishes at x_m, so entries (1, 1) and (2, 2) are set to exactly zero.
    """
    policy = policy or default_policy()
    xk_, s, r = p.x, p.sigma[j - 1], p.rho[i - 1]
    out = np.zeros((4, 2), dtype=complex)
    for k in range(4):
        for m in (1, 2):
            if k == m - 1:
                continue
            xm = xk_[m - 1]
            out[k, m - 1] = (theta(p.q, -xk_[k] / xm, policy)
                             * theta(p.q, -xk_[k] * xm * s / r, policy))
    return out


def _basis_at(p: ParamSet, i: int, j: int, xx, policy) -> np.ndarray:
    out = np.empty(2, dtype=complex)
    for m in (1, 2):
        xm = p.x[m - 1]
        out[m - 1] = (theta(p.q, -xx / xm, policy)
                      * theta(p.q, -xx * xm * p.sigma[j - 1] / p.rho[i - 1], policy))
    return out


@dataclass(frozen=True)
class MonodromyRep:
    """m_{i,j} = a e^1_{i,j} + b e^2_{i,j} with (a, b) = coeff[i-1, j-1]."""

    params: ParamSet
    coeff: np.ndarray  # shape (2, 2, 2)
    policy: PrecisionPolicy = field(default_factory=default_policy)

    def __post_init__(self):
        c = np.asarray(self.coeff, dtype=complex)
        if c.shape != (2, 2, 2):
            raise ValueError("coeff must have shape (2, 2, 2)")
        object.__setattr__(self, "coeff", c)

    def _table(self) -> np.ndarray:
        # cached evaluations of e^1, e^2 at x_1..x_4, shape (2, 2, 4, 2)
        t = self.__dict__.get("_tab")
        if t is None:
            t = np.array([[basis_eval_matrix(self.params, i, j, self.policy)
                           for j in (1, 2)] for i in (1, 2)])
            object.__setattr__(self, "_tab", t)
        return t

    def at_point(self, k: int) -> np.ndarray:
        """M(x_k) as a 2 x 2 array."""
        t = self._table()[:, :, k - 1, :]
        return np.einsum("ijm,ijm->ij", self.coeff, t)

    def matrix(self, xx) -> np.ndarray:
        out = np.empty((2, 2), dtype=complex)
        for i, j in itertools.product((1, 2), (1, 2)):
            out[i - 1, j - 1] = self.coeff[i - 1, j - 1] @ _basis_at(self.params, i, j, xx, self.policy)
        return out

    def gauge(self, gamma, delta) -> "MonodromyRep":
        """Gamma M Delta^{-1} for diagonal Gamma = diag(gamma), Delta = diag(delta)."""
        g, d = np.asarray(gamma, dtype=complex), np.asarray(delta, dtype=complex)
        c = self.coeff * (g[:, None] / d[None, :])[:, :, None]
        new = MonodromyRep(self.params, c, self.policy)
        if "_tab" in self.__dict__:
            object.__setattr__(new, "_tab", self.__dict__["_tab"])
        return new

    def det_residual(self, k: int) -> float:
        """|det M(x_k)| / (max entry)^2."""
        M = self.at_point(k)
        return float(abs(np.linalg.det(M)) / np.abs(M).max() ** 2)


def parse_constraint(constraint: str, convention: str = "rowclass"):
    """Translate e.g. ``rho_3=inf`` into (kind, r, k): line ``r`` of kind row|col of M(x_k) is zero.

    Labels refer to the quadric-chart coordinates of :func:`rho_tuple`.
    """
    m = re.fullmatch(r"(rho|rhoPrime)_([1-4])=(0|inf)", constraint.strip())
    if not m:
        raise ValueError(f"unknown constraint {constraint!r}")
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    name, k, val = m.group(1), int(m.group(2)), m.group(3)
    r = 2 if val == "0" else 1
    kind = "col" if name == "rho" else "row"
    if convention == "columnclass":
        kind = "row" if kind == "col" else "col"
    return kind, r, k


def _vanishing_coeffs(p: ParamSet, i: int, j: int, k: int, policy) -> np.ndarray:
    # (a, b) of the element theta(-x/x_k) theta(-x x_k sigma_j/rho_i), which vanishes at x_k
    if k in (1, 2):
        out = np.zeros(2, dtype=complex)
        out[k - 1] = 1
        return out
    B = np.array([_basis_at(p, i, j, p.x[0], policy), _basis_at(p, i, j, p.x[1], policy)])
    xk = p.x[k - 1]
    c = xk * p.sigma[j - 1] / p.rho[i - 1]
    rhs = [theta(p.q, -p.x[l] / xk, policy) * theta(p.q, -p.x[l] * c, policy) for l in (0, 1)]
    return np.linalg.solve(B, rhs)


def _rand_c(rng, size=None):
    return rng.normal(size=size) + 1j * rng.normal(size=size)


def _kernel(rows: np.ndarray, dim: int, tol: float = 1e-10) -> Optional[np.ndarray]:
    _, s, vh = np.linalg.svd(rows)
    n = rows.shape[1]
    rank = int(np.sum(s > tol * s[0]))
    if n - rank != dim:
        return None
    return vh[rank:].conj().T


def sample_point(p: ParamSet, rng: np.random.Generator, constraint: Optional[str] = None,
                 convention: str = "rowclass", max_retries: int = 100,
                 policy: PrecisionPolicy | None = None) -> MonodromyRep:
    """Random point of F, optionally on one of the 16 special loci.

    Unconstrained: the first column is drawn at random and the second column
    is the one-dimensional kernel of det M(x_k) = 0, k = 1, 2, 3.  The fourth
    zero is then forced by the product relation.
    """
    policy = policy or default_policy()
    tab = np.array([[basis_eval_matrix(p, i, j, policy) for j in (1, 2)] for i in (1, 2)])
    spec = parse_constraint(constraint, convention) if constraint else None
    for _ in range(max_retries):
        coeff = np.zeros((2, 2, 2), dtype=complex)
        if spec is None:
            coeff[0, 0], coeff[1, 0] = _rand_c(rng, 2), _rand_c(rng, 2)
            rows = []
            for k in range(3):
                m11 = coeff[0, 0] @ tab[0, 0, k]
                m21 = coeff[1, 0] @ tab[1, 0, k]
                rows.append(np.concatenate([-m21 * tab[0, 1, k], m11 * tab[1, 1, k]]))
            K = _kernel(np.array(rows), 1)
            if K is None:
                continue
            v = K[:, 0]
            coeff[0, 1], coeff[1, 1] = v[:2], v[2:]
        else:
            kind, r, k = spec
            rr = 3 - r
            others = [l for l in range(4) if l != k - 1][:2]
            rows = []
            if kind == "row":
                for j in (1, 2):
                    coeff[r - 1, j - 1] = _vanishing_coeffs(p, r, j, k, policy) * _rand_c(rng)
                sgn = 1 if r == 1 else -1
                for l in others:
                    a1 = coeff[r - 1, 0] @ tab[r - 1, 0, l]
                    a2 = coeff[r - 1, 1] @ tab[r - 1, 1, l]
                    rows.append(np.concatenate([-sgn * a2 * tab[rr - 1, 0, l],
                                                sgn * a1 * tab[rr - 1, 1, l]]))
            else:
                for i in (1, 2):
                    coeff[i - 1, r - 1] = _vanishing_coeffs(p, i, r, k, policy) * _rand_c(rng)
                sgn = 1 if r == 1 else -1
                for l in others:
                    b1 = coeff[0, r - 1] @ tab[0, r - 1, l]
                    b2 = coeff[1, r - 1] @ tab[1, r - 1, l]
                    rows.append(np.concatenate([-sgn * b2 * tab[0, rr - 1, l],
                                                sgn * b1 * tab[1, rr - 1, l]]))
            K = _kernel(np.array(rows), 2)
            if K is None:
                continue
            v = K @ _rand_c(rng, 2)
            if kind == "row":
                coeff[rr - 1, 0], coeff[rr - 1, 1] = v[:2], v[2:]
            else:
                coeff[0, rr - 1], coeff[1, rr - 1] = v[:2], v[2:]
        norms = np.linalg.norm(coeff, axis=2)
        if norms.min() < 1e-10 * norms.max():
            continue  # some m_{i,j} vanishes identically
        coeff = coeff / norms.max()
        rep = MonodromyRep(p, coeff, policy)
        object.__setattr__(rep, "_tab", tab)
        return rep
    raise SamplingError(f"no admissible sample for constraint {constraint!r} "
                        f"after {max_retries} tries")


def rho_rank1(A, convention: str = "rowclass") -> tuple:
    """(rho, rho') of a rank-one matrix: rho = [a11:a12] = [a21:a22], rho' = [a11:a21] = [a12:a22].

    The larger row (column) is used as representative. ``columnclass`` swaps
    the two outputs.
    """
    A = np.asarray(A, dtype=complex)
    scale = np.abs(A).max()
    if scale == 0:
        raise ValueError("the zero matrix has no rank-one class")
    if abs(np.linalg.det(A)) >= RANK1_TOL * scale**2:
        raise ValueError("matrix is not of rank one")
    row = A[0] if np.abs(A[0]).max() >= np.abs(A[1]).max() else A[1]
    col = A[:, 0] if np.abs(A[:, 0]).max() >= np.abs(A[:, 1]).max() else A[:, 1]
    rho, rhop = Proj1Point(row[0], row[1]), Proj1Point(col[0], col[1])
    if convention == "columnclass":
        return rhop, rho
    if convention != "rowclass":
        raise ValueError(f"unknown convention {convention!r}")
    return rho, rhop


def _ratio(a: Proj1Point, b: Proj1Point) -> Optional[Proj1Point]:
    x, y = a.x * b.y, a.y * b.x
    if x == 0 and y == 0:
        return None
    return Proj1Point(x, y).normalized()


@dataclass
class RhoTuple:
    rho: Quad4Point
    rhoPrime: Quad4Point
    Pi: dict
    PiPrime: dict
    convention: str


def rho_tuple(M: MonodromyRep, convention: str = "rowclass") -> RhoTuple:
    """Images of M(x_1), ..., M(x_4) in (P^1)^4, read in the chart of the quadric.

    Each class [a:b] from :func:`rho_rank1` is stored as [b:a], so that the
    tuple satisfies the quadric in the affine coordinate x/y.
    Pi[k, l] = rho'_k / rho'_l and PiPrime[k, l] = rho_k / rho_l.
    """
    rs, rps = [], []
    for k in range(1, 5):
        r, rp = rho_rank1(M.at_point(k), convention)
        rs.append(r.flip().normalized())
        rps.append(rp.flip().normalized())
    Pi, PiP = {}, {}
    for k, l in itertools.permutations(range(4), 2):
        Pi[k + 1, l + 1] = _ratio(rps[k], rps[l])
        PiP[k + 1, l + 1] = _ratio(rs[k], rs[l])
    return RhoTuple(Quad4Point(tuple(rs)), Quad4Point(tuple(rps)), Pi, PiP, convention)


def pi_mixed(M1, M2) -> tuple:
    """(Pi, Pi') of two rank-one matrices: [f1 g2 : f2 g1] from columns, likewise from rows.

    A component whose two entries both vanish is returned as None.
    """
    out = []
    for take in (lambda A: A[:, 0] if np.abs(A[:, 0]).max() >= np.abs(A[:, 1]).max() else A[:, 1],
                 lambda A: A[0] if np.abs(A[0]).max() >= np.abs(A[1]).max() else A[1]):
        f, g = take(np.asarray(M1, dtype=complex)), take(np.asarray(M2, dtype=complex))
        a, b = f[0] * g[1], f[1] * g[0]
        scale = max(np.abs(f).max() * np.abs(g).max(), 1e-300)
        out.append(None if max(abs(a), abs(b)) < 1e-14 * scale else Proj1Point(a, b).normalized())
    if out[0] is None and out[1] is None:
        raise ValueError("both Pi and Pi' are undefined for this pair")
    return tuple(out)


def det_locus(p: ParamSet, t, policy: PrecisionPolicy | None = None) -> Quad4Point:
    """Point ([theta(sigma_2 x_k t) : theta(sigma_1 x_k t)])_k of the det M = 0 curve."""
    policy = policy or default_policy()
    t = complex(t)
    if t == 0:
        raise ValueError("t must be nonzero")
    comps = []
    for xk in p.x:
        a = theta(p.q, p.sigma[1] * xk * t, policy)
        b = theta(p.q, p.sigma[0] * xk * t, policy)
        if zero_distance(p.q, -p.sigma[0] * xk * t) < policy.zero_tol:
            b = 0
        comps.append(Proj1Point(a, b))
    return Quad4Point(tuple(comps))


def eq_constant(p: ParamSet, which: int, kind: str = "T",
                policy: PrecisionPolicy | None = None) -> complex:
    """e_q^{w;1,2;3} with w = ``which``, theta replaced by T when ``kind="T"``."""
    policy = policy or default_policy()
    if kind not in ("T", "theta"):
        raise ValueError(f"unknown kind {kind!r}")
    sgn = -1 if kind == "T" else 1
    s = p.sigma[which - 1]
    r1, r2 = p.rho
    x1, x2, x3 = p.x[:3]
    nums = [s * x1 * x3 / r1, s * x2 * x3 / r2]
    dens = [s * x2 * x3 / r1, s * x1 * x3 / r2]
    for d in dens:
        if zero_distance(p.q, -sgn * d) < policy.zero_tol:
            raise ThetaZeroError(f"denominator argument {d} sits on a theta zero")
    out = 1.0 + 0j
    for a, b in zip(nums, dens):
        out *= theta(p.q, sgn * a, policy) / theta(p.q, sgn * b, policy)
    return out


# reading -> list of (constraint, Pi key, which)
_READINGS = {
    "printed": [("rho_1=0", (1, 2), 1)],
    "corrected": [("rho_3=inf", (2, 1), 1), ("rho_3=0", (2, 1), 2)],
}


@dataclass
class ConventionChoice:
    reading: Optional[str]
    kind: Optional[str]
    convention: Optional[str]
    residuals: dict

    @property
    def found(self) -> bool:
        return self.convention is not None

    def to_dict(self) -> dict:
        return {
            "reading": self.reading,
            "kind": self.kind,
            "convention": self.convention,
            "residuals": {"/".join(k): v for k, v in self.residuals.items()},
        }


def _pi_value(pt: Optional[Proj1Point]) -> complex:
    if pt is None:
        return complex("nan")
    return pt.affine()


def eq_relation_residuals(p: ParamSet, rng: np.random.Generator, reading: str, kind: str,
                          convention: str, n: int = 5,
                          policy: PrecisionPolicy | None = None) -> list:
    """|Pi - e_q| / |e_q| on ``n`` samples per locus of the given reading."""
    out = []
    for constraint, key, which in _READINGS[reading]:
        e = eq_constant(p, which, kind, policy)
        for _ in range(n):
            M = sample_point(p, rng, constraint, convention, policy=policy)
            v = _pi_value(rho_tuple(M, convention).Pi[key])
            r = abs(v - e) / abs(e)
            out.append(float(r) if np.isfinite(r) else float("inf"))
    return out


def select_convention(p: ParamSet, rng: np.random.Generator, n: int = 5, tol: float = 1e-7,
                      policy: PrecisionPolicy | None = None) -> ConventionChoice:
    """Try every (reading, kind, convention) and keep the first under which Pi = e_q holds."""
    residuals = {}
    chosen = None
    for reading in ("printed", "corrected"):
        for kind in ("theta", "T"):
            for conv in CONVENTIONS:
                res = eq_relation_residuals(p, rng, reading, kind, conv, n, policy)
                worst = max(res)
                residuals[reading, kind, conv] = worst
                if chosen is None and worst < tol:
                    chosen = (reading, kind, conv)
    if chosen is None:
        return ConventionChoice(None, None, None, residuals)
    return ConventionChoice(*chosen, residuals)


def default_x0(p: ParamSet, tol: float = 1e-6) -> complex:
    """x_1 q^{1/2} (1+i)/|1+i|, rotated slightly until it is congruent to no x_k."""
    x0 = p.x[0] * np.sqrt(p.q) * (1 + 1j) / abs(1 + 1j)
    for _ in range(100):
        if all(congruence_class(x0, xk, p.q, tol) is None for xk in p.x):
            return complex(x0)
        x0 *= np.exp(0.1j)
    raise RuntimeError("could not place the auxiliary point")


@dataclass
class TensorPair:
    yplus: np.ndarray
    yminus: np.ndarray
    segre_residuals: tuple
    line_residuals: np.ndarray
    transversality: float


def tensor_pair(M: MonodromyRep, x0=None, tol: float = 1e-6) -> TensorPair:
    """Evaluation vectors of m11 m22 and m12 m21 at (x_1, x_2, x_3, x_0).

    The segre residuals measure X T - Y Z for the coefficient tensor of each
    product in the basis e^a (x) e^b; line residuals are |y+ - y-| / scale at
    x_1, x_2, x_3, and ``transversality`` is the same quantity at x_0.
    """
    p = M.params
    x0 = default_x0(p) if x0 is None else complex(x0)
    if any(congruence_class(x0, xk, p.q, tol) is not None for xk in p.x):
        raise ValueError("x0 is congruent to one of the singular points")
    mats = [M.at_point(k) for k in (1, 2, 3)] + [M.matrix(x0)]
    yp = np.array([A[0, 0] * A[1, 1] for A in mats])
    ym = np.array([A[0, 1] * A[1, 0] for A in mats])
    segre = []
    for (a, b), (c, d) in (((0, 0), (1, 1)), ((0, 1), (1, 0))):
        u, v = M.coeff[a, b], M.coeff[c, d]
        X, Y, Z, W = u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1]
        segre.append(float(abs(X * W - Y * Z) / max(abs(X * W) + abs(Y * Z), 1e-300)))
    scale = np.maximum(np.abs(yp), np.abs(ym))
    diff = np.abs(yp - ym) / scale
    return TensorPair(yp, ym, tuple(segre), diff[:3], float(diff[3]))
