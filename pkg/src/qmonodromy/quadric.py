"""The quadratic form Phi_A on C^4 and its bihomogeneous extension to (P^1)^4."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .coeffs import QuadricCoeffs, gram_matrix

__all__ = [
    "Proj1Point",
    "Quad4Point",
    "eval_form",
    "eval_form_residual",
    "eval_affine",
    "classify",
    "ClassifyResult",
    "PencilSpec",
    "pencil_membership",
    "pencil_residual",
    "BoundaryReport",
    "boundary_analysis",
    "special_line_point",
]

INF = complex("inf")


@dataclass(frozen=True)
class Proj1Point:
    """Class [x:y] of P^1; the affine coordinate is x/y."""

    x: complex
    y: complex

    def __post_init__(self):
        object.__setattr__(self, "x", complex(self.x))
        object.__setattr__(self, "y", complex(self.y))
        if self.x == 0 and self.y == 0:
            raise ValueError("[0:0] is not a point of P^1")

    @classmethod
    def from_affine(cls, v) -> "Proj1Point":
        v = complex(v)
        if not np.isfinite(v):
            return cls(1, 0)
        return cls(v, 1)

    def normalized(self) -> "Proj1Point":
        s = max(abs(self.x), abs(self.y))
        return Proj1Point(self.x / s, self.y / s)

    def affine(self) -> complex:
        return self.x / self.y if self.y != 0 else INF

    def flip(self) -> "Proj1Point":
        """Same point read in the inverse chart: [x:y] -> [y:x]."""
        return Proj1Point(self.y, self.x)

    def scaled(self, lam) -> "Proj1Point":
        """C*-action [x:y] -> [lam x : y]."""
        return Proj1Point(complex(lam) * self.x, self.y)

    def is_zero(self, tol: float = 1e-10) -> bool:
        n = self.normalized()
        return abs(n.x) < tol

    def is_inf(self, tol: float = 1e-10) -> bool:
        n = self.normalized()
        return abs(n.y) < tol

    def equals(self, other: "Proj1Point", tol: float = 1e-9) -> bool:
        a, b = self.normalized(), other.normalized()
        return abs(a.x * b.y - a.y * b.x) < tol


@dataclass(frozen=True)
class Quad4Point:
    comps: tuple

    def __post_init__(self):
        comps = tuple(c if isinstance(c, Proj1Point) else Proj1Point.from_affine(c)
                      for c in self.comps)
        if len(comps) != 4:
            raise ValueError("a point of (P^1)^4 has four components")
        object.__setattr__(self, "comps", comps)

    @classmethod
    def from_affine(cls, vals: Sequence) -> "Quad4Point":
        return cls(tuple(Proj1Point.from_affine(v) for v in vals))

    def __getitem__(self, k):
        return self.comps[k]

    def normalized(self) -> "Quad4Point":
        return Quad4Point(tuple(c.normalized() for c in self.comps))

    def affine(self) -> np.ndarray:
        return np.array([c.affine() for c in self.comps])

    def scaled(self, lam) -> "Quad4Point":
        return Quad4Point(tuple(c.scaled(lam) for c in self.comps))

    def homogeneous(self) -> np.ndarray:
        """4 x 2 array of normalized (x, y) pairs."""
        n = self.normalized()
        return np.array([[c.x, c.y] for c in n.comps])


def _monomials(c: QuadricCoeffs, pt: Quad4Point) -> np.ndarray:
    h = pt.homogeneous()
    (x1, y1), (x2, y2), (x3, y3), (x4, y4) = h
    A, B, C, D, E, F = c.as_array()
    return np.array([
        A * x1 * x2 * y3 * y4,
        B * y1 * y2 * x3 * x4,
        C * x1 * y2 * x3 * y4,
        -D * x1 * y2 * y3 * x4,
        -E * y1 * x2 * x3 * y4,
        F * y1 * x2 * y3 * x4,
    ])


def eval_form(c: QuadricCoeffs, pt: Quad4Point) -> complex:
    """Bihomogeneous value of Phi_A with every component scaled to max-modulus one."""
    return complex(_monomials(c, pt).sum())


def eval_form_residual(c: QuadricCoeffs, pt: Quad4Point) -> float:
    """|Phi| / sum |monomials| (zero when every monomial vanishes)."""
    m = _monomials(c, pt)
    s = np.abs(m).sum()
    return float(abs(m.sum()) / s) if s > 0 else 0.0


def eval_affine(c: QuadricCoeffs, r: Sequence) -> complex:
    A, B, C, D, E, F = c.as_array()
    r1, r2, r3, r4 = (complex(v) for v in r)
    return A * r1 * r2 + B * r3 * r4 + C * r1 * r3 - D * r1 * r4 - E * r2 * r3 + F * r2 * r4


@dataclass
class ClassifyResult:
    rank: int
    singular_locus: Optional[np.ndarray]
    singular_values: np.ndarray


def classify(c: QuadricCoeffs, tol: float = 1e-9) -> ClassifyResult:
    """Rank (4 or 3) of the form from the singular values of its Gram matrix."""
    G = gram_matrix(c.normalized())
    _, s, vh = np.linalg.svd(G)
    rel = s / s[0]
    rank = int(np.sum(rel >= tol))
    if rank < 3:
        raise ValueError(f"rank {rank} < 3: coefficients cannot all be nonzero")
    kernel = None
    if rank == 3:
        kernel = vh[-1].conj()
        kernel = kernel / kernel[np.argmax(np.abs(kernel))]
    return ClassifyResult(rank, kernel, s)


@dataclass(frozen=True)
class PencilSpec:
    gen1: QuadricCoeffs
    gen2: QuadricCoeffs

    def __post_init__(self):
        M = np.array([self.gen1.normalized().as_array(), self.gen2.normalized().as_array()])
        s = np.linalg.svd(M, compute_uv=False)
        if s[1] / s[0] < 1e-12:
            raise ValueError("pencil generators are proportional")


def pencil_residual(target: QuadricCoeffs, pencil: PencilSpec):
    """Least-squares (lam1, lam2) and relative residual of target ~ lam1 g1 + lam2 g2."""
    G = np.array([pencil.gen1.as_array(), pencil.gen2.as_array()]).T
    t = target.as_array()
    lam, *_ = np.linalg.lstsq(G, t, rcond=None)
    res = np.linalg.norm(G @ lam - t) / np.linalg.norm(t)
    return complex(lam[0]), complex(lam[1]), float(res)


def pencil_membership(target: QuadricCoeffs, pencil: PencilSpec,
                      tol: float = 1e-7) -> Optional[tuple]:
    l1, l2, res = pencil_residual(target, pencil)
    return (l1, l2) if res < tol else None


@dataclass
class BoundaryReport:
    single_infinity: dict = field(default_factory=dict)
    double_infinity: dict = field(default_factory=dict)
    triple_infinity_residual: dict = field(default_factory=dict)
    gradient_min_norm: dict = field(default_factory=dict)

    @property
    def double_infinity_empty(self) -> bool:
        return all(abs(v) > 0 for v in self.double_infinity.values())


def boundary_analysis(c: QuadricCoeffs, rng: np.random.Generator | None = None,
                      n_samples: int = 10) -> BoundaryReport:
    """Behaviour of Phi_A when coordinates are sent to infinity.

    One infinite coordinate k leaves the plane sum_{j != k} G[k, j] rho_j = 0;
    two infinite coordinates leave the constant G[k, l], which is nonzero; three
    leave nothing, so the whole remaining affine line lies on the surface.
    """
    rng = rng or np.random.default_rng(0)
    G = gram_matrix(c)
    rep = BoundaryReport()
    for k in range(4):
        others = [j for j in range(4) if j != k]
        plane = G[k, others]
        rep.single_infinity[k + 1] = plane
        # gradient in the chart (rho_others, rho~_k) at rho~_k = 0: (plane, *)
        norms = []
        for _ in range(n_samples):
            r = rng.normal(size=3) + 1j * rng.normal(size=3)
            # put r on the plane by solving for the last coordinate
            r[2] = -(plane[0] * r[0] + plane[1] * r[1]) / plane[2]
            full = np.zeros(4, dtype=complex)
            full[others] = r
            # d/d rho~_k of rho~_k * Phi restricted: quadratic part in the others
            quad = 0.5 * full @ G @ full
            norms.append(np.linalg.norm(np.append(plane, quad)))
        rep.gradient_min_norm[k + 1] = float(min(norms))
    for k, l in itertools.combinations(range(4), 2):
        rep.double_infinity[(k + 1, l + 1)] = complex(G[k, l])
    for trip in itertools.combinations(range(4), 3):
        free = [j for j in range(4) if j not in trip][0]
        worst = 0.0
        for _ in range(n_samples):
            comps = [Proj1Point(1, 0)] * 4
            comps = list(comps)
            comps[free] = Proj1Point.from_affine(complex(rng.normal(), rng.normal()))
            worst = max(worst, abs(eval_form(c, Quad4Point(tuple(comps)))))
        rep.triple_infinity_residual[tuple(t + 1 for t in trip)] = worst
    return rep


def special_line_point(kind: str, idx: tuple, value) -> Quad4Point:
    """Point of L^0_{ijk} (kind "0") or L^inf_{ijk} (kind "inf") with free coordinate ``value``."""
    fill = Proj1Point(0, 1) if kind == "0" else Proj1Point(1, 0)
    comps = [Proj1Point.from_affine(value)] * 4
    comps = [fill if (k + 1) in idx else comps[k] for k in range(4)]
    return Quad4Point(tuple(comps))
