"""Parameter sets (q, rho, sigma, x) and the conditions NR, FR, NS, SC."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Optional

import numpy as np

from .theta import check_nome

__all__ = [
    "ParamSet",
    "ValidationReport",
    "congruence_class",
    "validate",
    "complete_x4",
    "bracket",
    "ref_params",
    "random_params",
]


def congruence_class(c, d, q, tol: float = 1e-8) -> Optional[int]:
    """Return k with c/d = q^k (relative tolerance ``tol``), or None.

    Only k within ceil(|log|c/d|| / |log|q||) + 2 of zero are scanned.
    """
    c, d, q = complex(c), complex(d), check_nome(q)
    if c == 0 or d == 0:
        raise ValueError("congruence is only defined for nonzero values")
    r = c / d
    logq = abs(math.log(abs(q)))
    window = math.ceil(abs(math.log(abs(r))) / logq) + 2
    best, best_err = None, math.inf
    for k in range(-window, window + 1):
        err = abs(r / q**k - 1) if k >= 0 else abs(r * q ** (-k) - 1)
        if err < tol and err < best_err:
            best, best_err = k, err
    return best


def _c(v) -> complex:
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(v[0], v[1])
    return complex(v)


@dataclass(frozen=True)
class ParamSet:
    """Full parameter tuple of the rank-two linear problem with four singular points."""

    q: complex
    rho: tuple
    sigma: tuple
    x: tuple

    def __post_init__(self):
        object.__setattr__(self, "q", check_nome(self.q))
        object.__setattr__(self, "rho", tuple(complex(v) for v in self.rho))
        object.__setattr__(self, "sigma", tuple(complex(v) for v in self.sigma))
        object.__setattr__(self, "x", tuple(complex(v) for v in self.x))
        if len(self.rho) != 2 or len(self.sigma) != 2 or len(self.x) != 4:
            raise ValueError("expected two rho, two sigma and four x values")
        if any(v == 0 for v in self.rho + self.sigma + self.x):
            raise ValueError("all parameters must be nonzero")

    @property
    def omega(self) -> complex:
        return self.sigma[0] / self.sigma[1]

    @property
    def fr_residual(self) -> float:
        x1, x2, x3, x4 = self.x
        s1, s2 = self.sigma
        r1, r2 = self.rho
        return abs(x1 * x2 * x3 * x4 * s1 * s2 / (r1 * r2) - 1)

    def at_omega(self, omega) -> "ParamSet":
        """Move to sigma_1 = omega sigma_2 keeping sigma_2, rho_2 and x fixed.

        rho_1 scales with omega so that the product relation is preserved.
        """
        omega = complex(omega)
        s2 = self.sigma[1]
        r1 = self.rho[0] * omega / self.omega
        return replace(self, sigma=(omega * s2, s2), rho=(r1, self.rho[1]))

    def to_dict(self) -> dict:
        pair = lambda z: [z.real, z.imag]
        return {
            "q": pair(self.q),
            "rho": [pair(v) for v in self.rho],
            "sigma": [pair(v) for v in self.sigma],
            "x": [pair(v) for v in self.x],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ParamSet":
        q = _c(d["q"])
        rho = [_c(v) for v in d["rho"]]
        sigma = [_c(v) for v in d["sigma"]]
        x = [_c(v) for v in d["x"]]
        if len(x) == 3:
            return complete_x4(q, rho, sigma, *x)
        return cls(q, tuple(rho), tuple(sigma), tuple(x))


@dataclass
class ValidationReport:
    nr_rho: bool
    nr_sigma: bool
    nr_x: bool
    nr_pairs: dict
    fr_residual: float
    fr: bool
    ns: bool
    ns_violations: list
    sc: bool
    sc_violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.nr_rho and self.nr_sigma and self.nr_x and self.fr and self.ns and self.sc

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "nr_rho": self.nr_rho,
            "nr_sigma": self.nr_sigma,
            "nr_x": self.nr_x,
            "nr_pairs": {k: [list(p) for p in v] for k, v in self.nr_pairs.items()},
            "fr_residual": self.fr_residual,
            "fr": self.fr,
            "ns": self.ns,
            "ns_violations": [list(v) for v in self.ns_violations],
            "sc": self.sc,
            "sc_violations": list(self.sc_violations),
        }


def validate(p: ParamSet, tol: float = 1e-8, fr_tol: float = 1e-10) -> ValidationReport:
    """Evaluate NR, FR, NS (all pairs k < l) and SC; never raises."""
    q = p.q
    pairs = {"rho": [], "sigma": [], "x": []}
    if congruence_class(p.rho[0], p.rho[1], q, tol) is not None:
        pairs["rho"].append((1, 2))
    if congruence_class(p.sigma[0], p.sigma[1], q, tol) is not None:
        pairs["sigma"].append((1, 2))
    for k, l in itertools.combinations(range(4), 2):
        if congruence_class(p.x[k], p.x[l], q, tol) is not None:
            pairs["x"].append((k + 1, l + 1))
    ns_bad = []
    for i, j in itertools.product((1, 2), (1, 2)):
        ratio = p.rho[i - 1] / p.sigma[j - 1]
        for k, l in itertools.combinations(range(1, 5), 2):
            if congruence_class(ratio, p.x[k - 1] * p.x[l - 1], q, tol) is not None:
                ns_bad.append((i, j, k, l))
    sc_bad = []
    r1, r2 = p.rho
    s1, s2 = p.sigma
    if congruence_class(r1 / s1, r2 / s2, q, tol) is not None:
        sc_bad.append("rho1/sigma1 ~ rho2/sigma2")
    if congruence_class(r2 / s1, r1 / s2, q, tol) is not None:
        sc_bad.append("rho2/sigma1 ~ rho1/sigma2")
    fr_res = p.fr_residual
    return ValidationReport(
        nr_rho=not pairs["rho"],
        nr_sigma=not pairs["sigma"],
        nr_x=not pairs["x"],
        nr_pairs=pairs,
        fr_residual=fr_res,
        fr=fr_res < fr_tol,
        ns=not ns_bad,
        ns_violations=ns_bad,
        sc=not sc_bad,
        sc_violations=sc_bad,
    )


def complete_x4(q, rho, sigma, x1, x2, x3) -> ParamSet:
    """Solve the product relation x1 x2 x3 x4 = rho1 rho2 / (sigma1 sigma2) for x4."""
    r1, r2 = (complex(v) for v in rho)
    s1, s2 = (complex(v) for v in sigma)
    x1, x2, x3 = complex(x1), complex(x2), complex(x3)
    x4 = r1 * r2 / (s1 * s2 * x1 * x2 * x3)
    return ParamSet(q, (r1, r2), (s1, s2), (x1, x2, x3, x4))


def bracket(p: ParamSet, k: int, l: int, j: int, i: int) -> complex:
    """[kl.ji] = x_k x_l sigma_j / rho_i."""
    return p.x[k - 1] * p.x[l - 1] * p.sigma[j - 1] / p.rho[i - 1]


def ref_params() -> ParamSet:
    """The reference parameter set shipped with the package."""
    text = resources.files("qmonodromy").joinpath("data/ref.json").read_text()
    p = ParamSet.from_dict(json.loads(text))
    rep = validate(p)
    if not rep.ok:
        raise RuntimeError(
            "reference parameters violate a condition; perturb data/ref.json: "
            + json.dumps(rep.to_dict())
        )
    return p


def _rand_c(rng, lo, hi):
    return rng.uniform(lo, hi) * np.exp(1j * rng.uniform(0, 2 * np.pi))


def random_params(rng: np.random.Generator, q=None, max_tries: int = 100,
                  tol: float = 0.05) -> ParamSet:
    """Random parameter set passing all conditions with a relative safety margin ``tol``.

    Moduli stay within a factor 2 of 1 so that no theta factor is extreme.
    """
    for _ in range(max_tries):
        qq = q if q is not None else _rand_c(rng, 0.1, 0.4)
        rho = [_rand_c(rng, 0.5, 2.0) for _ in range(2)]
        sigma = [_rand_c(rng, 0.5, 2.0) for _ in range(2)]
        xs = [_rand_c(rng, 0.6, 1.6) for _ in range(3)]
        p = complete_x4(qq, rho, sigma, *xs)
        if validate(p, tol=tol).ok:
            return p
    raise RuntimeError("could not draw a valid parameter set")
