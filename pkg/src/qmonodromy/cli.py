"""Command line driver: validate parameters, print coefficients, run verification suites."""

from __future__ import annotations

import argparse
import itertools
import json
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import coeffs as co
from . import embed as em
from . import monodromy as mo
from . import quadric as qu
from . import torusgraph as tg
from .params import ParamSet, ref_params, validate

SUITES = ("identities", "quadric", "pencil", "samples", "detlocus", "embed", "lines",
          "cubic", "graph")

DEFAULT_TOL = {
    "identities": 1e-8,
    "quadric": 1e-9,
    "pencil": 1e-7,
    "samples": 1e-7,
    "detlocus": 1e-7,
    "embed": 1e-8,
    "embed_degree2": 1e-10,
    "lines_collinear": 1e-6,
    "lines_quadric": 1e-7,
    "cubic": 1e-7,
    "cubic_grad": 1e-6,
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    params: ParamSet
    omegas: list = field(default_factory=lambda: [0.8, 1.3])
    suites: list = field(default_factory=lambda: list(SUITES))
    samples: int = 20
    tol: dict = field(default_factory=lambda: dict(DEFAULT_TOL))
    seed: int = 0
    convention: str = "auto"

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        raw = d.get("params", "REF")
        if raw == "REF":
            p = ref_params()
        elif isinstance(raw, dict):
            try:
                p = ParamSet.from_dict(raw)
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"bad params: {exc}") from exc
        else:
            raise ConfigError("params must be \"REF\" or an object")
        omegas = [complex(*w) if isinstance(w, list) else complex(w)
                  for w in d.get("omega", [0.8, 1.3])]
        suites = list(d.get("suites", SUITES))
        bad = [s for s in suites if s not in SUITES]
        if bad:
            raise ConfigError(f"unknown suites {bad}")
        tol = dict(DEFAULT_TOL)
        tol.update(d.get("tol", {}))
        if any(not v > 0 for v in tol.values()):
            raise ConfigError("tolerances must be positive")
        samples = int(d.get("samples", 20))
        if samples < 1:
            raise ConfigError("samples must be at least 1")
        conv = d.get("convention", "auto")
        if conv not in ("auto",) + mo.CONVENTIONS:
            raise ConfigError(f"unknown convention {conv!r}")
        return cls(p, omegas, suites, samples, tol, int(d.get("seed", 0)), conv)


def _jsonable(v):
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, dict):
        return {str(k) if not isinstance(k, tuple) else ",".join(map(str, k)): _jsonable(x)
                for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _rel(a, b) -> float:
    return float(abs(a - b) / max(abs(a), abs(b), 1e-300))


# ---- suites -----------------------------------------------------------------

def suite_identities(cfg, p, rng, conv):
    ic = co.interp_coeffs(p)
    orc = co.interp_coeffs_oracle(p)
    oracle = float(np.max(np.abs(ic.stacked() - orc.stacked()) / np.abs(orc.stacked())))
    c1, c2 = co.quadric_coeffs(p, 1, ic), co.quadric_coeffs(p, 2, ic)
    ratios = c2.as_array() / c1.as_array()
    from .params import bracket
    from .theta import t_ratio
    pred = (p.rho[0] / p.rho[1]) * t_ratio(
        p.q, [bracket(p, 1, 2, 1, 1), bracket(p, 1, 2, 2, 1)],
        [bracket(p, 1, 2, 1, 2), bracket(p, 1, 2, 2, 2)])
    prop = max(_rel(r, pred) for r in ratios)
    disc, dfac = 0.0, 0.0
    for i, c in ((1, c1), (2, c2)):
        d = co.delta(p, i, "bilinear", ic)
        disc = max(disc, _rel(co.discriminant(c), d * d))
        dfac = max(dfac, _rel(d, co.delta(p, i, "factored")))
    gc = co.gamma_constants(p, ic)
    gam = max(_rel(r, gc.gamma) for r in gc.gamma_ratios)
    ab = max(_rel(gc.alpha, gc.alpha_alt), _rel(gc.beta, gc.beta_alt))
    func = float(co.gamma_functional_residuals(p, rng, 20, gc).max())
    vals = {"oracle": oracle, "proportionality": prop, "discriminant": disc,
            "delta_methods": dfac, "gamma_ratios": gam, "alpha_beta": ab,
            "gamma_functional": func}
    tol = cfg.tol["identities"]
    worst = max(vals.values())
    return {"pass": worst < tol, "max_residual": worst, "residuals": vals}


def suite_quadric(cfg, p, rng, conv):
    c = co.quadric_coeffs(p, 1)
    cl = qu.classify(c, cfg.tol["quadric"])
    br = qu.boundary_analysis(c, rng)
    line_res = 0.0
    for kind in ("0", "inf"):
        for idx in itertools.combinations((1, 2, 3, 4), 3):
            for _ in range(5):
                v = complex(rng.normal(), rng.normal())
                line_res = max(line_res, abs(qu.eval_form(c.normalized(),
                                                           qu.special_line_point(kind, idx, v))))
    triple = max(br.triple_infinity_residual.values())
    ok = (cl.rank == 4 and br.double_infinity_empty and triple == 0 and line_res < 1e-12
          and min(br.gradient_min_norm.values()) > 0)
    return {"pass": bool(ok), "rank": cl.rank,
            "singular_values": cl.singular_values,
            "double_infinity_obstructions": br.double_infinity,
            "triple_infinity_residual": triple, "special_lines_residual": line_res,
            "gradient_min_norm": br.gradient_min_norm}


def suite_pencil(cfg, p, rng, conv):
    w0 = cfg.omegas[0]
    pen = qu.PencilSpec(co.quadric_coeffs(p.at_omega(w0), 1), co.quadric_coeffs(p.at_omega(1.0), 1))
    res = {}
    for w in cfg.omegas[1:] or [1.3]:
        _, _, r = qu.pencil_residual(co.quadric_coeffs(p.at_omega(w), 1), pen)
        res[str(w)] = r
    worst = max(res.values())
    ok = worst < cfg.tol["pencil"]
    return {"pass": bool(ok), "max_residual": worst, "residuals": res,
            "omega0": w0, "open_question_flag": not ok}


def suite_samples(cfg, p, rng, conv):
    c1, c2 = co.quadric_coeffs(p, 1), co.quadric_coeffs(p, 2)
    det4 = q1 = q2 = 0.0
    for _ in range(cfg.samples):
        M = mo.sample_point(p, rng, convention=conv)
        rt = mo.rho_tuple(M, conv)
        det4 = max(det4, M.det_residual(4))
        q1 = max(q1, qu.eval_form_residual(c1, rt.rho))
        q2 = max(q2, qu.eval_form_residual(c2, rt.rho))
    worst = max(det4, q1, q2)
    return {"pass": worst < cfg.tol["samples"], "max_residual": worst,
            "det_x4": det4, "quadric1": q1, "quadric2": q2}


def suite_detlocus(cfg, p, rng, conv):
    same, cross = 0.0, 0.0
    ts = [np.exp(complex(rng.normal(scale=0.5), rng.uniform(0, 2 * np.pi))) for _ in range(20)]
    for w in cfg.omegas:
        pw = p.at_omega(w)
        for t in ts:
            pt = mo.det_locus(pw, t)
            same = max(same, qu.eval_form_residual(co.quadric_coeffs(pw, 1), pt))
            for w2 in cfg.omegas:
                if w2 != w:
                    cross = max(cross, qu.eval_form_residual(
                        co.quadric_coeffs(p.at_omega(w2), 1), pt))
    ok = cross < cfg.tol["detlocus"]
    return {"pass": bool(ok), "same_omega_residual": same, "cross_omega_residual": cross,
            "open_question_flag": not ok}


def suite_embed(cfg, p, rng, conv):
    Q = em.eliminate_to_c4(p, p.omega)
    c6 = el = rec = 0.0
    for _ in range(cfg.samples):
        M = mo.sample_point(p, rng, convention=conv)
        e = em.eta(p, mo.rho_tuple(M, conv).rho)
        c6 = max(c6, float(em.c6_residuals(p, p.omega, e).max()))
        el = max(el, max(Q.residuals(e.c4())))
        r24, r34 = Q.reconstruct(e.c4())
        rec = max(rec, _rel(r24, e[2, 4]), _rel(r34, e[3, 4]))
    dev = 0.0
    for w in cfg.omegas:
        Q2 = em.eliminate_to_c4(p, w)
        for which in ("u", "v"):
            a, b = Q.degree2(which), Q2.degree2(which)
            for k in set(a) | set(b):
                dev = max(dev, abs(a.get(k, 0) - b.get(k, 0)))
    ok = max(c6, el) < cfg.tol["embed"] and dev < cfg.tol["embed_degree2"]
    return {"pass": bool(ok), "c6_residual": c6, "elimination_residual": el,
            "reconstruction": rec, "degree2_deviation": dev,
            "open_question_flag": dev >= cfg.tol["embed_degree2"]}


def suite_lines(cfg, p, rng, conv):
    rep = em.lines16(p, rng=rng, convention=conv)
    col = max(ln.collinearity for ln in rep.lines)
    qr = max(ln.quad_residual for ln in rep.lines)
    ok = (col < cfg.tol["lines_collinear"] and qr < cfg.tol["lines_quadric"]
          and not rep.diagnostics["within_family_coincidences"])
    return {"pass": bool(ok), "max_collinearity": col, "max_quadric_residual": qr,
            "diagnostics": rep.diagnostics, "catalog": [ln.to_dict() for ln in rep.lines]}


def suite_cubic(cfg, p, rng, conv):
    cs = em.cubic_surface_eq(co.quadric_coeffs(p, 1).normalized())
    fres = 0.0
    for _ in range(cfg.samples):
        r = mo.rho_tuple(mo.sample_point(p, rng, convention=conv), conv).rho.affine()
        fres = max(fres, cs.F_residual(r[0] / r[1], r[1] / r[2], r[2] / r[3]))
    gerr = 0.0
    h = 1e-6
    for _ in range(20):
        z = rng.normal(size=3) + 1j * rng.normal(size=3)
        g = cs.F_grad(*z)
        fd = np.array([(cs.F_eval(*(z + h * e)) - cs.F_eval(*(z - h * e))) / (2 * h)
                       for e in np.eye(3)])
        gerr = max(gerr, float(np.linalg.norm(g - fd) / np.linalg.norm(g)))
    ok = fres < cfg.tol["cubic"] and gerr < cfg.tol["cubic_grad"]
    return {"pass": bool(ok), "F_residual": fres, "gradient_error": gerr,
            "resultant_derived": cs.resultant_derived,
            "resultant_printed": cs.resultant_printed}


def suite_graph(cfg, p, rng, conv):
    bad = []
    for n in (1, 2, 3):
        cells = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
        for r in range(1, len(cells) + 1):
            for S in itertools.combinations(cells, r):
                g = tg.SupportGraph(n, frozenset(S))
                st = tg.graph_stats(g)
                mons = tg.cycle_monomials(g)
                if n == 2 and st.chi != max(1, 4 - len(S)):
                    bad.append([n, list(S)])
                if st.cyclomatic < 0 or len(mons) != st.cyclomatic:
                    bad.append([n, list(S)])
    return {"pass": not bad, "failures": bad[:10]}


SUITE_FUNCS = {
    "identities": suite_identities, "quadric": suite_quadric, "pencil": suite_pencil,
    "samples": suite_samples, "detlocus": suite_detlocus, "embed": suite_embed,
    "lines": suite_lines, "cubic": suite_cubic, "graph": suite_graph,
}


def run(cfg: RunConfig) -> dict:
    """Run the requested suites; the returned report is deterministic apart from ``timing``."""
    p = cfg.params
    val = validate(p)
    report = {"params": p.to_dict(), "validation": val.to_dict(), "suites": {}, "timing": {}}
    if not val.ok:
        report["ok"] = False
        return report
    conv = cfg.convention
    if conv == "auto":
        t0 = time.perf_counter()
        choice = mo.select_convention(p, np.random.default_rng([cfg.seed, 1000]))
        report["timing"]["convention"] = time.perf_counter() - t0
        report["convention_selection"] = choice.to_dict()
        conv = choice.convention or "rowclass"
    report["convention"] = conv
    for name in cfg.suites:
        rng = np.random.default_rng([cfg.seed, SUITES.index(name)])
        t0 = time.perf_counter()
        report["suites"][name] = _jsonable(SUITE_FUNCS[name](cfg, p, rng, conv))
        report["timing"][name] = time.perf_counter() - t0
    report["ok"] = all(s["pass"] for s in report["suites"].values())
    return report


# ---- command line -----------------------------------------------------------

def _load_config(args) -> RunConfig:
    d = {}
    if args.config:
        try:
            with open(args.config) as fh:
                d = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
    if args.seed is not None:
        d["seed"] = args.seed
    if args.omega:
        d["omega"] = args.omega
    cfg = RunConfig.from_dict(d)
    if args.tol is not None:
        cfg.tol = {k: args.tol for k in cfg.tol}
    return cfg


def _emit(obj, out: Optional[str]):
    text = json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_validate(cfg, args):
    rep = validate(cfg.params)
    return {"params": cfg.params.to_dict(), "validation": rep.to_dict()}, rep.ok


def _cmd_coeffs(cfg, args):
    p = cfg.params
    ic = co.interp_coeffs(p)
    out = {"params": p.to_dict(),
           "interp": {k: getattr(ic, k) for k in ("lam", "mu", "lamp", "mup")}}
    for i in (1, 2):
        c = co.quadric_coeffs(p, i, ic)
        out[f"quadric_{i}"] = dict(zip("ABCDEF", c.as_array()))
        out[f"delta_{i}"] = co.delta(p, i, "bilinear", ic)
        out[f"discriminant_{i}"] = co.discriminant(c)
    gc = co.gamma_constants(p, ic)
    out["gamma"] = {"alpha": gc.alpha, "beta": gc.beta, "gamma": gc.gamma}
    return out, True


def _cmd_verify(cfg, args):
    rep = run(cfg)
    short = {"ok": rep["ok"], "convention": rep.get("convention"),
             "suites": {k: {"pass": v["pass"]} for k, v in rep["suites"].items()}}
    if not rep["validation"]["ok"]:
        short["validation"] = rep["validation"]
    return short, rep["ok"]


def _cmd_report(cfg, args):
    rep = run(cfg)
    return rep, rep["ok"]


def _cmd_sample(cfg, args):
    p = cfg.params
    rng = np.random.default_rng(cfg.seed)
    conv = "rowclass" if cfg.convention == "auto" else cfg.convention
    out = []
    for _ in range(args.n):
        M = mo.sample_point(p, rng, args.constraint, conv)
        rt = mo.rho_tuple(M, conv)
        out.append({"coeff": M.coeff,
                    "rho": [[c.x, c.y] for c in rt.rho.comps],
                    "rhoPrime": [[c.x, c.y] for c in rt.rhoPrime.comps]})
    return {"params": p.to_dict(), "constraint": args.constraint, "convention": conv,
            "samples": out}, True


def _cmd_lines(cfg, args):
    p = cfg.params
    conv = "rowclass" if cfg.convention == "auto" else cfg.convention
    rep = em.lines16(p, rng=np.random.default_rng(cfg.seed), convention=conv)
    return {"params": p.to_dict(), "lines": [ln.to_dict() for ln in rep.lines],
            "diagnostics": rep.diagnostics}, True


COMMANDS = {"validate": _cmd_validate, "coeffs": _cmd_coeffs, "verify": _cmd_verify,
            "report": _cmd_report, "sample": _cmd_sample, "lines": _cmd_lines}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qmonodromy", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration (default: REF, all suites)")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--omega", type=complex, action="append",
                        help="omega value; repeat for several")
    common.add_argument("--tol", type=float, help="single tolerance for every suite")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "sample":
            sp.add_argument("-n", type=int, default=5, help="number of samples")
            sp.add_argument("--constraint", choices=mo.CONSTRAINTS, help="special locus")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    obj, ok = COMMANDS[args.command](cfg, args)
    try:
        _emit(obj, args.out)
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return 2
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
