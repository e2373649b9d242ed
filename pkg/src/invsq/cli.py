"""Command-line front end: subcommand dispatch, JSON run specs, CSV/JSON
artifacts, and golden-data regeneration.

Every flag mirrors a run-spec field one to one, so
`invsq fixed-points --alpha -0.1875` and
`invsq --spec spec.json` (with {"command": "fixed-points", "params":
{"alpha": -0.1875}}) are interchangeable.  Numeric CSV output keeps 17
significant digits so downstream tolerance checks are meaningful.

Exit codes: 0 success, 2 validation failure, 3 numerical failure,
4 I/O failure.  Failures print a machine-readable JSON error line.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import classical, propagator, rgflow, scattering, spectrum
from .core import (ModelParams, Regulator, derived_constants, fixed_points,
                   linear_well, generic_well, params_from_json, regulator_from_json,
                   square_well)
from .numerics import NumericalError

OUTDIR_ENV = "INVSQ_OUTDIR"

COMMANDS = (
    "fixed-points", "flow", "contours", "bound-state", "exponent",
    "propagator", "scaling-check", "collapse", "phase-shift", "phase-curve",
    "feynman-kac", "chain", "limit-cycle", "regen-golden",
)


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_csv(path: Path, header_lines, columns, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        for line in header_lines:
            f.write(f"# {line}\n")
        f.write(",".join(columns) + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")


def _outdir(ns) -> Path:
    if getattr(ns, "out", None):
        return Path(ns.out)
    return Path(os.environ.get(OUTDIR_ENV, "."))


def _params(ns) -> ModelParams:
    return derived_constants(ns.alpha, getattr(ns, "x0", 1.0))


def _regulator(ns) -> Regulator:
    scheme = getattr(ns, "scheme", "square")
    g = ns.g
    if scheme == "square":
        return square_well(g, getattr(ns, "b", 1.0))
    if scheme == "linear":
        return linear_well(g)
    if scheme == "generic":
        prof = json.loads(Path(ns.profile).read_text())
        return generic_well(g, prof["x"], prof["f"])
    raise ValueError(f"unknown scheme {scheme!r}")


def _provenance(ns, **extra) -> list[str]:
    items = {"tool": f"invsq {__version__}", "alpha": getattr(ns, "alpha", None)}
    items.update(extra)
    return [f"{k} = {_fmt(v)}" for k, v in items.items() if v is not None]


# ---------------------------------------------------------------------------
# command handlers: each returns (summary: str, payload: dict)
# ---------------------------------------------------------------------------

def cmd_fixed_points(ns):
    p = _params(ns)
    g_plus, g_minus = fixed_points(p)
    payload = {"alpha": p.alpha, "omega": p.omega, "nu_plus": p.nu_plus,
               "nu_minus": p.nu_minus, "g_plus": g_plus, "g_minus": g_minus}
    return f"g_plus={g_plus:.6f} g_minus={g_minus:.6f}", payload


def cmd_flow(ns):
    p = _params(ns)
    bs = np.geomspace(ns.b0, ns.b1, ns.steps) if ns.steps > 1 else [ns.b1]
    rows = []
    for b in bs:
        st = rgflow.flow(p, ns.gamma0, ns.b0, float(b))
        rows.append((st.b, st.gamma, st.g, st.u, int(st.exited)))
    out = _outdir(ns) / "flow.csv"
    write_csv(out, _provenance(ns, gamma0=ns.gamma0, b0=ns.b0),
              ["b (dimensionless)", "gamma (dimensionless)", "g (dimensionless)",
               "u (dimensionless)", "exited (0/1)"], rows)
    last = rows[-1]
    return f"flow to b={last[0]:g}: gamma={last[1]:.8f} -> {out}", {"rows": len(rows), "path": str(out)}


def cmd_contours(ns):
    p = _params(ns)
    ratios = [float(r) for r in ns.ratios.split(",")]
    xi = np.geomspace(ns.xi_min, ns.xi_max, ns.n_xi)
    rows = []
    for r in ratios:
        for (xiv, g) in rgflow.contour_constant_ratio(p, r, xi):
            rows.append((xiv, g, r))
    out = _outdir(ns) / "contours.csv"
    write_csv(out, _provenance(ns, ratios=ns.ratios),
              ["xi (b x0 sqrt(E), dimensionless)", "g (dimensionless)", "ratio (C+/C-)"],
              rows)
    return f"{len(rows)} contour points -> {out}", {"rows": len(rows), "path": str(out)}


def cmd_bound_state(ns):
    p = _params(ns)
    if ns.g is None and not ns.g_list:
        raise ValueError("bound-state needs --g or --g-list")
    if ns.g_list:
        if ns.g is None:
            ns.g = 0.0
        reg0 = _regulator(ns)
        rows = []
        for g in (float(v) for v in ns.g_list.split(",")):
            reg = square_well(g, reg0.b) if reg0.kind == "SquareWell" else \
                Regulator(reg0.kind, g, reg0.b, reg0.profile_x, reg0.profile_f)
            st = spectrum.bound_state(p, reg) if reg.kind == "SquareWell" else None
            if st is None:
                rows.append((p.alpha, reg.kind, reg.b, g, math.nan, math.nan, math.nan))
            else:
                rows.append((p.alpha, reg.kind, reg.b, g, st.energy, st.xi,
                             spectrum.mean_position(p, reg)))
        out = _outdir(ns) / "bound_state_sweep.csv"
        write_csv(out, _provenance(ns, scheme=reg0.kind),
                  ["alpha (dimensionless)", "scheme", "b (dimensionless)",
                   "g (dimensionless)", "E (1/length^2)", "xi (dimensionless)",
                   "mean_x (length)"], rows)
        return f"{len(rows)} sweep rows -> {out}", {"rows": len(rows), "path": str(out)}
    st = spectrum.bound_state(p, _regulator(ns))
    if st is None:
        return "no bound state (g <= g_minus)", {"bound": None}
    payload = {"energy": st.energy, "xi": st.xi, "A": st.A, "C": st.C, "norm": st.norm}
    return f"E={st.energy:.10g}", {"bound": payload}


def cmd_exponent(ns):
    p = _params(ns)
    reg = _regulator(ns)
    if reg.kind == "SquareWell" and reg.b == 1.0:
        # exact matching route for the square well
        _, g_minus = fixed_points(p)
        du = np.geomspace(ns.window_lo, ns.window_hi, ns.n_points)
        eps = np.array([-spectrum.bound_state(p, square_well(g_minus + d)).energy for d in du])
        from .numerics import fit_loglog
        slope, amplitude, resid = fit_loglog(du, eps)
        fit = spectrum.CriticalFit(slope, amplitude, g_minus, resid)
    else:
        fit = spectrum.generic_bound_threshold(p, reg, window=(ns.window_lo, ns.window_hi),
                                               n_points=ns.n_points)
        du = np.geomspace(ns.window_lo, ns.window_hi, ns.n_points)
        eps = np.array([spectrum.generic_bound_energy(p, reg, fit.g_star + d) for d in du])
    rows = [(p.alpha, reg.kind, reg.b, fit.g_star + d, -e, math.sqrt(e), fit.exponent)
            for d, e in zip(du, eps)]
    out = _outdir(ns) / f"exponent_{reg.kind.lower()}.csv"
    write_csv(out, _provenance(ns, scheme=reg.kind, g_star=fit.g_star,
                               exponent=fit.exponent, amplitude=fit.amplitude,
                               residual=fit.residual, tolerance="window "
                               f"[{ns.window_lo},{ns.window_hi}]"),
              ["alpha (dimensionless)", "scheme", "b (dimensionless)",
               "g (dimensionless)", "E (1/length^2)", "xi (dimensionless)",
               "slope (fit, dimensionless)"], rows)
    payload = {"exponent": fit.exponent, "amplitude": fit.amplitude,
               "g_star": fit.g_star, "residual": fit.residual,
               "one_over_omega": 1.0 / p.omega, "path": str(out)}
    return f"exponent={fit.exponent:.4f} (1/omega={1.0 / p.omega:.4f}) g*={fit.g_star:.6f}", payload


def cmd_propagator(ns):
    p = _params(ns)
    smp = propagator.propagator_quadrature(p, _regulator(ns), ns.x, ns.y, ns.t,
                                           rtol=ns.rtol)
    g_plus, g_minus = fixed_points(p)
    sign = 1 if abs(smp.g - g_plus) <= abs(smp.g - g_minus) else -1
    u = smp.g - g_plus if sign == 1 else g_minus - smp.g
    out = _outdir(ns) / "propagator.csv"
    write_csv(out, _provenance(ns, rtol=ns.rtol),
              ["alpha (dimensionless)", "sign (nearest fixed point)",
               "b (dimensionless)", "u (reduced coupling)", "x (length)",
               "y (length)", "t (length^2)", "G (1/length)",
               "quad_error (1/length)"],
              [(p.alpha, sign, smp.b, u, smp.x, smp.y, smp.t, smp.value,
                smp.quad_error)])
    payload = {"alpha": p.alpha, "b": smp.b, "g": smp.g, "x": smp.x, "y": smp.y,
               "t": smp.t, "G": smp.value, "quad_error": smp.quad_error,
               "path": str(out)}
    return f"G={smp.value:.12g} (err {smp.quad_error:.1e})", payload


def cmd_scaling_check(ns):
    p = _params(ns)
    if ns.law == "exact":
        r = propagator.check_exact_law(p, _regulator(ns), ns.x, ns.y, ns.t, ns.lam)
    elif ns.law == "asymptotic":
        r = propagator.check_asymptotic_law(p, ns.b, ns.u, ns.sign, ns.x, ns.y, ns.t, ns.lam)
    elif ns.law == "scaling":
        r = propagator.check_scaling_relation(p, ns.b, ns.u, ns.sign, ns.lam, ns.x, ns.y, ns.t)
    elif ns.law == "callan-symanzik":
        r = propagator.callan_symanzik_residual(p, ns.b, ns.u, ns.sign, ns.x, ns.y, ns.t)
    else:
        raise ValueError(f"unknown law {ns.law!r}")
    return f"{ns.law} residual = {r:.3e}", {"law": ns.law, "residual": r}


def cmd_collapse(ns):
    p = _params(ns)
    tab = propagator.scaling_collapse(p, sign=ns.sign, b0=ns.b0, u0=ns.u0,
                                      n_b=ns.n_b, n_u=ns.n_u, x=ns.x, y=ns.x, t=ns.t)
    rows = list(zip(tab.z, tab.phi))
    out = _outdir(ns) / "collapse.csv"
    write_csv(out, _provenance(ns, u0=tab.u0, spread=tab.spread,
                               exponent_steep=tab.exponent_steep,
                               exponent_shallow=tab.exponent_shallow, c=tab.c),
              ["z (b (u/u0)^{1/2 omega}, dimensionless)", "Phi (length^{-1/2} scale)"],
              rows)
    payload = {"spread": tab.spread, "exponent_steep": tab.exponent_steep,
               "exponent_shallow": tab.exponent_shallow, "c": tab.c, "path": str(out)}
    return (f"collapse spread={tab.spread:.4f} exponents=({tab.exponent_steep:.4f},"
            f"{tab.exponent_shallow:.4f}) -> {out}"), payload


def cmd_phase_shift(ns):
    p = _params(ns)
    reg = _regulator(ns)
    ks = np.geomspace(ns.k_min, ns.k_max, ns.n_k)
    deltas = scattering.phase_shift_sweep(p, reg, ks)
    rows = []
    for k, d in zip(ks, deltas):
        ra = scattering.reflection(p, reg, float(k))
        rows.append((ra.mu, reg.g, ra.r.real, ra.r.imag, d))
    out = _outdir(ns) / "phase_shift.csv"
    write_csv(out, _provenance(ns, g=reg.g, b=reg.b),
              ["mu (k b x0, dimensionless)", "g (dimensionless)",
               "Re r (dimensionless)", "Im r (dimensionless)", "delta (rad)"], rows)
    return f"{len(rows)} phase-shift points -> {out}", {"rows": len(rows), "path": str(out)}


def cmd_phase_curve(ns):
    p = _params(ns)
    path = scattering.constant_phase_curve(p, ns.mu0, ns.g0, ns.mu1)
    out = _outdir(ns) / "phase_curve.csv"
    write_csv(out, _provenance(ns, mu0=ns.mu0, g0=ns.g0),
              ["mu (dimensionless)", "g (dimensionless)"], path)
    return f"curve of {len(path)} points, g({ns.mu1:g})={path[-1][1]:.8f} -> {out}", \
        {"rows": len(path), "g_end": path[-1][1], "path": str(out)}


def cmd_feynman_kac(ns):
    p = _params(ns)
    spec = classical.PathEnsembleSpec(y=ns.y, x=ns.x, t=ns.t, n_steps=ns.n_steps,
                                      n_samples=ns.n_samples, seed=ns.seed)
    w, err = classical.feynman_kac(p, _regulator(ns), spec, mode=ns.mode,
                                   threads=ns.threads)
    rows = [(ns.x, ns.y, ns.t, ns.n_steps, ns.n_samples, w, err)]
    out = _outdir(ns) / "feynman_kac.csv"
    write_csv(out, _provenance(ns, mode=ns.mode, seed=ns.seed),
              ["x (length)", "y (length)", "t (length^2)", "N", "n_samples",
               "W (1/length)", "stderr (1/length)"], rows)
    return f"W = {w:.8g} +- {err:.2g} -> {out}", {"W": w, "stderr": err, "path": str(out)}


def cmd_chain(ns):
    p = _params(ns)
    reg = _regulator(ns)
    eps_list = tuple(float(e) for e in ns.eps_list.split(","))
    res = classical.free_energy_density(p, reg, eps_list=eps_list,
                                        threads=ns.threads)
    rows = [(reg.g, e, res.n_grid, f, res.E0) for e, f in zip(res.eps_used, res.f_raw)]
    rows.append((reg.g, 0.0, res.n_grid, res.f_xy, res.E0))
    out = _outdir(ns) / "chain.csv"
    write_csv(out, _provenance(ns, phase=res.phase, order=res.order,
                               note="epsilon = 0 row is the extrapolation"),
              ["g (dimensionless)", "epsilon (length^2)", "n_grid",
               "f (1/length^2)", "E0_ref (1/length^2)"], rows)
    return (f"f={res.f_xy:.8g} (E0={res.E0:.8g}, {res.phase}) -> {out}"), \
        {"f": res.f_xy, "E0": res.E0, "phase": res.phase, "path": str(out)}


def cmd_limit_cycle(ns):
    p = derived_constants(ns.alpha)
    states = []
    for shift in range(ns.n_periods):
        b = ns.b * math.exp(-shift * math.pi / p.omega)
        states.append(rgflow.limit_cycle(p, b, ns.eps))
    rows = []
    for st in states:
        for i, g in enumerate(st.g_branches):
            rows.append((math.log(st.b), st.eps, i, g))
    out = _outdir(ns) / "limit_cycle.csv"
    write_csv(out, _provenance(ns, abs_omega=p.omega, phi=states[0].phi),
              ["log_b (dimensionless)", "eps (-E x0^2, dimensionless)",
               "g_root_index", "g (dimensionless)"], rows)
    gs = states[0].g_branches
    return f"roots at b={ns.b:g}: {[f'{g:.8f}' for g in gs]} -> {out}", \
        {"phi": states[0].phi, "roots": list(gs), "path": str(out)}


def cmd_regen_golden(ns):
    outdir = _outdir(ns)
    results = {}
    jobs = [
        ("contours", ["contours", "--alpha", "-0.1875", "--ratios", "1,2,4",
                      "--xi-min", "1e-4", "--xi-max", "0.5", "--n-xi", "40"]),
        ("collapse", ["collapse", "--alpha", "-0.1875"]),
        ("exponent-square", ["exponent", "--alpha", "-0.1875", "--scheme", "square",
                             "--g", "1.0"]),
        ("exponent-linear", ["exponent", "--alpha", "-0.1875", "--scheme", "linear",
                             "--g", "1.0"]),
    ]
    for name, argv in jobs:
        sub = _build_parser().parse_args(argv + ["--out", str(outdir)])
        summary, payload = sub.handler(sub)
        results[name] = payload
    return f"golden data regenerated in {outdir}", results


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

def _add_model(sp, alpha_required=True):
    sp.add_argument("--alpha", type=float, required=alpha_required,
                    help="dimensionless coupling of alpha/x^2")
    sp.add_argument("--x0", type=float, default=1.0, help="fixed length scale")


def _add_regulator(sp, g_required=True):
    sp.add_argument("--scheme", choices=["square", "linear", "generic"], default="square")
    sp.add_argument("--g", type=float, required=g_required, help="well depth")
    sp.add_argument("--b", type=float, default=1.0, help="width factor (square well)")
    sp.add_argument("--profile", help="JSON file with {x: [...], f: [...]} (generic)")


def _add_common(sp):
    sp.add_argument("--out", help=f"output directory (default ${OUTDIR_ENV} or .)")
    sp.add_argument("--threads", type=int, default=1)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="invsq",
                                 description="numerical laboratory for the regulated "
                                             "inverse-square potential")
    ap.add_argument("--spec", help="JSON run-spec file instead of a subcommand")
    sub = ap.add_subparsers(dest="command")

    def add(name, handler, configure):
        sp = sub.add_parser(name)
        configure(sp)
        _add_common(sp)
        sp.set_defaults(handler=handler)
        return sp

    add("fixed-points", cmd_fixed_points, lambda sp: _add_model(sp))

    def conf_flow(sp):
        _add_model(sp)
        sp.add_argument("--gamma0", type=float, required=True)
        sp.add_argument("--b0", type=float, default=1.0)
        sp.add_argument("--b1", type=float, required=True)
        sp.add_argument("--steps", type=int, default=1)
    add("flow", cmd_flow, conf_flow)

    def conf_contours(sp):
        _add_model(sp)
        sp.add_argument("--ratios", default="1")
        sp.add_argument("--xi-min", dest="xi_min", type=float, default=1e-4)
        sp.add_argument("--xi-max", dest="xi_max", type=float, default=0.5)
        sp.add_argument("--n-xi", dest="n_xi", type=int, default=40)
    add("contours", cmd_contours, conf_contours)

    def conf_bound(sp):
        _add_model(sp)
        _add_regulator(sp, g_required=False)
        sp.add_argument("--g-list", dest="g_list",
                        help="comma-separated depths: write the sweep CSV instead")
    add("bound-state", cmd_bound_state, conf_bound)

    def conf_exponent(sp):
        _add_model(sp)
        _add_regulator(sp)
        sp.add_argument("--window-lo", dest="window_lo", type=float, default=1e-4)
        sp.add_argument("--window-hi", dest="window_hi", type=float, default=1e-2)
        sp.add_argument("--n-points", dest="n_points", type=int, default=20)
    add("exponent", cmd_exponent, conf_exponent)

    def conf_prop(sp):
        _add_model(sp)
        _add_regulator(sp)
        sp.add_argument("--x", type=float, required=True)
        sp.add_argument("--y", type=float, required=True)
        sp.add_argument("--t", type=float, required=True)
        sp.add_argument("--rtol", type=float, default=1e-9)
    add("propagator", cmd_propagator, conf_prop)

    def conf_scaling(sp):
        _add_model(sp)
        _add_regulator(sp, g_required=False)
        sp.add_argument("--law", choices=["exact", "asymptotic", "scaling",
                                          "callan-symanzik"], required=True)
        sp.add_argument("--u", type=float, default=1e-3)
        sp.add_argument("--sign", type=int, choices=[1, -1], default=1)
        sp.add_argument("--lam", type=float, default=2.0)
        sp.add_argument("--x", type=float, default=1.0)
        sp.add_argument("--y", type=float, default=1.0)
        sp.add_argument("--t", type=float, default=1.0)
    add("scaling-check", cmd_scaling_check, conf_scaling)

    def conf_collapse(sp):
        _add_model(sp)
        sp.add_argument("--sign", type=int, choices=[1, -1], default=1)
        sp.add_argument("--b0", type=float, default=1.0)
        sp.add_argument("--u0", type=float, default=2e-3)
        sp.add_argument("--n-b", dest="n_b", type=int, default=5)
        sp.add_argument("--n-u", dest="n_u", type=int, default=5)
        sp.add_argument("--x", type=float, default=2.0)
        sp.add_argument("--t", type=float, default=1e5)
    add("collapse", cmd_collapse, conf_collapse)

    def conf_phase(sp):
        _add_model(sp)
        _add_regulator(sp)
        sp.add_argument("--k-min", dest="k_min", type=float, default=1e-4)
        sp.add_argument("--k-max", dest="k_max", type=float, default=1.0)
        sp.add_argument("--n-k", dest="n_k", type=int, default=50)
    add("phase-shift", cmd_phase_shift, conf_phase)

    def conf_curve(sp):
        _add_model(sp)
        sp.add_argument("--mu0", type=float, required=True)
        sp.add_argument("--g0", type=float, required=True)
        sp.add_argument("--mu1", type=float, required=True)
    add("phase-curve", cmd_phase_curve, conf_curve)

    def conf_fk(sp):
        _add_model(sp)
        _add_regulator(sp)
        sp.add_argument("--x", type=float, required=True)
        sp.add_argument("--y", type=float, required=True)
        sp.add_argument("--t", type=float, required=True)
        sp.add_argument("--n-steps", dest="n_steps", type=int, default=2048)
        sp.add_argument("--n-samples", dest="n_samples", type=int, default=100000)
        sp.add_argument("--seed", type=int, default=20260808)
        sp.add_argument("--mode", choices=["regulated", "barrier", "free"],
                        default="regulated")
    add("feynman-kac", cmd_feynman_kac, conf_fk)

    def conf_chain(sp):
        _add_model(sp)
        _add_regulator(sp)
        sp.add_argument("--eps-list", dest="eps_list", default="0.1,0.05,0.025")
    add("chain", cmd_chain, conf_chain)

    def conf_cycle(sp):
        _add_model(sp)
        sp.add_argument("--b", type=float, default=1.0)
        sp.add_argument("--eps", type=float, required=True)
        sp.add_argument("--n-periods", dest="n_periods", type=int, default=1)
    add("limit-cycle", cmd_limit_cycle, conf_cycle)

    add("regen-golden", cmd_regen_golden, lambda sp: None)
    return ap


def _spec_to_argv(spec: dict) -> list[str]:
    if "command" not in spec:
        raise ValueError("run spec needs a 'command' field")
    command = spec["command"]
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")
    argv = [command]
    params = spec.get("params", {})
    if params:
        p = params_from_json(params)
        argv += ["--alpha", repr(p.alpha), "--x0", repr(p.x0)]
    regulator = spec.get("regulator", {})
    if regulator:
        r = regulator_from_json(regulator)
        scheme = {"SquareWell": "square", "LinearWell": "linear", "Generic": "generic"}[r.kind]
        argv += ["--scheme", scheme, "--g", repr(r.g)]
        if r.kind == "SquareWell":
            argv += ["--b", repr(r.b)]
    known = {"command", "params", "regulator"}
    for key, val in spec.items():
        if key in known:
            continue
        if not isinstance(val, (int, float, str)):
            raise ValueError(f"unsupported option type for {key!r}")
        argv += [f"--{key.replace('_', '-')}", str(val)]
    return argv


def main(argv=None) -> int:
    ap = _build_parser()
    ns = ap.parse_args(argv)
    try:
        if ns.spec:
            spec = json.loads(Path(ns.spec).read_text(encoding="utf-8"))
            ns = ap.parse_args(_spec_to_argv(spec))
        if not getattr(ns, "command", None):
            ap.print_usage()
            return 2
        summary, payload = ns.handler(ns)
    except (ValueError, KeyError, json.JSONDecodeError, argparse.ArgumentError) as exc:
        print(json.dumps({"error": "validation", "detail": str(exc)}))
        return 2
    except NumericalError as exc:
        print(json.dumps({"error": "numerical", "detail": str(exc)}))
        return 3
    except OSError as exc:
        print(json.dumps({"error": "io", "detail": str(exc)}))
        return 4
    print(summary)
    print(json.dumps(payload, default=float))
    return 0


if __name__ == "__main__":
    sys.exit(main())
