"""The six commands.  Each returns an Outcome; main() turns it into files and an exit code."""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..exact import profile_residual
from ..funcspace import LineFunction, PeriodicFunction
from ..series import ConsistencyError, build_series, decay_exponent, evaluate_profile, lambda_of, save_archive
from ..sim import SimConfig, cusp_track, run
from ..sim.diagnostics import CLAIM_RESIDUAL
from . import checks as ck
from .report import clean, write_csv, write_dat, write_json

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BREAKDOWN = 0, 1, 2, 3


class Breakdown(RuntimeError):
    """Numerical breakdown: stalled step, consistency violation, series stop rule."""


@dataclass
class Outcome:
    checks: list = field(default_factory=list)
    breakdown: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def code(self) -> int:
        if self.breakdown:
            return EXIT_BREAKDOWN
        if any(c.error for c in self.checks):
            return EXIT_BREAKDOWN
        return EXIT_OK if all(c.passed for c in self.checks) else EXIT_FAIL


def _context(cfg):
    return ck.Context(cfg.seed, cfg.tol_scale, dict(cfg.tolerances))


def _point_dir(out, a, many):
    return os.path.join(out, f"a={a:+g}") if many else out


def _sweep(cfg, worker, points):
    """worker(point) for every point, on cfg.jobs processes; results in input order."""
    if cfg.jobs > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.jobs, len(points))) as pool:
            return list(pool.map(worker, points))
    return [worker(p) for p in points]


# ---------------------------------------------------------------------------
# profile


def cmd_profile(cfg, out) -> Outcome:
    p = cfg.params
    kind = "smooth" if p["branch"] == "smooth" else f"holder(1/{p['n']})"
    try:
        state = build_series(kind, p["terms"], N=p["N"], map_scale=p["map_scale"])
    except ConsistencyError as exc:
        raise Breakdown(str(exc)) from None
    archive = save_archive(state, out)
    res = Outcome(extra={"series": {"lambda": archive["lambda"], "radius": archive["radius"],
                                    "stopped": archive["stopped"]}})
    if state.order < p["terms"]:
        res.breakdown = f"series stopped at order {state.order}: {state.stopped}"
    ctx = _context(cfg)
    alpha = float(state.alpha)
    z = np.linspace(0.0, p["z_max"], p["points"])
    many = len(p["a"]) > 1
    for a in p["a"]:
        d = _point_dir(out, a, many)
        prof = evaluate_profile(state, a)
        F, HF = prof.F(z ** alpha), prof.HF(z ** alpha)
        write_csv(os.path.join(d, "profile.csv"), ("z", "F", "HF"), (z, F, HF))
        r = profile_residual(prof)
        meta = {"alpha": str(prof.alpha), "lambda": prof.lam, "a": a, "residual": r,
                "truncation": prof.truncation, "decay_exponent": decay_exponent(prof),
                "terms": state.order}
        write_json(os.path.join(d, "profile.json"), clean(meta))
        write_dat(os.path.join(d, "plotdata", "profile_F.dat"), z, F, f"z F  a={a:g}")
        write_dat(os.path.join(d, "plotdata", "profile_HF.dat"), z, HF, f"z HF  a={a:g}")
        c = ck.Check(None, f"profile a={a:+g}", [ctx.part("profile residual", r, "<=", "series_residual")])
        res.checks.append(c)
    # lambda(a) inside half the radius estimate
    lim = 0.5 * min(state.radius_estimate, 1.0)
    grid = np.linspace(-lim, lim, 101) * (1 - 1e-9)
    lam = [lambda_of(state, a) for a in grid]
    write_dat(os.path.join(out, "plotdata", "lambda_curve.dat"), grid, lam, "a lambda(a)")
    mus = np.array(state.mus)
    write_dat(os.path.join(out, "plotdata", "mu.dat"), np.arange(mus.size), mus, "n mu_n")
    if state.majorant:
        maj = np.array(state.majorant) * mus[0]
        write_dat(os.path.join(out, "plotdata", "majorant.dat"), np.arange(1, maj.size + 1), maj,
                  "n mu_0 zbar_n")
    return res


# ---------------------------------------------------------------------------
# sim


def initial_data(p, a):
    N = p["mode_count"]
    L = p["map_scale"]
    kind = p["initial"]
    if kind == "sine":
        k = p["wavenumber"]
        return PeriodicFunction.from_function(lambda x: np.sin(k * x), N)
    if kind == "profile":
        return evaluate_profile(ck._smooth_series(p["terms"], 256), a).F
    g = (lambda x: x / (1 + x * x)) if kind == "special" else (lambda x: x / (1 + x * x) ** 2)
    return LineFunction.from_function(g, N, L, "odd")


def _sim_worker(job):
    p, a, d = job
    keys = ("domain", "map_scale", "mode_count", "dt_initial", "dt_controller", "safety", "t_max",
            "blowup_threshold", "dealias_fraction", "snapshot_times", "remap", "model", "basis")
    basis = "chebyshev" if p["initial"] == "profile" else p["basis"]
    cfg = SimConfig(a=a, **{k: p[k] for k in keys if k != "basis"}, basis=basis)
    tr, rep = run(cfg, initial_data(p, a))
    tr.to_csv(d)
    tab = tr.table
    write_dat(os.path.join(d, "plotdata", "sup_norm.dat"), tab[:, 0], tab[:, 1],
              "t sup|omega|  (log scale in y)")
    write_dat(os.path.join(d, "plotdata", "h3_norm.dat"), tab[:, 0], tab[:, 3], "t H3 surrogate")
    if np.isfinite(rep.t_star_fit):
        t = tab[:, 0]
        keep = (t >= rep.fit_window[0]) & (t <= rep.fit_window[1])
        ts = t[keep]
        sup = tab[keep, 1]
        write_dat(os.path.join(d, "plotdata", "sup_norm_log.dat"), np.log(rep.t_star_fit - ts),
                  np.log(sup), "log(t* - t) log sup|omega|")
    report = json.loads(rep.to_json())
    report.update(status=tr.status, message=tr.message, a=a, steps=len(tr.history) - 1)
    write_json(os.path.join(d, "report.json"), clean(report))
    return a, tr.status, tr.message, rep.claimed, rep.residual


def cmd_sim(cfg, out) -> Outcome:
    p = cfg.params
    many = len(p["a"]) > 1
    rows = _sweep(cfg, _sim_worker, [(p, a, _point_dir(out, a, many)) for a in p["a"]])
    res = Outcome()
    stalled = [f"a={a:+g}: {msg}" for a, status, msg, _, _ in rows if status == "stalled"]
    if stalled:
        res.breakdown = "; ".join(stalled)
    res.extra["runs"] = [{"a": a, "status": s, "message": m, "rate_claimed": c, "fit_residual": r}
                         for a, s, m, c, r in rows]
    res.extra["claim_residual"] = CLAIM_RESIDUAL
    return res


# ---------------------------------------------------------------------------
# collapse


def _collapse_worker(job):
    p, a, d, ctx = job
    kw = {k: p[k] for k in ("terms", "N", "reference_terms", "reference_N", "mode_count", "safety",
                            "t_max", "samples")}
    e = ck.collapse_experiment(a, **kw)
    t = np.array([t for t, _ in e["metric"]])
    m = np.array([v for _, v in e["metric"]])
    m0 = np.array([v for _, v in e["metric_lambda0"]])
    write_csv(os.path.join(d, "collapse.csv"), ("t", "distance"), (t, m))
    write_csv(os.path.join(d, "collapse_lambda0.csv"), ("t", "distance"), (t, m0))
    write_dat(os.path.join(d, "plotdata", "collapse.dat"), t, m, f"t distance  a={a:g}")
    write_dat(os.path.join(d, "plotdata", "collapse_lambda0.dat"), t, m0,
              f"t distance with lambda=0  a={a:g}")
    c = ck.Check(None, f"collapse a={a:+g}", [
        ctx.part("profile residual", e["residual"], "<=", "series_residual"),
        ctx.part("max metric / t=0 metric", m.max() / m[0], "<=", "collapse_growth"),
        ctx.part("lambda=0 growth", m0.max() / m0[0], ">=", "discrimination")])
    tr = e["trajectory"]
    write_json(os.path.join(d, "report.json"), clean({
        "a": a, "lambda": e["profile"].lam, "reference_lambda": e["reference"].lam,
        "status": tr.status, "message": tr.message, "collapse_distance": np.column_stack([t, m]),
        "collapse_distance_lambda0": np.column_stack([t, m0])}))
    return c, tr.status, tr.message


def cmd_collapse(cfg, out) -> Outcome:
    p = cfg.params
    ctx = _context(cfg)
    many = len(p["a"]) > 1
    rows = _sweep(cfg, _collapse_worker, [(p, a, _point_dir(out, a, many), ctx) for a in p["a"]])
    res = Outcome(checks=[c for c, _, _ in rows])
    stalled = [m for _, s, m in rows if s == "stalled"]
    if stalled:
        res.breakdown = "; ".join(stalled)
    return res


# ---------------------------------------------------------------------------
# cusp


def _cusp_worker(job):
    p, i, a, d, seed, ctx = job
    w0, coef = ck.cusp_seed_data(seed, i, p["modes"], p["amplitude"], p["alpha"], p["mode_count"])
    cfg = SimConfig(a=a, domain="circle", mode_count=p["mode_count"], t_max=p["t_max"],
                    dt_initial=p["dt_initial"])
    tr = cusp_track(cfg, w0, 1.0 / p["alpha"])
    t = np.array([t for t, _ in tr.A_values])
    A = np.array([v for _, v in tr.A_values])
    write_json(os.path.join(d, "cusp.json"), clean(dict(json.loads(tr.to_json()), seed_coefficients=coef)))
    write_dat(os.path.join(d, "plotdata", "A_t.dat"), t, A, f"t A(t)  a={a:g}")
    x, f = tr.f_snapshots[-1].T
    write_csv(os.path.join(d, "f_final.csv"), ("x", "f"), (x, f))
    step = float(np.max(np.diff(A))) if A.size > 1 else 0.0
    c = ck.Check(None, f"cusp a={a:+g}", [ctx.part("max step increase of A", step, "<=", "cusp_step")])
    if tr.status != "completed":
        c.error = tr.message
    return c


def cmd_cusp(cfg, out) -> Outcome:
    p = cfg.params
    ctx = _context(cfg)
    many = len(p["a"]) > 1
    jobs = [(p, i, a, _point_dir(out, a, many), cfg.seed, ctx) for i, a in enumerate(p["a"])]
    return Outcome(checks=_sweep(cfg, _cusp_worker, jobs))


# ---------------------------------------------------------------------------
# verify


def _verify_worker(job):
    k, ctx = job
    return ck.run_check(k, ctx)


def cmd_verify(cfg, out) -> Outcome:
    p = cfg.params
    ids = sorted(set(p["criteria"])) if p["criteria"] else list(ck.SUITES[p["suite"]])
    bad = [k for k in ids if k not in ck.CHECKS]
    if bad:
        raise ValueError(f"unknown criteria {bad}; valid ids are 1..{len(ck.CHECKS)}")
    ctx = _context(cfg)
    results = _sweep(cfg, _verify_worker, [(k, ctx) for k in ids])
    res = Outcome(checks=results)
    write_json(os.path.join(out, "report.json"), clean({
        "passed": [c.id for c in results if c.passed],
        "failed": [c.id for c in results if not c.passed]}))
    return res


# ---------------------------------------------------------------------------
# report


def cmd_report(cfg, out) -> Outcome:
    src = cfg.params["input"]
    if not os.path.isdir(src):
        raise ValueError(f"input {src!r} is not a directory")
    runs = []
    failed = 0
    for d, _, names in sorted(os.walk(src)):
        if "manifest.json" not in names:
            continue
        with open(os.path.join(d, "manifest.json")) as fh:
            m = json.load(fh)
        bad = [c["title"] if c["id"] is None else c["id"] for c in m.get("checks", []) if not c["passed"]]
        failed += len(bad)
        runs.append({"path": os.path.relpath(d, src), "command": m["config"]["command"],
                     "status": m.get("status"), "checks": len(m.get("checks", [])), "failed": bad})
    if not runs:
        raise ValueError(f"no manifest.json found under {src!r}")
    write_json(os.path.join(out, "report.json"), {"input": src, "runs": runs, "failed_checks": failed})
    res = Outcome(extra={"runs": runs})
    if failed:
        res.checks.append(ck.Check(None, "collected runs", [ck.Part("failed checks", failed, "<=",
                                                                    "collected", 0.0)]))
    return res


COMMANDS = {"profile": cmd_profile, "sim": cmd_sim, "collapse": cmd_collapse, "cusp": cmd_cusp,
            "verify": cmd_verify, "report": cmd_report}
