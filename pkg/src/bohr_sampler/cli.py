"""Command-line front end.

Subcommands: ``generate``, ``verify``, ``simulate``, ``measure``,
``discrepancy`` and ``reconstruct``.  Every output embeds the effective
configuration, its hash and the seed; no timestamps are written, so
identical invocations give byte-identical files.

Exit codes: 0 when every check passes, 1 when a mathematical check fails,
2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import char_bounds, discrepancy, matching, neighborhoods, random_construction, tsets
from ._validation import parse_scalar
from .config import DEFAULTS, SEED_ENV_VAR, config_hash
from .core import IntegerInterval, Interval
from .exceptions import BohrSamplerError, HypothesisError, RankDeficiencyError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, Fraction) and x.denominator == 1:
        x = int(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x)) if abs(int(x)) >= 2**53 else int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        return v if math.isfinite(v) else str(v)
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in x]
    return str(x)


def _scalar(text, exact):
    try:
        return parse_scalar(text, exact=exact)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse number {text!r}") from exc


def _list(text, exact=True):
    return [_scalar(t, exact) for t in text.split(",") if t.strip()]


def _family(text, exact):
    """Comma-separated members; a member is a frequency or ``a0:a1:...`` coefficients."""
    members = []
    for tok in (text or "").split(","):
        tok = tok.strip()
        if not tok:
            continue
        if ":" in tok:
            members.append(tuple(_scalar(c, exact) for c in tok.split(":")))
        else:
            members.append(_scalar(tok, exact))
    return members


def _interval(text, exact, group="R"):
    vals = _list(text, exact)
    if len(vals) != 2:
        raise UsageError(f"interval must be 'lo,hi', got {text!r}")
    lo, hi = vals
    if not lo < hi:
        raise UsageError("interval needs lo < hi")
    if group == "Z":
        if int(lo) != lo or int(hi) != hi:
            raise UsageError("integer interval needs integer endpoints")
        return IntegerInterval(int(lo), int(hi))
    return Interval(lo, hi)


def _resolve_seed(args):
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is None or env == "":
        return DEFAULTS.seed
    try:
        return int(env)
    except ValueError as exc:
        raise UsageError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from exc


def _config(args, seed):
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "seed", "out")}
    cfg = {"command": args.command, "params": params, "seed": seed, "defaults": DEFAULTS.as_dict()}
    return _jsonable(cfg)


class _Emitter:
    def __init__(self, args, seed):
        self.args = args
        self.seed = seed
        self.config = _config(args, seed)
        self.hash = config_hash(self.config)
        self.out = Path(args.out) if args.out else None
        if self.out is not None:
            self.out.mkdir(parents=True, exist_ok=True)

    def document(self, body):
        doc = dict(_jsonable(body))
        doc["config"] = self.config
        doc["config_hash"] = self.hash
        doc["seed"] = self.seed
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    def table(self, rows):
        rows = [dict(_jsonable(r), config_hash=self.hash, seed=self.seed) for r in rows]
        buf = io.StringIO()
        fields = list(rows[0]) if rows else ["config_hash", "seed"]
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
        return buf.getvalue()

    def emit(self, name, body, rows=None):
        """Write ``name.json`` (and ``*.csv`` for rows) under --out, else print per --format."""
        if self.out is not None:
            (self.out / f"{name}.json").write_text(self.document(body))
            if rows is not None:
                (self.out / f"{name}.csv").write_text(self.table(rows))
            return
        if self.args.format == "csv" and rows is not None:
            sys.stdout.write(self.table(rows))
        else:
            sys.stdout.write(self.document(body))


def _load_points(path):
    """Read a generated set, ``{"points": [...]}`` or a bare list of numbers."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read point file {path!r}: {exc}") from exc
    try:
        if isinstance(data, dict) and "generated_set" in data:
            data = data["generated_set"]
        if isinstance(data, dict) and "blocks" in data:
            return random_construction.GeneratedSet.from_dict(data)
        if isinstance(data, dict):
            data = data["points"]
        return [Fraction(x) if isinstance(x, str) else float(x) for x in data]
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed point file {path!r}") from exc


def _flat(pts):
    if isinstance(pts, random_construction.GeneratedSet):
        return pts.points()
    return np.array([float(x) for x in pts], dtype=float)


def _covered(pts):
    if isinstance(pts, random_construction.GeneratedSet):
        blocks = pts.schedule.blocks[: pts.k_max]
        return Interval(blocks[0].lo, blocks[-1].hi)
    arr = _flat(pts)
    if arr.size == 0:
        return Interval(0.0, 1.0)
    lo, hi = float(arr.min()), float(arr.max())
    return Interval(lo, hi if hi > lo else lo + 1.0)


# ---------------------------------------------------------------- generate

def cmd_generate(args, em):
    ell = args.ell
    if ell is not None and "," in ell:
        ell = [int(x) for x in ell.split(",")]
    kwargs = {} if ell is None else {"ell": ell}
    if args.lengths:
        kwargs["lengths"] = [int(x) for x in args.lengths.split(",")]
    sched = random_construction.schedule_bd(args.kind, args.kmax, group=args.group, **kwargs)
    gs = random_construction.generate(sched, em.seed)
    rows, count = [], 0
    for k, (blk, pts) in enumerate(zip(sched.blocks, gs.blocks_realized), start=1):
        count += len(pts)
        T = blk.hi
        rows.append({
            "k": k, "lo": blk.lo, "hi": blk.hi, "ell": blk.ell, "count": len(pts),
            "step_length": tsets.step_length(pts),
            "density_proxy": float(Fraction(count) / Fraction(T)) if T else float("inf"),
        })
    body = {"check": "generate", "generated_set": gs.as_dict()}
    if em.out is not None:
        (em.out / "generated_set.json").write_text(em.document(body))
        (em.out / "summary.csv").write_text(em.table(rows))
    elif args.format == "csv":
        sys.stdout.write(em.table(rows))
    else:
        sys.stdout.write(em.document(body))
    return EXIT_OK


# ------------------------------------------------------------------ verify

def _verify_stl(args, pts):
    if not isinstance(pts, random_construction.GeneratedSet):
        raise UsageError("the stl check needs a generated set with block structure")
    B = tsets.BlockedSet.from_generated(pts)
    if len(B) < 2:
        raise UsageError("the stl check needs at least two blocks")
    rep = tsets.stl_tset_check(B)
    margin = None
    if rep.k0 is not None:
        margin = min(s - p for s, p in zip(rep.step_lengths[rep.k0 - 1:], rep.previous_lengths[rep.k0 - 2:]))
    body = {"verdict": rep.passed, "margin": margin, "k0": rep.k0, "gaps": rep.gaps,
            "gap_failures": rep.gap_failures, "stl_failures": rep.stl_failures,
            "step_lengths": rep.step_lengths, "previous_lengths": rep.previous_lengths,
            "note": "gap unboundedness is not observable on a finite prefix"}
    return body


def _verify_matching(args, pts, seed):
    F = _family(args.family, args.exact)
    I = _interval(args.interval, False) if args.interval else _covered(pts)
    probes = matching.default_probes(I, seed=seed, n_grid=0, n_random=args.probes)
    rep = matching.is_matching_set(_flat(pts), F, probes, float(args.eps))
    worst = float(rep.gaps.max())
    body = {"verdict": rep.passed, "margin": float(args.eps) - worst if math.isfinite(worst) else None,
            "n_failed": rep.n_failed, "coverage": rep.coverage,
            "window": [I.lo, I.hi]}
    return body


def _verify_sampling(args, pts, seed):
    F = _family(args.family, args.exact)
    if not args.interval:
        raise UsageError("the sampling check needs --interval")
    I = _interval(args.interval, False)
    arr = _flat(pts)
    arr = arr[(arr >= float(I.lo)) & (arr <= float(I.hi))]
    trials = args.trials if args.trials is not None else 100
    try:
        rep = matching.mat_to_samp_certificate(arr, F, F, I, float(args.eps), trials, seed,
                                               probes=matching.default_probes(I, seed=seed, n_grid=0,
                                                                              n_random=args.probes))
    except HypothesisError as exc:
        return {"verdict": False, "margin": None, "reason": str(exc)}
    return {"verdict": rep.passed, "margin": rep.worst_margin, "constant": rep.constant,
            "trials": rep.trials, "grid_tolerance": rep.tolerance, "falsified": rep.falsified}


def _verify_pfamily(args, seed):
    F = _family(args.family, args.exact)
    if not args.interval:
        raise UsageError("the pfamily check needs --interval")
    I = _interval(args.interval, args.exact)
    anchors = [_scalar(a, args.exact) for a in (args.anchors or "0").split(",")]
    rep = neighborhoods.p_family_report(F, I, len(F), args.eps if args.exact else float(args.eps), anchors,
                                        exact=True if args.exact else None)
    margins = []
    for a, _ in rep["per_anchor"]:
        m = neighborhoods.n_left(F, args.eps, a, I, exact=True if args.exact else None).measure
        margins.append(m - args.eps ** len(F) * (I.hi - I.lo))
    return {"verdict": rep["passed"], "margin": min(margins), "per_anchor": rep["per_anchor"],
            "n_probes": rep["n_probes"], "note": "anchors are a finite probe family"}


def _verify_mfetnei1(args):
    eps = _scalar(str(args.eps_text), True)
    F = _list(args.family, True)
    if not args.interval:
        raise UsageError("the mfetnei1 check needs --interval")
    I = _interval(args.interval, True)
    rep = char_bounds.mfetnei1_witnesses(F, eps, I)
    witnesses = [{"index": w.index, "z": w.z, "side": w.side,
                  "interval": None if w.interval is None else [w.interval.lo, w.interval.hi]}
                 for w in rep.witnesses]
    return {"verdict": rep.certified, "margin": rep.carrier_measure - rep.window_threshold,
            "N": rep.N, "carrier_measure": rep.carrier_measure, "threshold": rep.window_threshold,
            "blocks": [{"block": [b.block.lo, b.block.hi], "carrier_measure": b.carrier_measure,
                        "threshold": b.threshold, "certified": b.certified} for b in rep.blocks],
            "witnesses": witnesses, "all_witnesses_placed": rep.all_witnesses_placed}


def cmd_verify(args, em):
    needs_set = args.check in ("stl", "matching", "sampling")
    pts = None
    if needs_set:
        if not args.input:
            raise UsageError(f"the {args.check} check needs --input")
        pts = _load_points(args.input)
    if args.check in ("matching", "sampling", "pfamily") and not args.family:
        raise UsageError(f"the {args.check} check needs --family")
    if args.check in ("matching", "sampling", "pfamily"):
        args.eps = _scalar(args.eps_text, args.exact) if args.exact else float(_scalar(args.eps_text, False))
    if args.check == "stl":
        body = _verify_stl(args, pts)
    elif args.check == "matching":
        body = _verify_matching(args, pts, em.seed)
    elif args.check == "sampling":
        body = _verify_sampling(args, pts, em.seed)
    elif args.check == "pfamily":
        body = _verify_pfamily(args, em.seed)
    else:
        if not args.family:
            raise UsageError("the mfetnei1 check needs --family")
        body = _verify_mfetnei1(args)
    params = {"family": args.family, "eps": args.eps_text, "interval": args.interval, "input": args.input}
    body = {"check": args.check, "params": params, **body}
    row = {"check": args.check, "verdict": body["verdict"], "margin": body.get("margin")}
    em.emit("report", body, [row])
    return EXIT_OK if body["verdict"] else EXIT_FAIL


# ---------------------------------------------------------------- simulate

def cmd_simulate(args, em):
    trials = args.trials if args.trials is not None else DEFAULTS.trials
    if trials < 1:
        raise UsageError("--trials must be >= 1")
    if args.mode == "aest":
        N = args.N
        delta = _family(args.delta, False) if args.delta else list(range(1, N + 1))
        I = _interval(args.interval or "0,1", False)
        if args.eps is None or args.ell is None:
            raise UsageError("aest needs --eps and --ell")
        eps = float(_scalar(args.eps, False))
        res = random_construction.event_A_montecarlo(I, delta, args.n, args.ell, eps, trials=trials,
                                                     seed=em.seed)
        params = {"N": len(delta), "n": args.n, "eps": eps, "ell": args.ell}
    elif args.mode == "tsr":
        if args.Nk is None or args.Nkm1 is None:
            raise UsageError("tsr needs --Nk and --Nkm1")
        Nk, Nkm1 = _scalar(args.Nk, True), _scalar(args.Nkm1, True)
        ell = args.ell or 2
        res = tsets.ts_r_event_montecarlo(Interval(0, Nk), ell, float(Nkm1), trials, em.seed)
        exact = float(tsets.ts_r_pair_probability(Nk, Nkm1)) if ell == 2 else None
        params = {"Nk": Nk, "Nkm1": Nkm1, "ell": ell, "exact": exact}
    else:
        if args.Nk is None or args.Nkm1 is None:
            raise UsageError("tsz needs --Nk and --Nkm1")
        Nk, Nkm1 = int(_scalar(args.Nk, True)), int(_scalar(args.Nkm1, True))
        ell = args.ell or 2
        res = tsets.ts_z_event_montecarlo(Nk, Nkm1, ell, trials, em.seed)
        params = {"Nk": Nk, "Nkm1": Nkm1, "ell": ell}
    verdict = res.within_bound(3.0) if res.bound is not None else True
    row = {"params": params, "empirical": res.estimate, "bound": res.bound, "sigma": res.sigma,
           "trials": res.trials, "verdict": verdict}
    em.emit("simulation", {"check": f"simulate-{args.mode}", "rows": [row]}, [row])
    return EXIT_OK if verdict else EXIT_FAIL


# ----------------------------------------------------------------- measure

def cmd_measure(args, em):
    F = _family(args.family, args.exact)
    eps = _scalar(args.eps, args.exact)
    a = _scalar(args.a, args.exact)
    I = _interval(args.interval, args.exact, args.group)
    step = float(_scalar(args.step, False)) if args.step else None
    res = neighborhoods.n_left(F, eps, a, I, step=step, exact=True if args.exact else None)
    carrier = list(res.carrier) if isinstance(res.carrier, tuple) else res.carrier.pairs()
    body = {"check": "measure", "measure": res.measure, "exact": res.exact, "step": res.step,
            "error_bound": res.error_bound, "carrier": carrier,
            "p_family": neighborhoods.in_P_family(F, I, len(F), eps, a=a, step=step,
                                                  exact=True if args.exact else None)}
    row = {k: body[k] for k in ("measure", "exact", "step", "error_bound", "p_family")}
    em.emit("measure", body, [row])
    return EXIT_OK


# ------------------------------------------------------------- discrepancy

def cmd_discrepancy(args, em):
    x = _family(args.x, False)
    Ts = [float(t) for t in _list(args.T, False)]
    tau = float(_scalar(args.tau, False))
    boxes = discrepancy.BoxFamily.dyadic(len(x), args.level) if args.level else None
    rows = []
    for T in Ts:
        est = discrepancy.discrepancy_estimate(x, T, tau=tau, boxes=boxes)
        rows.append({"T": T, "estimate": est.value, "error_bound": est.error_bound,
                     "step": est.step, "n_boxes": est.n_boxes})
    body = {"check": "discrepancy", "rows": rows, "note": "box-family estimates are lower bounds"}
    if args.find_L:
        eps_list = [float(e) for e in _list(args.eps_list or "0.25", False)]
        L = discrepancy.find_L(x, float(_scalar(args.gamma, False)), [tau], Ts, eps_list)
        body["L"] = {"value": L, "status": "empirical", "found": L is not None}
    em.emit("discrepancy", body, rows)
    return EXIT_OK


# ------------------------------------------------------------- reconstruct

def cmd_reconstruct(args, em):
    if not args.input:
        raise UsageError("reconstruct needs --input")
    pts = _flat(_load_points(args.input))
    phases = _family(args.phases, False)
    if not phases:
        raise UsageError("reconstruct needs --phases")
    if args.interval:
        I = _interval(args.interval, False)
        pts = pts[(pts >= float(I.lo)) & (pts <= float(I.hi))]
    rng = np.random.default_rng(np.random.SeedSequence([int(em.seed), 0x52]))
    planted = rng.standard_normal(len(phases)) + 1j * rng.standard_normal(len(phases))
    f = matching.TrigPolynomial.from_arrays(planted, phases)
    samples = list(zip(pts.tolist(), f(pts).tolist()))
    body = {"check": "reconstruct", "n_samples": len(samples), "n_phases": len(phases)}
    try:
        res = matching.reconstruct_coefficients(samples, phases)
    except RankDeficiencyError as exc:
        body.update(verdict=False, reason=str(exc), rank=exc.rank, condition_number=exc.condition_number)
        em.emit("reconstruction", body, [{"verdict": False, "rank": exc.rank}])
        return EXIT_FAIL
    rel = float(np.linalg.norm(res.coefficients - planted) / np.linalg.norm(planted))
    cond = float(res.condition_number)
    verdict = cond <= args.max_cond and rel <= args.tol
    body.update(verdict=verdict, relative_error=rel, condition_number=cond, rank=res.rank,
                planted=planted.tolist(), recovered=res.coefficients.tolist())
    em.emit("reconstruction", body, [{"verdict": verdict, "relative_error": rel, "condition_number": cond,
                                      "rank": res.rank, "n_samples": len(samples)}])
    return EXIT_OK if verdict else EXIT_FAIL


# ------------------------------------------------------------------ parser

def _add_global(p, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(None), help=f"RNG seed (fallback: ${SEED_ENV_VAR})")
    p.add_argument("--format", choices=("json", "csv"), default=d("json"))
    p.add_argument("--exact", action="store_true", default=d(False), help="exact rational arithmetic")
    p.add_argument("--trials", type=int, default=d(None))
    p.add_argument("--kmax", type=int, default=d(None))
    p.add_argument("--out", default=d(None), help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bohr-sampler", description=__doc__.splitlines()[0])
    _add_global(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        _add_global(p, suppress=True)
        p.set_defaults(func=func)
        return p

    p = add("generate", cmd_generate, "draw a random set from a block schedule")
    p.add_argument("kind", choices=("tsbd", "bd-r", "bd-z"))
    p.add_argument("--group", choices=("R", "Z"))
    p.add_argument("--ell", help="sample-size rule or comma list")
    p.add_argument("--lengths", help="comma list of block lengths (bd kinds)")

    p = add("verify", cmd_verify, "run a verification check")
    p.add_argument("--check", required=True, choices=("stl", "matching", "sampling", "pfamily", "mfetnei1"))
    p.add_argument("--input", help="point set JSON")
    p.add_argument("--family", help="comma list of frequencies or a0:a1:... coefficients")
    p.add_argument("--eps", dest="eps_text", default="0.25")
    p.add_argument("--interval", help="window 'lo,hi'")
    p.add_argument("--probes", type=int, default=200, help="number of seeded probe anchors")
    p.add_argument("--anchors", help="comma list of anchors for pfamily")

    p = add("simulate", cmd_simulate, "Monte Carlo check of a probability bound")
    p.add_argument("mode", choices=("aest", "tsr", "tsz"))
    p.add_argument("--N", type=int, default=4)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--eps")
    p.add_argument("--ell", type=int)
    p.add_argument("--delta", help="explicit family (default integer characters 1..N)")
    p.add_argument("--interval")
    p.add_argument("--Nk")
    p.add_argument("--Nkm1")

    p = add("measure", cmd_measure, "measure a left polar neighborhood")
    p.add_argument("--family", required=True)
    p.add_argument("--eps", required=True)
    p.add_argument("--a", default="0")
    p.add_argument("--interval", required=True)
    p.add_argument("--group", choices=("R", "Z"), default="R")
    p.add_argument("--step")

    p = add("discrepancy", cmd_discrepancy, "discrepancy estimates over a list of horizons")
    p.add_argument("--x", required=True, help="components, as for --family")
    p.add_argument("--T", required=True, help="comma list of horizons")
    p.add_argument("--tau", default="0")
    p.add_argument("--level", type=int)
    p.add_argument("--find-L", dest="find_L", action="store_true", help="also estimate L (empirical)")
    p.add_argument("--gamma", default="0.1")
    p.add_argument("--eps-list", dest="eps_list")

    p = add("reconstruct", cmd_reconstruct, "recover planted coefficients from samples on a set")
    p.add_argument("--input", required=True)
    p.add_argument("--phases", required=True)
    p.add_argument("--interval")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-cond", dest="max_cond", type=float, default=1e6)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        seed = _resolve_seed(args)
        em = _Emitter(args, seed)
        return args.func(args, em)
    except (UsageError, BohrSamplerError, ValueError, OSError) as exc:
        print(f"bohr-sampler: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
