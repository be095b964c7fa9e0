"""Command-line entry point: ``python3 -m dsssync <command>``.

Exit codes: 0 success, 1 invalid input, 2 a demo or ordering check failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import analysis as an
from .demos import DEMOS
from .dsscore import connected_nodes
from .errors import DemoMismatch, DssError
from .gf import ceil_log2
from .schemes import choose_gamma, consistency_failures, dedup_round, hybrid_costs
from .simnet import SCHEMES, SchemeConfig, build_system, ell_star_for, make_code, monte_carlo

DEFAULTS = {
    "scheme": "V", "n": 3, "k": 2, "B": None, "ell": 16, "q": 17, "model": "ud",
    "D": None, "p": None, "trials": 1000, "seed": 0, "gamma": None, "budget": None,
    "out": None, "format": "csv", "steps": 16, "pattern": None, "blocks": None,
    "workers": 1, "check_every": 1,
}


class ConfigError(ValueError):
    pass


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: line 1: top level must be an object")
    unknown = set(data) - set(DEFAULTS)
    if unknown:
        lines = text.splitlines()
        key = sorted(unknown)[0]
        lineno = next((i + 1 for i, ln in enumerate(lines) if f'"{key}"' in ln), 1)
        raise ConfigError(f"{path}: line {lineno}: unknown key {key!r}")
    return data


def resolve(args: argparse.Namespace) -> dict:
    """Flags win over the config file, which wins over defaults."""
    cfg = dict(DEFAULTS)
    cfg.update(_load_config(getattr(args, "config", None)))
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _model(cfg: dict, ell: int, B: int) -> an.EditModel:
    m = str(cfg["model"]).lower()
    if m == "ud":
        return an.EditModel.ud(ell, B)
    if m == "cnd":
        return an.EditModel.cnd(ell, B, int(cfg["D"] if cfg["D"] is not None else B))
    if m == "pnd":
        return an.EditModel.pnd(ell, B, float(cfg["p"] if cfg["p"] is not None else 1 / ell))
    raise ConfigError(f"unknown model {cfg['model']!r}")


def _emit(rows: list[dict], cfg: dict):
    if cfg["format"] == "json":
        text = json.dumps(rows, indent=1) + "\n"
    elif cfg["format"] == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        text = buf.getvalue()
    else:
        raise ConfigError(f"unknown format {cfg['format']!r}")
    if cfg["out"]:
        with open(cfg["out"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def analytic_prediction(scheme: str, model: an.EditModel, n: int, k: int, q: int,
                        ell_star: int | None = None) -> float:
    """Expected bits per (user, connected node) pair with integer bit counts."""
    ell = model.ell
    pb, vb = ceil_log2(ell), ceil_log2(q)
    m = model.expected_edits()
    if scheme == "T":
        return an.expected_span_implemented(model) * vb
    if scheme == "P":
        return m * (pb + vb + 1)
    if scheme == "V":
        return m * (pb + vb)
    if scheme == "H":
        head = ell - ell_star
        return m * (head / ell * (ceil_log2(max(head, 1)) + vb) + ell_star / ell * ell_star * vb)
    if scheme == "C" and model.variant == "UD":
        spec = make_code(n, k, q)
        conn = [len(connected_nodes(spec, s)) for s in range(spec.B)]
        total = n * pb + sum(conn[1:]) * (pb + vb)
        return total / sum(conn)
    return math.nan


def cmd_simulate(cfg: dict) -> list[dict]:
    scheme = str(cfg["scheme"]).upper()
    if scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {scheme!r}")
    n, k, ell, q = int(cfg["n"]), int(cfg["k"]), int(cfg["ell"]), int(cfg["q"])
    spec = make_code(n, k, q)
    if cfg["B"] is not None and int(cfg["B"]) != spec.B:
        raise ConfigError(f"B must equal k={k} for an [n, k] MDS code")
    gamma = cfg["gamma"]
    ell_star = None
    if scheme == "H":
        ell_star = ell_star_for(ell, 0.5 if gamma is None else float(gamma))
    model = _model(cfg, ell, spec.B)
    sc = SchemeConfig(scheme, n, k, ell, q, gamma=gamma, ell_star=ell_star)
    summary = monte_carlo(sc, model, int(cfg["trials"]), int(cfg["seed"]),
                          check_every=int(cfg["check_every"]), workers=int(cfg["workers"]))
    pred = analytic_prediction(scheme, model, n, k, q, ell_star)
    ratio = summary.mean_bits / pred if pred and not math.isnan(pred) else math.nan
    return [{
        "scheme": scheme, "model": model.variant, "ell": ell, "B": spec.B, "q": q,
        "trials": summary.trials, "mean_bits_user_node": summary.mean_bits,
        "stderr": summary.stderr_bits, "analytic_prediction": pred, "ratio": ratio,
        "mean_span_fraction": summary.mean_span_fraction, "errors": summary.errors,
        "inconsistent": summary.inconsistent,
    }]


def _ells(cfg) -> list[int]:
    v = cfg["ell"]
    if isinstance(v, str):
        return [int(x) for x in v.split(",")]
    if isinstance(v, list):
        return [int(x) for x in v]
    return [int(v)]


def cmd_analyze(cfg: dict) -> list[dict]:
    q = int(cfg["q"])
    B = int(cfg["B"] if cfg["B"] is not None else cfg["k"])
    rows = []
    for ell in _ells(cfg):
        model = _model(cfg, ell, B)
        t = an.expected_cost_T(model, q).bits
        pv = an.expected_cost_PV(model, q).bits
        lim = an.eta_limit(model)
        rr = an.expected_cost_reduced_range(model) if model.variant != "CND" or model.D <= ell else math.nan
        lq, le = math.log2(q), math.log2(ell)
        rows.append({
            "model": model.variant, "ell": ell, "B": B, "q": q, "D": model.D, "p": model.p,
            "E_imin": an.expected_imin(model), "eta": an.eta(model),
            "eta_limit": lim.value, "eta_limit_is_bound": lim.is_bound,
            "cost_T": t, "cost_PV": pv, "ratio_PV_T": pv / t if t else math.nan,
            "reduced_range_position_bits": rr,
            "worst_T": (ell - 1) * lq, "worst_P": le + lq + 1, "worst_V": le + lq,
            "overhead_T": 0.0, "overhead_P": le, "overhead_V": le,
            "lev_bound_d1": an.lev_lower_bound(ell, 1, q),
        })
    return rows


def cmd_tradeoff(cfg: dict) -> list[dict]:
    ell, q = _ells(cfg)[0], int(cfg["q"])
    steps = int(cfg["steps"])
    top = math.log2(ell)
    lq, le = math.log2(q), math.log2(ell)
    lower = an.lev_lower_bound(ell, 1, q)
    t_worst = (ell - 1) * lq
    budgets = [top * (i + 1) / steps for i in range(steps)]
    if cfg["budget"] is not None:
        budgets = [float(cfg["budget"])]
    rows = []
    for g in budgets:
        ch = choose_gamma(ell, q, g)
        comm, storage = hybrid_costs(ell, q, ch.gamma)
        rows.append({
            "budget": g, "gamma": ch.gamma, "cap_active": ch.cap_active,
            "hybrid_comm": comm, "hybrid_storage": storage,
            "V_comm": le + lq, "V_storage": le, "P_comm": le + lq + 1, "P_storage": le,
            "T_comm": t_worst, "T_storage": 0.0, "lower_bound": lower,
        })
    return rows


def tradeoff_ordering_ok(rows) -> bool:
    return all(r["lower_bound"] <= r["hybrid_comm"] + 1e-9 <= r["T_comm"] + 2e-9 for r in rows)


def cmd_dedup(cfg: dict) -> list[dict]:
    if not cfg["pattern"]:
        raise ConfigError("dedup needs --pattern, e.g. --pattern 2,3")
    pattern = [int(x) for x in str(cfg["pattern"]).split(",")]
    n, k, ell, q = int(cfg["n"]), int(cfg["k"]), int(cfg["ell"]), int(cfg["q"])
    blocks = None
    if cfg["blocks"]:
        blocks = [[int(x) for x in b.split(",")] for b in str(cfg["blocks"]).split(";")]
        ell = len(blocks[0])
    system = build_system("V", n, k, None, ell, q, blocks=blocks, seed=int(cfg["seed"]))
    rep = dedup_round(system.storage, pattern)
    bad = consistency_failures(system.storage)
    hits = rep.info["matches"]
    return [{
        "user": s, "match_position": hits[s] + 1 if s in hits else 0,
        "new_length": int(system.storage.lengths[s]),
        "block": " ".join(str(int(v)) for v in system.storage.blocks[s]),
        "bits_sent": sum(m.bits for m in rep.messages if m.src == "user" and m.src_id == s),
        "consistent": not bad,
    } for s in range(system.spec.B)]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dsssync", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON file with any of the flag values; flags win")
        sp.add_argument("--scheme", choices=[*SCHEMES, *[s.lower() for s in SCHEMES]])
        sp.add_argument("--n", type=int)
        sp.add_argument("--k", type=int)
        sp.add_argument("--B", type=int)
        sp.add_argument("--ell", help="block length (analyze accepts a comma list)")
        sp.add_argument("--q", type=int)
        sp.add_argument("--model", choices=["ud", "cnd", "pnd"])
        sp.add_argument("--D", type=int)
        sp.add_argument("--p", type=float)
        sp.add_argument("--trials", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--gamma", type=float)
        sp.add_argument("--budget", type=float)
        sp.add_argument("--out")
        sp.add_argument("--format", choices=["csv", "json"])

    d = sub.add_parser("demo", help="replay a worked example and check it")
    d.add_argument("name", choices=sorted(DEMOS))
    s = sub.add_parser("simulate", help="Monte Carlo cost of one scheme under an edit model")
    common(s)
    s.add_argument("--workers", type=int)
    s.add_argument("--check-every", dest="check_every", type=int)
    a = sub.add_parser("analyze", help="closed-form costs for a grid of block lengths")
    common(a)
    t = sub.add_parser("tradeoff", help="communication vs storage-overhead sweep")
    common(t)
    t.add_argument("--steps", type=int)
    u = sub.add_parser("dedup", help="remove a repeated pattern from every block")
    common(u)
    u.add_argument("--pattern")
    u.add_argument("--blocks", help="semicolon-separated blocks, e.g. '1,2,3;3,2,1'")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "demo":
            print("\n".join(DEMOS[args.name]()))
            print("OK")
            return 0
        cfg = resolve(args)
        if cfg["ell"] is not None and args.command != "analyze" and isinstance(cfg["ell"], str):
            cfg["ell"] = int(cfg["ell"])
        rows = {"simulate": cmd_simulate, "analyze": cmd_analyze,
                "tradeoff": cmd_tradeoff, "dedup": cmd_dedup}[args.command](cfg)
        _emit(rows, cfg)
        if args.command == "tradeoff" and not tradeoff_ordering_ok(rows):
            print("ordering check failed: lower bound <= hybrid <= Scheme T violated", file=sys.stderr)
            return 2
        return 0
    except DemoMismatch as exc:
        print(f"demo mismatch: {exc}", file=sys.stderr)
        return 2
    except (DssError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
