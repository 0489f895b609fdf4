"""Command-line front end: ``nnsym <subcommand> ...`` (or ``python -m nnsym``)."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import network as gc
from .complexan import (LineSpec, PointCloud, alignment_partition, cluster_depth_eps, default_schedule,
                        density_along, empirical_cluster_vs_depth, poles_in_window, single_layer_pole_check)
from .nonlinearity import Nonlinearity, Tanh, from_dict as rho_from_dict, parse as parse_rho
from .rewrite import (BudgetExceeded, ModificationPlan, RewriteLog, anchor_input, anchor_search,
                      apply_modification, apply_reduction, default_samples, eval_map, find_reduction,
                      fold_constants, invert_modification, rho_isomorphic_bounded, sign_isomorphic,
                      zero_map_probe)
from .symmetry import AffineSymmetry, construct_exotic, discover_symmetry, residual, verify_symmetry


@dataclass(frozen=True)
class RunConfig:
    seed: int = 42
    tol_map: float = 1e-9
    grid_points: int = 100
    window: float = 20.0
    format: str = "json"

    def __post_init__(self):
        if not self.tol_map > 0:
            raise ValueError("--tol must be positive")
        if self.grid_points < 1:
            raise ValueError("--grid must be at least 1")


class Failure(Exception):
    """Validation failure: exit code 1."""


# io helpers -----------------------------------------------------------------

def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, ValueError) as e:
        raise Failure(f"cannot read {path}: {e}") from e


def _load_net(path) -> gc.Network:
    d = _read_json(path)
    try:
        return gc.from_dict(d)
    except (KeyError, TypeError, ValueError) as e:
        raise Failure(f"invalid network file {path}: {e}") from e


def _rho(args, net: gc.Network | None = None) -> Nonlinearity:
    if args.rho:
        return parse_rho(args.rho)
    if net is not None and isinstance(net.meta.get("nonlinearity"), dict):
        return rho_from_dict(net.meta["nonlinearity"])
    if net is not None and isinstance(net.meta.get("nonlinearity"), str):
        return parse_rho(net.meta["nonlinearity"])
    return Tanh()


def _floats(s: str) -> list[float]:
    return [float(x) for x in s.split(",") if x.strip()]


def _triples(s: str) -> list[tuple[float, ...]]:
    return [tuple(_floats(t)) for t in s.split(";") if t.strip()]


def _load_cloud(path) -> PointCloud:
    if str(path).endswith(".csv"):
        try:
            with open(path) as fh:
                rows = list(csv.DictReader(fh))
        except OSError as e:
            raise Failure(f"cannot read {path}: {e}") from e
        pts = [complex(float(r["re"]), float(r["im"])) for r in rows]
        return PointCloud.from_array(pts)
    d = _read_json(path)
    if "window" not in d:
        return PointCloud.from_array([complex(a, b) for a, b in d["points"]])
    return PointCloud.from_dict(d)


def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _emit(report: dict, cfg: RunConfig, table: str | None = None) -> str:
    """Render a report; ``table`` is a preformatted CSV body used in csv mode."""
    if cfg.format == "json":
        return json.dumps(_jsonable(report), sort_keys=True, indent=1)
    if cfg.format == "csv":
        if table is not None:
            return table.rstrip("\n")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        for k, v in sorted(report.items()):
            w.writerow([k, json.dumps(_jsonable(v), sort_keys=True)])
        return buf.getvalue().rstrip("\n")
    lines = []
    for k, v in sorted(report.items()):
        v = _jsonable(v)
        lines.append(f"{k}: {v if isinstance(v, (str, int, float, bool)) or v is None else json.dumps(v, sort_keys=True)}")
    return "\n".join(lines)


def _write_net(net: gc.Network, path):
    if path:
        gc.save(net, path)


# subcommands ---------------------------------------------------------------
# each returns (report, ok, csv_table)

def cmd_validate(args, cfg):
    errs = gc.validate(_load_net(args.network))
    return {"valid": not errs, "violations": errs}, not errs, None


def cmd_eval(args, cfg):
    net = _load_net(args.network)
    rho = _rho(args, net)
    if args.at:
        pts = np.array([_floats(a) for a in args.at])
        if pts.shape[1] != len(net.inputs):
            raise Failure(f"--at needs {len(net.inputs)} coordinates (inputs in order {net.input_order()})")
    else:
        pts = np.random.default_rng(cfg.seed).uniform(-5, 5, size=(cfg.grid_points, len(net.inputs)))
    vals = eval_map(net, rho, pts)
    rows = [{"at": list(p), "value": list(v)} for p, v in zip(pts.tolist(), vals.tolist())]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([*net.input_order(), *[f"out{i}" for i in range(net.dim_out)]])
    for p, v in zip(pts.tolist(), vals.tolist()):
        w.writerow([repr(x) for x in (*p, *v)])
    if len(rows) == 1 and net.dim_out == 1 and cfg.format == "text":
        return {"value": rows[0]["value"][0]}, True, None
    return {"inputs": net.input_order(), "points": rows}, True, buf.getvalue()


def cmd_reduce(args, cfg):
    net = _load_net(args.network)
    rho = _rho(args, net)
    log = RewriteLog(args.log)
    cur = gc.prune(fold_constants(net, rho))
    steps = []
    for _ in range(args.max_steps if args.max_steps is not None else len(net.nodes) + 1):
        w = find_reduction(cur, rho)
        if w is None:
            break
        nxt = apply_reduction(cur, w, rho)
        log.add("reduce", [cur, w], nxt)
        steps.append(w.to_dict())
        cur = nxt
    _write_net(cur, args.out)
    return {"steps": steps, "network": cur.to_dict(), "result_hash": cur.content_hash()}, True, None


def cmd_modify(args, cfg):
    net = _load_net(args.network)
    plan = ModificationPlan.from_dict(_read_json(args.plan))
    rho = _rho(args, net)
    res = apply_modification(net, plan, rho, check=not args.no_check)
    RewriteLog(args.log).add("modify", [net, plan], res)
    _write_net(res, args.out)
    return {"network": res.to_dict(), "result_hash": res.content_hash()}, True, None


def cmd_invert(args, cfg):
    net = _load_net(args.network)
    plan = ModificationPlan.from_dict(_read_json(args.plan))
    inv = invert_modification(net, plan)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(inv.to_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")
    return {"plan": inv.to_dict()}, True, None


def cmd_iso_sign(args, cfg):
    a, b = _load_net(args.a), _load_net(args.b)
    try:
        iso = sign_isomorphic(a, b, tol=args.tol if args.tol is not None else 1e-10)
    except BudgetExceeded as e:
        raise Failure(str(e)) from e
    if iso is None:
        return {"isomorphic": False}, False, None
    return {"isomorphic": True, "mapping": iso.to_dict()}, True, None


def cmd_iso_rho(args, cfg):
    a, b = _load_net(args.a), _load_net(args.b)
    rho = _rho(args, a)
    res = rho_isomorphic_bounded(a, b, rho, depth_budget=args.budget)
    chain = [p.to_dict() for p, _ in res.chain]
    return {"status": res.status, "chain": chain, "relabel": res.relabel}, res.found, None


def cmd_anchor(args, cfg):
    net = _load_net(args.network)
    rho = _rho(args, net)
    res = anchor_input(net, rho, args.input, args.value)
    RewriteLog(args.log).add("anchor", [net, {"input": args.input, "value": args.value}], res)
    _write_net(res, args.out)
    return {"network": res.to_dict(), "result_hash": res.content_hash()}, True, None


def cmd_anchor_search(args, cfg):
    net = _load_net(args.network)
    rho = _rho(args, net)
    res = anchor_search(net, rho, args.input, default_samples(args.samples, cfg.seed))
    return {"a": res.a, "regular": res.regular, "tried": res.tried, "exhausted": res.exhausted}, not res.exhausted, None


def cmd_zero_probe(args, cfg):
    net = _load_net(args.network)
    rho = _rho(args, net)
    thr = args.tol if args.tol is not None else cfg.tol_map
    res = zero_map_probe(net, rho, grid_size=cfg.grid_points, seed=cfg.seed, threshold=thr)
    return {"max_abs": res.max_abs, "verdict": res.verdict, "grid_size": res.grid_size}, True, None


def cmd_poles(args, cfg):
    if args.network:
        net = _load_net(args.network)
        res = single_layer_pole_check(net, cfg.window, _rho(args, net))
        cloud = res.predicted_poles
        extra = {"nonempty": res.nonempty, "confirmed": res.confirmed}
    elif args.terms:
        rho = _rho(args)
        cloud = poles_in_window(rho, _triples(args.terms), cfg.window)
        extra = {"nonempty": len(cloud) > 0}
    else:
        raise Failure("poles needs a network file or --terms")
    return {**cloud.to_dict(), **extra}, True, cloud.to_csv()


def cmd_cluster(args, cfg):
    cloud = _load_cloud(args.cloud)
    sched = _floats(args.eps) if args.eps else default_schedule()
    cd = cluster_depth_eps(cloud, sched, args.m)
    return cd.to_dict(), True, None


def cmd_density(args, cfg):
    cloud = _load_cloud(args.cloud)
    if args.line:
        x1, x2, y1, y2 = _floats(args.line)
        F = LineSpec(complex(x1, x2), complex(y1, y2))
    elif args.set:
        F = _load_cloud(args.set)
    else:
        raise Failure("density needs --line or --set")
    d = density_along(F, cloud, args.eps, cfg.window)
    return {"density": d, "eps": args.eps, "window": cfg.window, "estimate": "finite-window"}, True, None


def cmd_partition(args, cfg):
    p = alignment_partition(_rho(args), _triples(args.terms))
    return p.to_dict(), True, None


def _load_sym(path) -> AffineSymmetry:
    try:
        return AffineSymmetry.from_dict(_read_json(path))
    except (KeyError, TypeError, ValueError) as e:
        raise Failure(f"invalid symmetry file {path}: {e}") from e


def cmd_sym_verify(args, cfg):
    rho = _rho(args)
    s = _load_sym(args.symmetry)
    chk = verify_symmetry(rho, s, tol=args.tol if args.tol is not None else 1e-10)
    return {"holds": chk.holds, "minimal": chk.minimal, "max_residual": chk.max_residual}, chk.holds and chk.minimal, None


def cmd_sym_discover(args, cfg):
    rho = _rho(args)
    cands = [tuple(c) for c in _triples(args.candidates)]
    s = discover_symmetry(rho, cands)
    if s is None:
        return {"found": False}, False, None
    return {"found": True, "symmetry": s.to_dict(), "residual": residual(rho, s)}, True, None


def cmd_sym_exotic(args, cfg):
    ex = construct_exotic(_floats(args.alphas))
    chk = verify_symmetry(ex.sigma, ex.symmetry, tol=1e-6)
    return {"symmetry": ex.symmetry.to_dict(), "sigma": ex.sigma.to_dict(), "b": ex.b, "K": ex.K,
            "growth_root": ex.growth_root, "tail_bound": ex.tail_bound,
            "max_residual": chk.max_residual}, chk.holds, None


def cmd_depth_scan(args, cfg):
    net = _load_net(args.network)
    res = empirical_cluster_vs_depth(net, _rho(args, net), max_depth=args.max_depth)
    cloud = res.sampled_singularities
    return {**res.to_dict(), "evidence": "empirical"}, True, cloud.to_csv()


COMMANDS = {
    "validate": (cmd_validate, "check a network file for well-formedness"),
    "eval": (cmd_eval, "evaluate the output map"),
    "reduce": (cmd_reduce, "apply reductions until irreducible"),
    "modify": (cmd_modify, "apply a modification plan"),
    "invert": (cmd_invert, "print the inverse of a plan"),
    "iso-sign": (cmd_iso_sign, "search for a sign isomorphism"),
    "iso-rho": (cmd_iso_rho, "bounded search for a chain of regular modifications"),
    "anchor": (cmd_anchor, "fix one input to a constant"),
    "anchor-search": (cmd_anchor_search, "find an anchor value giving a strongly regular network"),
    "zero-probe": (cmd_zero_probe, "test whether the output map vanishes on a grid"),
    "poles": (cmd_poles, "pole cloud of a single-layer net or of explicit terms"),
    "cluster": (cmd_cluster, "clustering depth of a point cloud"),
    "density": (cmd_density, "windowed density of a point cloud near a line or set"),
    "partition": (cmd_partition, "alignment partition of terms"),
    "sym-verify": (cmd_sym_verify, "verify an affine symmetry"),
    "sym-discover": (cmd_sym_discover, "search candidate terms for a symmetry"),
    "sym-exotic": (cmd_sym_exotic, "construct an exotic symmetry"),
    "depth-scan": (cmd_depth_scan, "empirical clustering depth of a single-input net"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--grid", type=int, default=100)
    common.add_argument("--window", type=float, default=20.0)
    common.add_argument("--format", choices=("json", "csv", "text"), default=None)
    common.add_argument("--json", action="store_true", help="same as --format json")
    common.add_argument("--rho", default=None, help="tanh, crelu, relu, abs or leaky:SLOPE")

    p = argparse.ArgumentParser(prog="nnsym", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)
    sp = {name: sub.add_parser(name, parents=[common], help=h) for name, (_, h) in COMMANDS.items()}

    for name in ("validate", "eval", "reduce", "modify", "invert", "anchor", "anchor-search",
                 "zero-probe", "depth-scan"):
        sp[name].add_argument("network")
    sp["eval"].add_argument("--at", action="append", help="comma-separated point; may repeat")
    for name in ("modify", "invert"):
        sp[name].add_argument("plan")
    for name in ("reduce", "modify", "anchor"):
        sp[name].add_argument("--out", default=None)
        sp[name].add_argument("--log", default=None, help="append JSONL rewrite records here")
    sp["invert"].add_argument("--out", default=None)
    sp["reduce"].add_argument("--max-steps", type=int, default=None)
    sp["modify"].add_argument("--no-check", action="store_true")
    for name in ("iso-sign", "iso-rho"):
        sp[name].add_argument("a")
        sp[name].add_argument("b")
    sp["iso-rho"].add_argument("--budget", type=int, default=3)
    for name in ("anchor", "anchor-search"):
        sp[name].add_argument("--input", required=True)
    sp["anchor"].add_argument("--value", type=float, required=True)
    sp["anchor-search"].add_argument("--samples", type=int, default=32)
    sp["poles"].add_argument("network", nargs="?")
    sp["poles"].add_argument("--terms", help="'alpha,beta,gamma;...'")
    for name in ("cluster", "density"):
        sp[name].add_argument("cloud", help="point cloud (.csv or .json)")
    sp["cluster"].add_argument("--eps", help="decreasing comma-separated schedule")
    sp["cluster"].add_argument("--m", type=int, default=3)
    sp["density"].add_argument("--line", help="x_re,x_im,y_re,y_im")
    sp["density"].add_argument("--set", help="second point cloud")
    sp["density"].add_argument("--eps", type=float, default=0.1)
    sp["partition"].add_argument("--terms", required=True)
    sp["sym-verify"].add_argument("symmetry")
    sp["sym-discover"].add_argument("--candidates", required=True, help="'beta,gamma;...'")
    sp["sym-exotic"].add_argument("--alphas", required=True)
    sp["depth-scan"].add_argument("--max-depth", type=int, default=3)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on usage errors
    fmt = "json" if args.json else (args.format or "json")
    try:
        cfg = RunConfig(args.seed, args.tol if args.tol is not None else 1e-9, args.grid, args.window, fmt)
    except ValueError as e:
        parser.error(str(e))
    fn = COMMANDS[args.cmd][0]
    try:
        report, ok, table = fn(args, cfg)
    except Failure as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(_emit(report, cfg, table))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
