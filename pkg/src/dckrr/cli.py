"""Command-line front end.

Usage::

    dckrr COMMAND [--config run.json] [flags]

Configuration is a single JSON object; every key can also be given as a
flag with dashes instead of underscores (``--n-list 256,512``), and flags
override the file. Unknown keys are rejected. Results go to ``--out`` as
CSV (stdout when omitted). On failure the process exits with status 1 and
prints one JSON line ``{"error": ..., "type": ...}`` to stderr.
"""

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import csvio, sim, theory
from .dc import dc_fit, dc_predict
from .exceptions import InputError
from .kernels import KernelSpec, decay_from_dict, default_decay, median_bandwidth

COMMANDS = ("fit", "predict", "simulate-rate", "simulate-partitions", "timing-table", "frontier", "theory")


def _int(v):
    if isinstance(v, bool) or not isinstance(v, int):
        raise TypeError("an integer")
    return v


def _pos_int(v):
    if _int(v) < 1:
        raise TypeError("a positive integer")
    return v


def _num(v):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise TypeError("a number")
    return float(v)


def _pos_num(v):
    if _num(v) <= 0:
        raise TypeError("a positive number")
    return float(v)


def _bool(v):
    if not isinstance(v, bool):
        raise TypeError("a boolean")
    return v


def _str(v):
    if not isinstance(v, str):
        raise TypeError("a string")
    return v


def _int_list(v):
    if not isinstance(v, list) or not v or any(isinstance(x, bool) or not isinstance(x, int) or x < 1 for x in v):
        raise TypeError("a non-empty list of positive integers")
    return list(v)


def _dict(v):
    if not isinstance(v, dict):
        raise TypeError("an object")
    return dict(v)


def _rule(v):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return sim.lambda_value(v, 2, 1)
    if not isinstance(v, str):
        raise TypeError("'global', 'local' or 'explicit:<float>'")
    sim.lambda_value(v, 2, 1)
    return v


def _grid(v):
    v = _dict(v)
    for k, lst in v.items():
        _int_list(lst)
    return v


# key -> (validator, default)
SCHEMA = {
    "command": (_str, None),
    "seed": (_int, 0),
    "workers": (_pos_int, None),
    "out": (_str, None),
    "memory_cap_bytes": (_pos_int, sim.MEMORY_CAP),
    "timing": (_bool, True),
    "kernel": (_dict, None),
    "decay": (_dict, None),
    "lambda_rule": (_rule, "global"),
    "lambda": (_pos_num, None),
    "N": (_pos_int, None),
    "N_list": (_int_list, None),
    "m": (_pos_int, 1),
    "m_list": (_int_list, None),
    "trials": (_pos_int, sim.TRIALS),
    "sigma2": (_num, sim.SIGMA2),
    "data": (_str, None),
    "test_data": (_str, None),
    "target": (_str, None),
    "standardize": (_bool, False),
    "dim": (_pos_int, 3),
    "method_grid": (_grid, None),
    "test_fraction": (_pos_num, 0.2),
    "k": (_num, 4.0),
    "rho": (_num, 1.0),
    "hnorm2": (_num, 1.0),
    "l2norm2": (_num, 1.0),
    "bounded_basis": (_bool, True),
}

REQUIRED = {
    "fit": ("data", "target"),
    "predict": ("data", "target", "test_data"),
    "simulate-rate": ("N_list", "m_list"),
    "simulate-partitions": ("N", "m_list"),
    "timing-table": ("N_list", "m_list"),
    "frontier": ("method_grid",),
    "theory": (),
}


@dataclass
class RunConfig:
    command: str
    values: dict = field(default_factory=dict)

    def __getattr__(self, key):
        values = self.__dict__.get("values", {})
        if key in values:
            return values[key]
        if key in SCHEMA:
            return SCHEMA[key][1]
        raise AttributeError(key)


def _parse_list(s):
    return [int(x) for x in s.replace(" ", "").split(",") if x]


def _parse_bool(s):
    if s.lower() in ("1", "true", "yes"):
        return True
    if s.lower() in ("0", "false", "no"):
        return False
    raise InputError(f"expected a boolean, got {s!r}")


FLAG_TYPES = {
    "seed": int,
    "workers": int,
    "out": str,
    "memory_cap_bytes": int,
    "timing": _parse_bool,
    "lambda_rule": str,
    "lambda": float,
    "N": int,
    "N_list": _parse_list,
    "m": int,
    "m_list": _parse_list,
    "trials": int,
    "sigma2": float,
    "data": str,
    "test_data": str,
    "target": str,
    "standardize": _parse_bool,
    "dim": int,
    "test_fraction": float,
    "k": float,
    "rho": float,
    "hnorm2": float,
    "l2norm2": float,
    "bounded_basis": _parse_bool,
    "kernel": json.loads,
    "decay": json.loads,
    "method_grid": json.loads,
}

FLAG_ALIASES = {"memory_cap_bytes": ["--memory-cap"], "N": ["--n"], "N_list": ["--n-list"]}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser():
    p = _Parser(prog="dckrr", description="Divide-and-conquer kernel ridge regression experiments.")
    p.add_argument("command", nargs="?", choices=COMMANDS)
    p.add_argument("--config", help="JSON config file")
    for key, conv in FLAG_TYPES.items():
        names = FLAG_ALIASES.get(key, []) + ["--" + key.replace("_", "-")]
        names = list(dict.fromkeys(names))
        p.add_argument(*names, dest=key, type=str, default=None, metavar=key.upper())
    return p


def validate(values):
    unknown = sorted(set(values) - set(SCHEMA))
    if unknown:
        raise InputError(f"unknown config keys: {unknown}")
    if "command" not in values or values["command"] is None:
        raise InputError("missing required key 'command'")
    out = {}
    for key, v in values.items():
        check = SCHEMA[key][0]
        try:
            out[key] = check(v)
        except (TypeError, InputError) as exc:
            raise InputError(f"config key {key!r} must be {exc}, got {v!r}") from None
    cmd = out["command"]
    if cmd not in COMMANDS:
        raise InputError(f"unknown command {cmd!r}; expected one of {list(COMMANDS)}")
    for key in REQUIRED[cmd]:
        if key not in out:
            raise InputError(f"command {cmd!r} is missing required key {key!r}")
    if cmd == "theory" and "N" not in out and "N_list" not in out:
        raise InputError("command 'theory' is missing required key 'N' (or 'N_list')")
    if cmd in ("frontier",) and "data" in out and "target" not in out:
        raise InputError("command 'frontier' with 'data' is missing required key 'target'")
    return RunConfig(cmd, out)


def parse_config(path=None, flags=None, env=None):
    """Merge a JSON config file with flag overrides and validate.

    ``flags`` maps config keys to raw string values (as given on the
    command line) or already-typed values.
    """
    env = os.environ if env is None else env
    values = {}
    if path is not None:
        try:
            with open(path) as fh:
                values = json.load(fh)
        except OSError as exc:
            raise InputError(f"cannot read config {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"config {path} is not valid JSON: {exc}") from None
        if not isinstance(values, dict):
            raise InputError(f"config {path} must hold a JSON object")
    for key, raw in (flags or {}).items():
        if raw is None:
            continue
        if isinstance(raw, str) and key in FLAG_TYPES and key != "command":
            try:
                raw = FLAG_TYPES[key](raw)
            except (ValueError, json.JSONDecodeError):
                raise InputError(f"cannot parse --{key.replace('_', '-')} value {raw!r}") from None
        values[key] = raw
    if "workers" not in values and env.get("DCKRR_WORKERS"):
        try:
            values["workers"] = int(env["DCKRR_WORKERS"])
        except ValueError:
            raise InputError(f"DCKRR_WORKERS must be an integer, got {env['DCKRR_WORKERS']!r}") from None
    return validate(values)


# ---------------------------------------------------------------------------
# commands


def _kernel(cfg, data=None, default_family="sobolev1"):
    spec = dict(cfg.kernel or {"family": default_family})
    fam = spec.pop("family", None)
    try:
        if fam == "gaussian":
            dim = spec.pop("dim", data.dim if data is not None else 1)
            sigma = spec.pop("sigma", None)
            if sigma is None:
                if data is None:
                    raise InputError("gaussian kernel needs 'sigma' when no data is given")
                sigma = median_bandwidth(data.X, seed=cfg.seed)
            k = KernelSpec.gaussian(sigma, dim)
        elif fam == "sobolev1":
            spec.pop("dim", None)
            k = KernelSpec.sobolev1()
        elif fam == "linear":
            k = KernelSpec.linear(spec.pop("dim", data.dim if data is not None else 1))
        elif fam == "polynomial":
            k = KernelSpec.polynomial(
                spec.pop("degree", 2), spec.pop("offset", 1.0), spec.pop("dim", data.dim if data is not None else 1)
            )
        else:
            raise InputError(f"unknown kernel family {fam!r}")
    except TypeError as exc:
        raise InputError(f"bad kernel spec: {exc}") from None
    if spec:
        raise InputError(f"unknown kernel keys: {sorted(spec)}")
    return k


def _workers(cfg):
    return cfg.workers or 1


def _sim_cfg(cfg, N=None):
    return sim.SimConfig(
        m_list=cfg.m_list,
        trials=cfg.trials,
        sigma2=cfg.sigma2,
        seed=cfg.seed,
        lambda_rule=cfg.lambda_rule,
        workers=_workers(cfg),
        N=N,
    )


def _lambda(cfg, N, m):
    if cfg.values.get("lambda") is not None:
        return cfg.values["lambda"]
    return sim.lambda_value(cfg.lambda_rule, N, m)


def run(cfg, out):
    """Execute a validated :class:`RunConfig`, writing CSV to ``out``."""
    cmd = cfg.command
    if cmd == "simulate-rate":
        recs = sim.run_rate_sweep(_sim_cfg(cfg), cfg.N_list)
        csvio.emit_records(recs, out, timing=cfg.timing)
    elif cmd == "simulate-partitions":
        recs = sim.run_partition_sweep(_sim_cfg(cfg, cfg.N), cfg.N, cfg.m_list)
        csvio.emit_records(recs, out, timing=cfg.timing)
    elif cmd == "timing-table":
        recs = sim.run_timing_table(
            cfg.N_list, cfg.m_list, cfg.trials, seed=cfg.seed, sigma2=cfg.sigma2,
            memory_cap_bytes=cfg.memory_cap_bytes, workers=_workers(cfg),
        )
        csvio.emit_records(recs, out, timing=cfg.timing)
    elif cmd == "theory":
        decay = decay_from_dict(cfg.decay) if cfg.decay else default_decay(_kernel(cfg))
        reports = []
        for N in cfg.N_list or [cfg.N]:
            for m in cfg.m_list or [cfg.m]:
                lam = cfg.values.get("lambda") or theory.lambda_star(decay, N)
                inp = theory.TheoryInputs(
                    decay, N, m, lam, k=cfg.k, rho=cfg.rho, sigma2=cfg.sigma2,
                    hnorm2=cfg.hnorm2, l2norm2=cfg.l2norm2, bounded_basis=cfg.bounded_basis,
                )
                reports.append(theory.theorem1_bound(inp))
        csvio.emit_theory(reports, out)
    elif cmd == "frontier":
        if cfg.data:
            data = csvio.ingest_csv(cfg.data, cfg.target, cfg.standardize)
        else:
            data = sim.gen_gaussian_sim(cfg.N or 2000, cfg.dim, cfg.sigma2, sim.derive_seed(cfg.seed, 9))
        kernel = _kernel(cfg, data, default_family="gaussian")
        recs = sim.run_baseline_frontier(
            data, cfg.method_grid, kernel, lam=cfg.values.get("lambda"), seed=cfg.seed,
            test_fraction=cfg.test_fraction, workers=_workers(cfg),
        )
        csvio.emit_frontier(recs, out, timing=cfg.timing)
    elif cmd in ("fit", "predict"):
        data = csvio.ingest_csv(cfg.data, cfg.target, cfg.standardize)
        kernel = _kernel(cfg, data)
        N, m = len(data), cfg.m
        lam = _lambda(cfg, N, m)
        t0 = time.perf_counter()
        model = dc_fit(kernel, data, lam, m, cfg.seed, _workers(cfg))
        secs = time.perf_counter() - t0 if cfg.timing else 0.0
        if cmd == "fit":
            train_mse = float(np.mean((dc_predict(model, data.X) - data.y) ** 2))
            csvio.emit_table(("N", "m", "lambda", "train_mse", "fit_seconds"), [[N, m, lam, train_mse, secs]], out)
        else:
            test = csvio.ingest_csv(cfg.test_data, cfg.target, cfg.standardize)
            pred = dc_predict(model, test.X)
            csvio.emit_table(("index", "prediction"), [[i, p] for i, p in enumerate(pred)], out)


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        flags = {k: v for k, v in vars(args).items() if k not in ("config", "command")}
        if args.command is not None:
            flags["command"] = args.command
        cfg = parse_config(args.config, flags)
        out = cfg.out or "/dev/stdout"
        run(cfg, out)
    except Exception as exc:
        print(json.dumps({"error": str(exc), "type": type(exc).__name__}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
