"""Batch command-line entry point.

Subcommands: ``specfun eval``, ``kernel eval``, ``spectral
{eval,variogram,asymptote}``, ``cov {eval,matrix,fit,slnd}``, ``simulate``,
``moduli``, ``verify``.  Every run writes its outputs as CSV (floats printed
with 17 significant digits, fixed column order) plus a ``manifest.json``
echoing the configuration and seeds, so outputs are reproducible
byte-for-byte from the manifest.

Configuration files are JSON (key/value with nesting); unknown and
duplicate keys are rejected.  The thread count comes from --threads, else
the LKSPIDE_THREADS environment variable, else 1."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import covariance as cov
from . import moduli as md
from . import sampler as smp
from .kernels import ModelParams, lks_kernel, lks_kernel_ft, tf_kernel, tf_kernel_ft
from .specfun import gamma_fn, hyp2F1, mills_ratio, mittag_leffler, ml_bounds
from .spectral import SpectralDensity, eval_sd, fit_asymptote, spatial_variogram, temporal_variogram
from .verify import DEFAULT_TOLERANCES, RunConfig, run_verify

__all__ = ["parse_config", "main"]

_KNOWN_KEYS = {
    "command", "family", "epsilon", "theta", "beta", "dim", "t",
    "grids", "seeds", "tolerances", "output_dir", "only", "threads",
}
_KNOWN_GRID_KEYS = {"n", "span", "n_freq", "replicas"}


class ConfigError(ValueError):
    pass


def _no_duplicates(pairs):
    seen = {}
    for k, v in pairs:
        if k in seen:
            raise ConfigError("duplicate key: %r" % k)
        seen[k] = v
    return seen


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON configuration document into a RunConfig.

    Unknown keys, duplicate keys and out-of-range parameter values are
    rejected with the offending key path in the message."""
    try:
        doc = json.loads(text, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as exc:
        raise ConfigError("malformed config document: %s" % exc) from exc
    if not isinstance(doc, dict):
        raise ConfigError("config root must be an object")
    unknown = set(doc) - _KNOWN_KEYS
    if unknown:
        raise ConfigError("unknown config keys: %s" % ", ".join(sorted(unknown)))
    grids = doc.get("grids", {})
    if not isinstance(grids, dict):
        raise ConfigError("grids: must be an object")
    bad = set(grids) - _KNOWN_GRID_KEYS
    if bad:
        raise ConfigError("grids: unknown keys: %s" % ", ".join(sorted(bad)))
    tolerances = doc.get("tolerances", {})
    for k in tolerances:
        if k not in DEFAULT_TOLERANCES:
            raise ConfigError("tolerances.%s: no such tolerance" % k)
    params = None
    if "family" in doc:
        try:
            if doc["family"] == "lks":
                params = ModelParams.lks(doc.get("epsilon", 1.0), doc.get("theta", 0.0),
                                         doc.get("dim", 1))
            elif doc["family"] == "tf":
                params = ModelParams.tf(doc.get("beta", 0.5), doc.get("dim", 1))
            else:
                raise ConfigError("family: must be 'lks' or 'tf'")
        except ValueError as exc:
            raise ConfigError("params: %s" % exc) from exc
    seeds = doc.get("seeds", [2026])
    if not isinstance(seeds, list) or not seeds:
        raise ConfigError("seeds: must be a nonempty list")
    return RunConfig(
        command=doc.get("command", "verify"),
        params=params,
        grids=dict(grids),
        seeds=[int(s) for s in seeds],
        tolerances=dict(tolerances),
        output_dir=doc.get("output_dir", "out"),
        only=doc.get("only"),
        threads=int(doc.get("threads", 0)) or _env_threads(),
    )


def _env_threads() -> int:
    try:
        return max(int(os.environ.get("LKSPIDE_THREADS", "1")), 1)
    except ValueError:
        return 1


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % float(x)


def write_csv(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_fmt(x) if not isinstance(x, str) else x for x in row) + "\n")


def write_paths_csv(path: Path, paths: smp.SamplePathSet):
    """One row per replica, columns = grid points, header = coordinates."""
    header = [_fmt(x) for x in paths.grid]
    write_csv(path, header, paths.values)


def read_paths_csv(path) -> smp.SamplePathSet:
    with open(path) as f:
        header = f.readline().strip().split(",")
        grid = np.array([float(x) for x in header])
        values = np.loadtxt(f, delimiter=",", ndmin=2)
    return smp.SamplePathSet(grid=grid, values=values, seed=-1, method="file",
                             params={"source": str(path)})


def _write_manifest(outdir: Path, command: str, args: dict, seeds):
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "command": command,
        "arguments": {k: v for k, v in sorted(args.items()) if v is not None},
        "seeds": list(seeds),
        "version": __version__,
    }
    with open(outdir / "manifest.json", "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")


def _csv_floats(text: str):
    return [float(x) for x in text.split(",") if x != ""]


def _model_from_args(a) -> ModelParams:
    if a.family == "lks":
        return ModelParams.lks(a.eps, a.theta, a.dim)
    return ModelParams.tf(a.beta, a.dim)


# ---------------------------------------------------------------- commands


def _cmd_specfun(a, outdir):
    rows = []
    if a.fn == "gamma":
        for x in _csv_floats(a.x):
            rows.append((x, gamma_fn(x)))
        header = ["x", "gamma"]
    elif a.fn == "ml":
        for x in _csv_floats(a.x):
            rows.append((a.beta, x, mittag_leffler(a.beta, x)))
        header = ["beta", "x", "E_beta"]
    elif a.fn == "ml-bounds":
        for x in _csv_floats(a.x):
            lo, up = ml_bounds(a.beta, x)
            rows.append((a.beta, x, lo, up))
        header = ["beta", "x", "lower", "upper"]
    elif a.fn == "hyp2f1":
        rows.append((a.a, a.b, a.c, a.z, hyp2F1(a.a, a.b, a.c, a.z)))
        header = ["a", "b", "c", "z", "value"]
    elif a.fn == "mills":
        for x in _csv_floats(a.x):
            rows.append((x, mills_ratio(x)))
        header = ["x", "mills"]
    else:
        raise ConfigError("unknown specfun %r" % a.fn)
    write_csv(outdir / "specfun.csv", header, rows)
    return 0


def _cmd_kernel(a, outdir):
    p = _model_from_args(a)
    rows = []
    for t in _csv_floats(a.t):
        for r in _csv_floats(a.r):
            if a.transform:
                v = lks_kernel_ft(p, t, r) if p.family == "lks" else tf_kernel_ft(p, t, r)
            else:
                v = lks_kernel(p, t, r) if p.family == "lks" else tf_kernel(p, t, r)
            rows.append((t, r, v))
    write_csv(outdir / "kernel.csv", ["t", "r", "value"], rows)
    return 0


def _sd_from_args(a) -> SpectralDensity:
    p = _model_from_args(a)
    t_fixed = a.t if a.axis == "spatial" else None
    return SpectralDensity(a.axis, a.field, p, t_fixed=t_fixed)


def _cmd_spectral(a, outdir):
    sd = _sd_from_args(a)
    if a.action == "eval":
        freqs = np.array(_csv_floats(a.freqs))
        vals = eval_sd(sd, freqs)
        write_csv(outdir / "spectral.csv", ["freq", "value"], zip(freqs, np.atleast_1d(vals)))
    elif a.action == "variogram":
        lags = np.array(_csv_floats(a.lags))
        fn = temporal_variogram if a.axis == "temporal" else spatial_variogram
        vals = fn(sd, lags)
        write_csv(outdir / "variogram.csv", ["lag", "value"], zip(lags, np.atleast_1d(vals)))
    else:
        lo, hi = _csv_floats(a.window)
        rep = fit_asymptote(sd, (lo, hi), include_log_power=a.log_power)
        write_csv(
            outdir / "asymptote.csv",
            ["exponent", "log_power", "constant", "window_lo", "window_hi", "residual"],
            [(rep.fitted_exponent, rep.fitted_log_power, rep.fitted_constant,
              rep.fit_window[0], rep.fit_window[1], rep.residual)],
        )
    return 0


def _cmd_cov(a, outdir):
    p = _model_from_args(a)

    def cfun(t, s):
        if p.family == "lks":
            return cov.lks_temporal_cov(p, t, s)
        return cov.tf_temporal_cov(p, t, s)

    if a.action == "eval":
        rows = []
        for t in _csv_floats(a.t):
            for s in _csv_floats(a.s):
                rows.append((t, s, cfun(t, s)))
        write_csv(outdir / "cov.csv", ["t", "s", "value"], rows)
    elif a.action == "matrix":
        grid = np.array(_csv_floats(a.grid_points))
        m = cov.CovMatrix.from_kernel(grid, cfun)
        header = [_fmt(x) for x in grid]
        write_csv(outdir / "cov_matrix.csv", header, m.entries)
    elif a.action == "fit":
        grid = np.array(_csv_floats(a.grid_points))
        bp, resid = cov.bifbm_fit(cfun, grid)
        write_csv(outdir / "fit.csv", ["H", "K", "scale", "residual"],
                  [(bp.H, bp.K, bp.scale, resid)])
    else:  # slnd
        sd = SpectralDensity("spatial", "base", p, t_fixed=a.t)
        cfn = cov.make_spatial_cov_fn(sd, r_max=2.0 * np.sqrt(p.dim) + 0.1)
        v0 = cfn(0.0)
        c_min = cov.slnd_check(lambda r: cfn(r) / v0, dim=p.dim, n=a.n, trials=a.trials,
                               exponent=a.exponent, phi_log=a.phi_log, seed=a.seed)
        write_csv(outdir / "slnd.csv", ["c_min", "n", "trials", "exponent", "phi_log"],
                  [(c_min, a.n, a.trials, a.exponent, int(a.phi_log))])
    return 0


_TARGETS = {
    "lks-time": ("temporal", "base", "lks"),
    "tf-time": ("temporal", "base", "tf"),
    "lks-space": ("spatial", "base", "lks"),
    "tf-space": ("spatial", "base", "tf"),
    "gradient-lks-time": ("temporal", "gradient", "lks"),
    "gradient-tf-time": ("temporal", "gradient", "tf"),
    "gradient-lks-space": ("spatial", "gradient", "lks"),
    "gradient-tf-space": ("spatial", "gradient", "tf"),
}


def _cmd_simulate(a, outdir):
    axis, fld, family = _TARGETS[a.target]
    if family == "lks":
        p = ModelParams.lks(a.eps, a.theta, a.dim)
    else:
        p = ModelParams.tf(a.beta, a.dim)
    n, span = a.grid.split(",")
    n, span = int(n), float(span)
    t_fixed = a.t if axis == "spatial" else None
    sd = SpectralDensity(axis, fld, p, t_fixed=t_fixed)
    if axis == "spatial":
        grid = np.linspace(0.0, span, n)
        paths = smp.sample_spectral_stationary(sd, grid, a.replicas, a.seed, n_freq=a.n_freq)
    elif a.method == "spectral":
        grid = np.linspace(0.0, span, n + 1)
        paths = smp.sample_spectral_stat_increments(sd, grid, a.replicas, a.seed,
                                                    n_freq=a.n_freq)
    else:
        grid = np.linspace(span / n, span, n)
        cm = smp.covariance_from_variogram(lambda h: temporal_variogram(sd, h), grid)
        paths = smp.sample_cholesky(cm, a.replicas, a.seed)
    write_paths_csv(outdir / "paths.csv", paths)
    return 0


def _cmd_moduli(a, outdir):
    paths = read_paths_csv(a.paths)
    deltas = np.array(_csv_floats(a.deltas)) if a.deltas else None
    if a.mode == "uniform":
        spec = md.ModulusSpec(H=a.H, mode="uniform", log_power=a.logpow)
        rep = md.uniform_modulus_stat(paths, spec, delta_grid=deltas)
    elif a.mode == "local":
        spec = md.ModulusSpec(H=a.H, mode="local", log_power=a.logpow,
                              loglog_power=a.loglogpow)
        t0 = a.t0 if a.t0 is not None else float(np.median(paths.grid))
        rep = md.local_modulus_stat(paths, spec, t0=t0, delta_grid=deltas)
    else:
        rep = md.chung_stat(paths, H=a.H, r_grid=deltas)
    rows = [
        (d, s, rep.plateau_estimate, rep.plateau_cv, rep.fitted_H, rep.fitted_H_stderr)
        for d, s in zip(rep.delta_grid, rep.statistic)
    ]
    write_csv(outdir / "report.csv",
              ["delta", "statistic", "plateau", "cv", "H_hat", "stderr"], rows)
    return 0


def _cmd_verify(a, outdir):
    cfg = RunConfig(seeds=[a.seed], only=a.only.split(",") if a.only else None,
                    threads=a.threads or _env_threads(), output_dir=str(outdir))
    if a.config:
        cfg = parse_config(Path(a.config).read_text())
        if a.only:
            cfg.only = a.only.split(",")
        if a.seed_global is not None:
            cfg.seeds = [a.seed_global]
    code, rows = run_verify(cfg)
    write_csv(outdir / "verify.csv",
              ["id", "target", "measured", "tolerance", "pass"],
              [(r.id, '"%s"' % r.target, r.measured, r.tolerance, r.passed) for r in rows])
    for r in rows:
        print("%-4s %-55s measured=%-12.5g tol=%-9.4g %s"
              % (r.id, r.target[:55], r.measured, r.tolerance,
                 "PASS" if r.passed else "FAIL"))
    return code


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="lkspide", description=__doc__.split("\n")[0])
    ap.add_argument("--config", help="JSON config file")
    ap.add_argument("--seed", type=int, default=None, dest="seed_global")
    ap.add_argument("--out", default=None, dest="out_global", help="output directory")
    ap.add_argument("--threads", type=int, default=0)
    sub = ap.add_subparsers(dest="cmd", required=True)

    sf = sub.add_parser("specfun")
    sfs = sf.add_subparsers(dest="action", required=True)
    ev = sfs.add_parser("eval")
    ev.add_argument("--fn", required=True, choices=["gamma", "ml", "ml-bounds", "hyp2f1", "mills"])
    ev.add_argument("--beta", type=float, default=0.5)
    ev.add_argument("--x", default="1.0")
    ev.add_argument("--a", type=float, default=1.0)
    ev.add_argument("--b", type=float, default=1.0)
    ev.add_argument("--c", type=float, default=2.0)
    ev.add_argument("--z", type=float, default=0.5)

    def model_flags(q):
        q.add_argument("--family", choices=["lks", "tf"], required=True)
        q.add_argument("--eps", type=float, default=8.0)
        q.add_argument("--theta", type=float, default=0.0)
        q.add_argument("--beta", type=float, default=0.5)
        q.add_argument("--dim", type=int, default=1)

    ke = sub.add_parser("kernel")
    kes = ke.add_subparsers(dest="action", required=True)
    kev = kes.add_parser("eval")
    model_flags(kev)
    kev.add_argument("--t", default="1.0")
    kev.add_argument("--r", default="0.0")
    kev.add_argument("--transform", action="store_true", help="emit the FT instead")

    sp_ = sub.add_parser("spectral")
    sps = sp_.add_subparsers(dest="action", required=True)
    for name in ("eval", "variogram", "asymptote"):
        q = sps.add_parser(name)
        model_flags(q)
        q.add_argument("--axis", choices=["temporal", "spatial"], required=True)
        q.add_argument("--field", choices=["base", "gradient"], default="base")
        q.add_argument("--t", type=float, default=1.0)
        if name == "eval":
            q.add_argument("--freqs", default="1.0")
        elif name == "variogram":
            q.add_argument("--lags", default="0.1")
        else:
            q.add_argument("--window", default="1e3,1e7")
            q.add_argument("--log-power", dest="log_power", action="store_true")

    cv_ = sub.add_parser("cov")
    cvs = cv_.add_subparsers(dest="action", required=True)
    for name in ("eval", "matrix", "fit", "slnd"):
        q = cvs.add_parser(name)
        model_flags(q)
        if name == "eval":
            q.add_argument("--t", default="1.0")
            q.add_argument("--s", default="0.5")
        elif name in ("matrix", "fit"):
            q.add_argument("--grid-points", default=",".join(
                _fmt(x) for x in np.linspace(0.05, 1.0, 20)))
        else:
            q.add_argument("--t", type=float, default=1.0)
            q.add_argument("--n", type=int, default=8)
            q.add_argument("--trials", type=int, default=100)
            q.add_argument("--exponent", type=float, default=1.0)
            q.add_argument("--phi-log", dest="phi_log", action="store_true")
            q.add_argument("--seed", type=int, default=2026)

    sm = sub.add_parser("simulate")
    sm.add_argument("--target", required=True, choices=sorted(_TARGETS))
    sm.add_argument("--method", choices=["cholesky", "spectral"], default="cholesky")
    sm.add_argument("--grid", default="1024,1.0", help="N,SPAN")
    sm.add_argument("--replicas", type=int, default=64)
    sm.add_argument("--seed", type=int, default=2026)
    sm.add_argument("--n-freq", dest="n_freq", type=int, default=2**13)
    sm.add_argument("--eps", type=float, default=8.0)
    sm.add_argument("--theta", type=float, default=0.0)
    sm.add_argument("--beta", type=float, default=0.5)
    sm.add_argument("--dim", type=int, default=1)
    sm.add_argument("--t", type=float, default=1.0)
    sm.add_argument("--out", default=None)

    mo = sub.add_parser("moduli")
    mo.add_argument("--paths", required=True)
    mo.add_argument("--mode", choices=["uniform", "local", "chung"], required=True)
    mo.add_argument("--H", type=float, required=True)
    mo.add_argument("--logpow", type=float, default=0.0)
    mo.add_argument("--loglogpow", type=float, default=0.0)
    mo.add_argument("--deltas", default=None)
    mo.add_argument("--t0", type=float, default=None)
    mo.add_argument("--out", default=None)

    vf = sub.add_parser("verify")
    vf.add_argument("--only", default=None, help="comma-separated criterion ids")

    a = ap.parse_args(argv)
    outdir = Path(getattr(a, "out", None) or a.out_global or "out")
    if getattr(a, "seed", None) is None:
        a.seed = a.seed_global if a.seed_global is not None else 2026
    _write_manifest(outdir, a.cmd, {k: v for k, v in vars(a).items() if k != "cmd"},
                    [a.seed])
    try:
        if a.cmd == "specfun":
            return _cmd_specfun(a, outdir)
        if a.cmd == "kernel":
            return _cmd_kernel(a, outdir)
        if a.cmd == "spectral":
            return _cmd_spectral(a, outdir)
        if a.cmd == "cov":
            return _cmd_cov(a, outdir)
        if a.cmd == "simulate":
            return _cmd_simulate(a, outdir)
        if a.cmd == "moduli":
            return _cmd_moduli(a, outdir)
        if a.cmd == "verify":
            return _cmd_verify(a, outdir)
        raise ConfigError("unknown command %r" % a.cmd)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
