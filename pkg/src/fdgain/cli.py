"""Command-line front end.

Subcommands ``sweep-rho``, ``sweep-ratio``, ``experiment`` and ``verify``.
Settings are resolved with increasing precedence from built-in defaults,
the ``FDGAIN_SEED`` environment variable (seed only), a flat ``key = value``
config file (``--config``), ``--set key=value`` overrides and finally
explicit flags.

Exit codes: 0 success, 1 invalid input, 2 a verification failed.
"""
import argparse
import csv
import io
import logging
import os
import sys

import numpy as np

from .analysis import verify_theorem1, verify_trace_inverse_gradient
from .exceptions import FdgainError
from .montecarlo import TRIAL_COLUMNS, ExperimentConfig, run_experiment, sweep_rho, sweep_ratio
from .pilot import PilotBlock, is_optimal, mse_k, optimal_mse_k, qam16_example_pilot

log = logging.getLogger("fdgain")

SEED_ENV = "FDGAIN_SEED"

DEFAULTS = {
    "N": "64",
    "L": "16",
    "NP": "2",
    "PS": "1",
    "PD": "1",
    "sigma2": "1",
    "model": "exponential",
    "rho": "0",
    "trials": "20000",
    "seed": "0",
    "jobs": "1",
    "rho_steps": "101",
    "rho_min": "0",
    "rho_max": "1",
    "ratios": "2,4,8,16,32,64",
    "n": "4",
}

ALIASES = {"N_P": "NP", "P_S": "PS", "P_D": "PD", "sigma_2": "sigma2", "sigma": "sigma2"}


class UsageError(Exception):
    pass


class VerificationFailed(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def read_config(path):
    """Parse a flat ``key = value`` file. ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value, got {raw.rstrip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            out[_canonical(key)] = value
    return out


def _canonical(key):
    key = key.strip().replace("-", "_")
    return ALIASES.get(key, key)


def _parse_overrides(items):
    out = {}
    for item in items or ():
        if "=" not in item:
            raise UsageError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        out[_canonical(key)] = value.strip()
    return out


def _resolve(args):
    settings = dict(DEFAULTS)
    if os.environ.get(SEED_ENV):
        settings["seed"] = os.environ[SEED_ENV]
    if getattr(args, "config", None):
        try:
            settings.update(read_config(args.config))
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc.strerror}") from None
    settings.update(_parse_overrides(getattr(args, "set", None)))
    for key, value in vars(args).items():
        if key not in ("command", "config", "set"):
            settings[key] = value
    return settings


def _int(settings, key):
    try:
        return int(settings[key])
    except (TypeError, ValueError):
        raise UsageError(f"{key} must be an integer, got {settings[key]!r}") from None


def _float(settings, key):
    try:
        return float(settings[key])
    except (TypeError, ValueError):
        raise UsageError(f"{key} must be a number, got {settings[key]!r}") from None


def _list(settings, key, cast):
    value = settings[key]
    if isinstance(value, (list, tuple)):
        value = ",".join(str(v) for v in value)
    try:
        return [cast(v) for v in str(value).replace(" ", "").split(",") if v]
    except ValueError:
        raise UsageError(f"{key} must be a comma-separated list, got {value!r}") from None


def _config(settings, **changes):
    base = dict(
        N=_list(settings, "N", int)[0],
        L=_int(settings, "L"),
        N_P=_int(settings, "NP"),
        P_S=_float(settings, "PS"),
        P_D=_float(settings, "PD"),
        sigma2=_float(settings, "sigma2"),
        model=str(settings["model"]),
        rho=_list(settings, "rho", float)[0],
        trials=_int(settings, "trials"),
        seed=_int(settings, "seed"),
    )
    base.update(changes)
    return ExperimentConfig(**base)


def format_value(value):
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    return str(value)


def write_csv(rows, columns, path):
    """Write rows with fixed formatting; ``path=None`` writes to stdout."""
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row[c]) for c in columns])
    text = buf.getvalue()
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _say(settings, text):
    """Human-readable output goes to stderr when the CSV itself is on stdout."""
    stream = sys.stderr if settings.get("out") in (None, "-") else sys.stdout
    print(text, file=stream)


def cmd_sweep_rho(settings):
    steps = _int(settings, "rho_steps")
    if steps < 2:
        raise UsageError("rho_steps must be >= 2")
    grid = np.linspace(_float(settings, "rho_min"), _float(settings, "rho_max"), steps)
    empirical = bool(settings.get("empirical"))
    jobs = _int(settings, "jobs")
    rows = []
    for N in _list(settings, "N", int):
        rows += sweep_rho(_config(settings, N=N), grid, analytic_only=not empirical, n_jobs=jobs)
    columns = ["rho", "inv_gamma", "upper", "lower", "N", "L"]
    if empirical:
        columns += ["empirical_inv_gamma", "sum_mse_fdls", "sum_mse_dft"]
    write_csv(rows, columns, settings.get("out"))
    _say(settings, f"sweep-rho: {len(rows)} rows (L={settings['L']}, N={settings['N']})")
    return 0


def cmd_sweep_ratio(settings):
    L = _int(settings, "L")
    if "N_list" in settings and settings["N_list"] is not None:
        N_list = _list(settings, "N_list", int)
    else:
        N_list = [L * r for r in _list(settings, "ratios", int)]
    rows = []
    for rho in _list(settings, "rho", float):
        rows += sweep_ratio(_config(settings, N=max(N_list + [L])), N_list, rho)
    columns = ["N", "L", "log2_ratio", "inv_gamma", "upper", "lower", "rho"]
    write_csv(rows, columns, settings.get("out"))
    _say(settings, f"sweep-ratio: {len(rows)} rows (L={L})")
    return 0


def cmd_experiment(settings):
    cfg = _config(settings)
    dump = settings.get("dump_trials")
    res = run_experiment(cfg, n_jobs=_int(settings, "jobs"), keep_trials=bool(dump))
    summary = res.summary()
    if settings.get("out") is not None:
        write_csv([summary], list(summary), settings["out"])
    if dump:
        rows = [dict(zip(("trial",) + TRIAL_COLUMNS, (i, *map(float, r))))
                for i, r in enumerate(res.per_trial)]
        write_csv(rows, ["trial", *TRIAL_COLUMNS], dump)
    a = res.analytic
    lines = [
        f"model={cfg.model} rho={cfg.rho:g} N={cfg.N} L={cfg.L} N_P={cfg.N_P} "
        f"trials={cfg.trials} seed={cfg.seed}",
        f"SumMSE FD-LS : empirical {res.sum_mse_fdls:.6g} +/- {res.sum_mse_fdls_se:.3g}"
        f"   analytic {a.sum_mse_fdls:.6g}",
        f"SumMSE DFT   : empirical {res.sum_mse_dft:.6g} +/- {res.sum_mse_dft_se:.3g}"
        f"   analytic {a.sum_mse_dft:.6g}",
        f"gamma        : empirical {res.empirical_gamma:.6g}   analytic {a.gamma:.6g}"
        f"   ({a.gamma_db:.3f} dB)",
        f"1/gamma bounds: [{a.lower_bound_inv_gamma:.6g}, {a.upper_bound_inv_gamma:.6g}]",
    ]
    print("\n".join(lines))
    return 0


def cmd_verify(settings):
    which = [k for k in ("theorem1", "gradient", "pilot") if settings.get(k)]
    if settings.get("all") or not which:
        which = ["theorem1", "gradient", "pilot"]
    seed = _int(settings, "seed")
    rows = []
    if "theorem1" in which:
        N, L = _list(settings, "N", int)[0], _int(settings, "L")
        rep = verify_theorem1(_int(settings, "trials"), N, L, rng=seed)
        rows.append({"check": "theorem1", "passed": rep.passed, "trials": rep.trials,
                     "failures": len(rep.violations),
                     "metric": min(rep.min_lower_margin, rep.min_upper_margin)})
        for v in rep.violations[:10]:
            print(f"theorem1 violation: trial {v.trial} seed {v.seed} {v.kind}: {v.detail}",
                  file=sys.stderr)
    if "gradient" in which:
        trials = min(_int(settings, "trials"), 1000)
        rep = verify_trace_inverse_gradient(trials, _int(settings, "n"), rng=seed)
        rows.append({"check": "gradient", "passed": rep.passed, "trials": rep.trials,
                     "failures": int(not rep.passed), "metric": rep.max_rel_error})
    if "pilot" in which:
        rows.append(_pilot_check(settings, seed))
    columns = ["check", "passed", "trials", "failures", "metric"]
    if settings.get("out") is not None:
        write_csv(rows, columns, settings["out"])
    for row in rows:
        status = "PASS" if row["passed"] else "FAIL"
        print(f"{status} {row['check']}: trials={row['trials']} "
              f"failures={row['failures']} metric={row['metric']:.3g}")
    if not all(row["passed"] for row in rows):
        raise VerificationFailed("one or more verification checks failed")
    return 0


def _pilot_check(settings, seed):
    """Random search: no trace-normalized pilot beats the orthogonal optimum."""
    N_P, P_S, P_D = _int(settings, "NP"), _float(settings, "PS"), _float(settings, "PD")
    sigma2 = _float(settings, "sigma2")
    trials = _int(settings, "trials")
    rng = np.random.default_rng(seed)
    budget = N_P * (P_S + P_D)
    best = optimal_mse_k(N_P, P_S, P_D, sigma2)
    P = rng.standard_normal((trials, N_P, 2)) + 1j * rng.standard_normal((trials, N_P, 2))
    P *= np.sqrt(budget / np.sum(np.abs(P) ** 2, axis=(1, 2)))[:, None, None]
    values = np.array([mse_k(p, sigma2) for p in P])
    failures = int(np.sum(values < best - 1e-12))
    qam = PilotBlock(qam16_example_pilot(P_S, P_D)[None], P_S, P_D)
    qam_ok = bool(is_optimal(qam))
    return {"check": "pilot", "passed": failures == 0 and qam_ok, "trials": trials,
            "failures": failures + int(not qam_ok), "metric": float(values.min() - best)}


def build_parser():
    S = argparse.SUPPRESS
    parser = _Parser(prog="fdgain", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true", default=S)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
        p.add_argument("--out", default=S, help="CSV output path ('-' for stdout)")
        p.add_argument("--seed", default=S, help=f"RNG seed (default ${SEED_ENV} or 0)")
        p.add_argument("--N", dest="N", default=S, help="subcarriers (comma list for sweeps)")
        p.add_argument("--L", dest="L", default=S, help="CP length / channel taps")
        p.add_argument("--NP", "--N-P", dest="NP", default=S, help="pilot OFDM symbols")
        p.add_argument("--PS", "--P-S", dest="PS", default=S, help="source power per subcarrier")
        p.add_argument("--PD", "--P-D", dest="PD", default=S, help="destination power per subcarrier")
        p.add_argument("--sigma2", default=S, help="interference-plus-noise power")
        p.add_argument("--trials", default=S)
        p.add_argument("--jobs", default=S, help="worker threads for Monte Carlo")

    p = sub.add_parser("sweep-rho", help="exact 1/gamma and bounds versus rho")
    common(p)
    p.add_argument("--rho-steps", dest="rho_steps", default=S)
    p.add_argument("--rho-min", dest="rho_min", default=S)
    p.add_argument("--rho-max", dest="rho_max", default=S)
    p.add_argument("--empirical", action="store_true", default=S,
                   help="add Monte Carlo columns")

    p = sub.add_parser("sweep-ratio", help="exact 1/gamma and bounds versus log2(N/L)")
    common(p)
    p.add_argument("--rho", default=S, help="correlation factor (comma list allowed)")
    p.add_argument("--ratios", default=S, help="comma list of N/L values")
    p.add_argument("--N-list", dest="N_list", default=S, help="comma list of N values")

    p = sub.add_parser("experiment", help="Monte Carlo comparison against the analytic sum-MSE")
    common(p)
    p.add_argument("--model", default=S, choices=["identity", "all-ones", "exponential"])
    p.add_argument("--rho", default=S)
    p.add_argument("--dump-trials", dest="dump_trials", default=S,
                   help="write per-trial squared errors to this CSV")

    p = sub.add_parser("verify", help="brute-force numerical checks")
    common(p)
    p.add_argument("--theorem1", action="store_true", default=S)
    p.add_argument("--gradient", action="store_true", default=S)
    p.add_argument("--pilot", action="store_true", default=S)
    p.add_argument("--all", action="store_true", default=S)
    p.add_argument("--n", dest="n", default=S, help="matrix size for the gradient check")
    return parser


COMMANDS = {
    "sweep-rho": cmd_sweep_rho,
    "sweep-ratio": cmd_sweep_ratio,
    "experiment": cmd_experiment,
    "verify": cmd_verify,
}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        settings = _resolve(args)
        logging.basicConfig(level=logging.DEBUG if settings.get("verbose") else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](settings)
    except VerificationFailed as exc:
        print(f"fdgain: {exc}", file=sys.stderr)
        return 2
    except (UsageError, FdgainError, ValueError, OSError) as exc:
        print(f"fdgain: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
