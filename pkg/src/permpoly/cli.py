"""Command-line front end: ``permpoly {verify, estimate, roots, asymptotics}``.

Exit codes: 0 success, 1 failed check or I/O error, 2 usage or config error.
Complex numbers are written ``re,im`` on the command line and ``[re, im]``
in JSON config files.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import closed_forms as cf
from ._sampling import resolve_seed
from .ensembles import KINDS, EnsembleSpec, Potential
from .errors import PermPolyError, SizeError, UsageError
from .montecarlo import mc_mean_perm_poly, mc_two_point
from .roots import DEFAULT_GRIDS, GridSpec, cloud_statistics, density_histogram, marginal, root_cloud

CONFIG_KEYS = {
    "command", "suite", "quantity", "ensemble", "potential", "n", "N", "samples", "seed",
    "mu", "out", "format", "workers", "grid", "marginal",
}
ASYMPTOTIC_KINDS = ("GUE", "GOE", "CUE", "CUE-char", "Ginibre")
ASYMPTOTIC_CLAMP = 1e3
DEFAULT_ESTIMATE_SAMPLES = 100000
DEFAULT_ROOT_SAMPLES = 200


# ------------------------------------------------------------------ parsing


def parse_complex(text):
    """``"re,im"`` or ``"re"`` to complex; raises UsageError otherwise."""
    parts = str(text).split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise UsageError(f"invalid complex value {text!r}; expected 're,im'")


def parse_grid(text):
    parts = str(text).split(",")
    if len(parts) != 6:
        raise UsageError(f"invalid grid {text!r}; expected 'x0,x1,y0,y1,nx,ny'")
    try:
        x0, x1, y0, y1 = (float(p) for p in parts[:4])
        nx, ny = int(parts[4]), int(parts[5])
    except ValueError as exc:
        raise UsageError(f"invalid grid {text!r}: {exc}") from None
    if not (x1 > x0 and y1 > y0 and nx >= 1 and ny >= 1):
        raise UsageError(f"grid {text!r} must have x1 > x0, y1 > y0 and positive bin counts")
    return GridSpec(x0, x1, y0, y1, nx, ny)


def _complex_from_json(v):
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, (int, float)):
        return complex(v)
    raise UsageError(f"complex values in config must be [re, im], got {v!r}")


def load_config(path):
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    unknown = set(data) - CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return data


def _merge(args, config):
    """Flags override config values; returns a plain dict of settings."""
    out = dict(config)
    for key in ("suite", "quantity", "ensemble", "potential", "n", "N", "samples", "seed",
                "out", "format", "workers", "grid", "marginal"):
        v = getattr(args, key, None)
        if v is not None:
            out[key] = v
    if getattr(args, "mu", None):
        out["mu"] = [parse_complex(m) for m in args.mu]
    elif "mu" in out:
        out["mu"] = [_complex_from_json(m) for m in out["mu"]]
    return out


def _ensemble(settings, require=True):
    ens = settings.get("ensemble")
    if ens is None:
        if require:
            raise UsageError("--ensemble is required")
        return None
    if isinstance(ens, dict):
        try:
            return EnsembleSpec.from_dict(ens)
        except (KeyError, ValueError) as exc:
            raise UsageError(f"invalid ensemble: {exc}") from None
    n = settings.get("n")
    if n is None:
        raise UsageError("--n is required")
    pot = settings.get("potential")
    if pot is not None and not isinstance(pot, Potential):
        coeffs = pot if isinstance(pot, (list, tuple)) else [float(c) for c in str(pot).split(",")]
        pot = Potential(tuple(coeffs))
    try:
        return EnsembleSpec(ens, int(n), pot)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _write(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)


def _cjson(z):
    return {"re": float(z.real), "im": float(z.imag)}


# ----------------------------------------------------------------- commands


def cmd_verify(settings):
    from .verify import SUITES, run_suite

    suite = settings.get("suite")
    if suite not in SUITES + ("all",):
        raise UsageError(f"unknown suite {suite!r}; expected one of {SUITES + ('all',)}")
    seed = resolve_seed(settings.get("seed"))
    checks = run_suite(suite, seed=seed, n=settings.get("n"), N=settings.get("N"),
                       samples=settings.get("samples"), workers=settings.get("workers") or 1)
    passed = all(c.passed for c in checks)
    report = {"suite": suite, "seed": seed, "passed": passed, "checks": [c.to_dict() for c in checks]}
    if settings.get("format") == "json":
        _write(json.dumps(report, indent=2) + "\n", None)
    else:
        for c in checks:
            print(c.line())
        print(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed")
    if settings.get("out"):
        _write(json.dumps(report, indent=2) + "\n", settings["out"])
    return 0 if passed else 1


def _mean_oracle(spec, mu):
    if spec.kind == "GUE":
        return complex(cf.mean_perm_poly_gue(spec.n, mu)), "mean_perm_poly_gue"
    if spec.kind == "GOE":
        return complex(cf.mean_perm_poly_goe(spec.n, mu)), "mean_perm_poly_goe"
    if spec.kind == "UnitaryInvariant" and spec.n <= cf.gaussian.GENERAL_MEAN_MAX_N:
        return complex(cf.mean_perm_poly_general(spec.potential, spec.n)(mu)), "mean_perm_poly_general"
    return None, None


def _two_point_oracle(spec, mu1, mu2):
    n = spec.n
    if spec.kind == "GUE":
        if abs(mu1 + mu2) <= 1e-12 * max(1.0, abs(mu1)):
            return cf.two_point_gue(n, mu1, mu2, confluent=True), "two_point_gue"
        return cf.two_point_gue(n, mu1, mu2), "two_point_gue"
    if spec.kind == "GOE" and n <= cf.gaussian.GOE_MOMENTS_MAX_N:
        return cf.two_point_goe(n, mu1, mu2), "two_point_goe"
    if spec.kind == "CUE":
        return cf.two_point_cue(n, mu1, mu2), "two_point_cue"
    if spec.kind == "Ginibre":
        return cf.two_point_ginibre(n, mu1, mu2), "two_point_ginibre"
    return None, None


def cmd_estimate(settings):
    quantity = settings.get("quantity")
    if quantity not in ("mean-poly", "two-point"):
        raise UsageError(f"unknown quantity {quantity!r}; expected mean-poly or two-point")
    spec = _ensemble(settings)
    mus = settings.get("mu") or []
    need = 1 if quantity == "mean-poly" else 2
    if len(mus) != need:
        raise UsageError(f"{quantity} needs exactly {need} --mu value(s), got {len(mus)}")
    m = int(settings.get("samples") or DEFAULT_ESTIMATE_SAMPLES)
    seed = resolve_seed(settings.get("seed"))
    workers = int(settings.get("workers") or 1)
    start = time.perf_counter()
    if quantity == "mean-poly":
        est = mc_mean_perm_poly(spec, m, seed, workers).at(mus[0])
        oracle, source = _mean_oracle(spec, mus[0])
    else:
        conj = None if spec.hermitian else True
        est = mc_two_point(spec, mus[0], mus[1], m, seed, conjugate_second=conj, workers=workers)
        oracle, source = _two_point_oracle(spec, mus[0], mus[1])
    elapsed = time.perf_counter() - start
    result = {
        "quantity": quantity,
        "ensemble": spec.to_dict(),
        "n": spec.n,
        "mu": [[m_.real, m_.imag] for m_ in mus],
        "estimate": _cjson(est.mean),
        "stderr": _cjson(est.stderr),
        "oracle": None if oracle is None else {**_cjson(complex(oracle)), "source": source},
        "z": None if oracle is None else float(est.z_score(oracle)),
        "samples": est.n_samples,
        "seed": seed,
        "elapsed_s": elapsed,
    }
    if settings.get("format") == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["quantity", "ensemble", "n", "mu", "estimate_re", "estimate_im", "stderr_re", "stderr_im",
                    "oracle_re", "oracle_im", "z", "samples", "seed", "elapsed_s"])
        w.writerow([quantity, spec.kind, spec.n, ";".join(f"{m_.real},{m_.imag}" for m_ in mus),
                    est.mean.real, est.mean.imag, est.stderr.real, est.stderr.imag,
                    "" if oracle is None else complex(oracle).real, "" if oracle is None else complex(oracle).imag,
                    "" if result["z"] is None else result["z"], est.n_samples, seed, elapsed])
        text = buf.getvalue()
    else:
        text = json.dumps(result, indent=2) + "\n"
    _write(text, settings.get("out"))
    return 0


def cmd_roots(settings):
    spec = _ensemble(settings)
    out = settings.get("out")
    if not out:
        raise UsageError("roots needs --out PATH for the histogram CSV")
    grid = settings.get("grid")
    grid = parse_grid(grid) if isinstance(grid, str) else (GridSpec(*grid) if grid else DEFAULT_GRIDS[spec.kind])
    m = int(settings.get("samples") or DEFAULT_ROOT_SAMPLES)
    seed = resolve_seed(settings.get("seed"))
    workers = int(settings.get("workers") or 1)
    axes = settings.get("marginal") or ["im"]
    if isinstance(axes, str):
        axes = [axes]
    for ax in axes:
        if ax not in ("re", "im"):
            raise UsageError(f"marginal axis must be 're' or 'im', got {ax!r}")
    # size caps surface here, before any sampling
    cloud = root_cloud(spec, m, seed, workers)
    hist = density_histogram(cloud, grid)
    out = Path(out)
    _write(hist.to_csv(), out)
    stem = out.with_suffix("")
    marg_paths = {}
    for ax in axes:
        lo, hi, bins = (grid.y0, grid.y1, grid.ny) if ax == "im" else (grid.x0, grid.x1, grid.nx)
        path = Path(f"{stem}.marginal_{ax}.csv")
        _write(marginal(cloud, ax, lo, hi, bins).to_csv(), path)
        marg_paths[ax] = str(path)
    stats = cloud_statistics(cloud, grid)
    summary = {
        "ensemble": spec.to_dict(),
        "samples": m,
        "seed": seed,
        "grid": [grid.x0, grid.x1, grid.y0, grid.y1, grid.nx, grid.ny],
        "histogram": str(out),
        "marginals": marg_paths,
        "report": stats,
    }
    _write(json.dumps(summary, indent=2) + "\n", Path(f"{stem}.summary.json"))
    return 0


def cmd_asymptotics(settings):
    kind = settings.get("ensemble")
    if isinstance(kind, dict):
        kind = kind.get("kind")
    match = [k for k in ASYMPTOTIC_KINDS if str(kind).lower() == k.lower()]
    if not match:
        raise UsageError(f"asymptotics needs --ensemble in {ASYMPTOTIC_KINDS}")
    kind = match[0]
    grid = settings.get("grid")
    if grid is None:
        grid = DEFAULT_GRIDS["CUE" if kind == "CUE-char" else kind]
    elif isinstance(grid, str):
        grid = parse_grid(grid)
    else:
        grid = GridSpec(*grid)
    clamp = ASYMPTOTIC_CLAMP
    if max(abs(grid.x0), abs(grid.x1), abs(grid.y0), abs(grid.y1)) > clamp:
        print(f"warning: grid clamped to |coordinate| <= {clamp:g}", file=sys.stderr)
    xs = np.clip(np.linspace(grid.x0, grid.x1, grid.nx), -clamp, clamp)
    ys = np.clip(np.linspace(grid.y0, grid.y1, grid.ny), -clamp, clamp)
    z = xs[:, None] + 1j * ys[None, :]
    phi = cf.asymptotic_phi(kind, z) if kind in cf.PHI_KINDS else None
    dens = cf.density_oracle(kind, z) if kind in cf.DENSITY_KINDS else None
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["re", "im", "phi", "density"])
    for i in range(grid.nx):
        for j in range(grid.ny):
            w.writerow([repr(float(xs[i])), repr(float(ys[j])),
                        "" if phi is None else repr(float(phi[i, j])),
                        "" if dens is None else repr(float(dens[i, j]))])
    _write(buf.getvalue(), settings.get("out"))
    return 0


# -------------------------------------------------------------------- main


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ensemble", help=f"one of {KINDS} (asymptotics also accepts CUE-char)")
    common.add_argument("--potential", help="comma-separated ascending coefficients of V (UnitaryInvariant)")
    common.add_argument("--n", type=int, help="matrix size (or correlation order for duality)")
    common.add_argument("--N", type=int, help="matrix size for the duality suite")
    common.add_argument("--samples", type=int, help="Monte-Carlo sample count")
    common.add_argument("--seed", type=int, help="RNG seed (falls back to $PERMPOLY_SEED, then 0)")
    common.add_argument("--mu", action="append", help="complex point 're,im'; repeat for several")
    common.add_argument("--out", help="output path ('-' for stdout)")
    common.add_argument("--format", choices=("csv", "json", "text"), help="output format")
    common.add_argument("--workers", type=int, help="worker processes; never changes the numbers")
    common.add_argument("--config", help="JSON config file; flags override its values")
    common.add_argument("--grid", help="'x0,x1,y0,y1,nx,ny'")
    common.add_argument("--marginal", action="append", choices=("re", "im"), help="marginal axis for roots")

    parser = argparse.ArgumentParser(prog="permpoly", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", nargs="?", help="exact | gue | goe | cue | ginibre | group-integrals | duality | all")
    p = sub.add_parser("estimate", parents=[common], help="Monte-Carlo estimate with oracle comparison")
    p.add_argument("quantity", nargs="?", help="mean-poly | two-point")
    sub.add_parser("roots", parents=[common], help="permanental-root histograms and summary")
    sub.add_parser("asymptotics", parents=[common], help="limiting potential and density on a grid")
    return parser


COMMANDS = {"verify": cmd_verify, "estimate": cmd_estimate, "roots": cmd_roots, "asymptotics": cmd_asymptotics}


def _glue_values(argv):
    # argparse reads "-0.1,0.5" as an option; glue such values to their flag
    out, it = [], iter(argv)
    for tok in it:
        if tok in ("--mu", "--grid", "--potential"):
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None):
    parser = build_parser()
    argv = _glue_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        config = load_config(args.config) if args.config else {}
        if "command" in config and config["command"] != args.command:
            raise UsageError(f"config is for command {config['command']!r}, not {args.command!r}")
        settings = _merge(args, config)
        return COMMANDS[args.command](settings)
    except (UsageError, SizeError) as exc:
        print(f"permpoly: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError, KeyError) as exc:
        print(f"permpoly: error: {exc}", file=sys.stderr)
        return 2
    except PermPolyError as exc:
        print(f"permpoly: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"permpoly: I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
