"""Command-line entry point.

Exit codes: 0 success, 1 computation could not finish (no admissible q1,
scan window exhausted, enumeration budget), 2 invalid input, 3 a check
inside ``amplifier verify`` or ``selftest`` failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from importlib import metadata
from typing import Sequence

from .config import ConfigError, RunConfig

log = logging.getLogger("spherical_hecke")

EXIT_OK, EXIT_COMPUTE, EXIT_USAGE, EXIT_CHECK = 0, 1, 2, 3


class UsageError(ValueError):
    pass


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _labels(text: str) -> list[tuple[int, ...]]:
    return [_ints(part) for part in text.split(";") if part.strip()]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file merged over the defaults")
    common.add_argument("--out", help="write the artifact here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), help="output format")
    common.add_argument("--cache-dir", help="cache directory (overrides the environment)")
    common.add_argument("--no-cache", action="store_true", help="neither read nor write the cache")
    common.add_argument("--budget", type=int, help="enumeration height budget")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="python -m spherical_hecke", description="Spherical Hecke algebra computations for SL_n(Q_p).")
    parser.add_argument("--version", action="version", version=_version())
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_sat = sub.add_parser("satake", parents=[common], help="Satake transform of a double-coset indicator")
    p_sat.add_argument("--n", type=int)
    p_sat.add_argument("--p", type=int, required=True)
    p_sat.add_argument("--lambda", dest="lam", type=_ints, required=True, help="dominant label, e.g. 1,-1")

    p_conv = sub.add_parser("convolve", parents=[common], help="structure constants chi_lam * chi_mu")
    p_conv.add_argument("--n", type=int)
    p_conv.add_argument("--p", type=int, required=True)
    p_conv.add_argument("--lambda", dest="lam", type=_ints, required=True)
    p_conv.add_argument("--mu", type=_ints, required=True)

    p_sph = sub.add_parser("spherical", parents=[common], help="spherical values at one parameter")
    p_sph.add_argument("--p", type=int, required=True)
    p_sph.add_argument("--theta", type=_floats, required=True)
    p_sph.add_argument("--labels", type=_labels, required=True, help="labels separated by ';'")

    p_pl = sub.add_parser("plancherel", parents=[common], help="density table or a Plancherel pairing")
    p_pl.add_argument("--n", type=int, required=True)
    p_pl.add_argument("--p", type=int, required=True)
    p_pl.add_argument("--resolution", type=int)
    p_pl.add_argument("--lambda", dest="lam", type=_ints)
    p_pl.add_argument("--mu", type=_ints)

    p_amp = sub.add_parser("amplifier", help="amplifier kernels")
    amp_sub = p_amp.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p_build = amp_sub.add_parser("build", parents=[common])
    p_build.add_argument("--n", type=int, required=True)
    p_build.add_argument("--p", type=int, required=True)
    p_build.add_argument("--L", type=int)
    p_build.add_argument("--N", type=int, required=True)
    p_build.add_argument("--theta", type=_floats, required=True)
    p_build.add_argument("--epsilon", type=float)
    p_verify = amp_sub.add_parser("verify", parents=[common])
    p_verify.add_argument("--kernel", required=True)
    p_verify.add_argument("--grid", type=int)
    p_verify.add_argument("--samples", type=int, default=16)

    p_kr = sub.add_parser("kronecker", help="simultaneous approximation")
    kr_sub = p_kr.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p_apx = kr_sub.add_parser("approx", parents=[common])
    p_apx.add_argument("--alpha", type=_floats, required=True)
    p_apx.add_argument("--eps", type=float, required=True)
    p_apx.add_argument("--N", type=int, required=True)
    p_def = kr_sub.add_parser("defect", parents=[common])
    p_def.add_argument("--alpha", type=_floats, required=True)
    p_def.add_argument("--N", type=int, required=True)
    p_def.add_argument("--K", type=int, required=True)

    p_self = sub.add_parser("selftest", parents=[common], help="run the acceptance suite")
    p_self.add_argument("--n", type=int, default=2)
    p_self.add_argument("--p", type=int, default=2)
    p_self.add_argument("--full", action="store_true", help="all parameter sets, not only n=2, p=2")
    return parser


def _config(args) -> RunConfig:
    base = RunConfig.from_file(args.config) if getattr(args, "config", None) else RunConfig()
    changes = {}
    for flag, name in (("n", "n"), ("p", "p"), ("resolution", "resolution"), ("grid", "resolution"),
                       ("L", "L"), ("epsilon", "epsilon"), ("budget", "height_budget"),
                       ("cache_dir", "cache_dir"), ("format", "output")):
        value = getattr(args, flag, None)
        if value is not None:
            changes[name] = value
    lam = getattr(args, "lam", None)
    if lam is not None and "n" not in changes:
        changes["n"] = len(lam)
    if "L" in changes and changes["L"] > base.L_max:
        changes["L_max"] = changes["L"]
    return base.replace(**changes)


def _emit(args, cfg: RunConfig, result, csv_text: str | None = None) -> None:
    if cfg.output == "csv":
        if csv_text is None:
            raise UsageError(f"{args.command} has no CSV form")
        header = f"# version={_version()} config={json.dumps(cfg.to_json(), sort_keys=True)}\n"
        text = header + csv_text
    else:
        text = json.dumps({"version": _version(), "config": cfg.to_json(), "result": result}, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cache(args, cfg: RunConfig):
    from .cache import Cache

    return None if args.no_cache else Cache(cfg.cache_dir)


def _cmd_satake(args, cfg):
    from .cache import cached_satake
    from .satake import torus_to_json

    if args.n is not None and args.n != len(args.lam):
        raise UsageError(f"--lambda has {len(args.lam)} coordinates but --n is {args.n}")
    f = cached_satake(args.lam, args.p, _cache(args, cfg), cfg.height_budget)
    _emit(args, cfg, torus_to_json(f, args.p))


def _cmd_convolve(args, cfg):
    from .cache import cached_convolve

    if len(args.lam) != len(args.mu):
        raise UsageError("--lambda and --mu have different ranks")
    if args.n is not None and args.n != len(args.lam):
        raise UsageError(f"--lambda has {len(args.lam)} coordinates but --n is {args.n}")
    table = cached_convolve(args.lam, args.mu, args.p, _cache(args, cfg), cfg.height_budget)
    result = {
        "lambda": list(args.lam),
        "mu": list(args.mu),
        "terms": [{"nu": list(nu), "coeff": int(c)} for nu, c in table.items()],
    }
    _emit(args, cfg, result)


def _cmd_spherical(args, cfg):
    from .spectral import SpectralParameter, spherical_csv, spherical_value

    s = SpectralParameter.from_theta(args.theta)
    for t0 in args.labels:
        if len(t0) != s.n:
            raise UsageError(f"label {t0} does not match theta of length {s.n - 1}")
    values = []
    for t0 in args.labels:
        v = spherical_value(s, t0, args.p)
        values.append({"t0": list(t0), "re": v.real, "im": v.imag})
    csv_text = spherical_csv(s, args.labels, args.p) if cfg.output == "csv" else None
    _emit(args, cfg, {"theta": list(args.theta), "values": values}, csv_text)


def _cmd_plancherel(args, cfg):
    from .cartan import coset_count
    from .satake import satake_chi
    from .spectral import QuadratureGrid, density_csv, plancherel_pair

    grid = QuadratureGrid(args.n, cfg.resolution)
    if args.lam is None:
        if cfg.output != "csv":
            raise UsageError("without --lambda the density table needs --format csv")
        _emit(args, cfg, None, density_csv(grid, args.p))
        return
    mu = args.mu or args.lam
    if len(args.lam) != args.n or len(mu) != args.n:
        raise UsageError("labels must have n coordinates")
    f = satake_chi(args.lam, args.p, cfg.height_budget)
    g = satake_chi(mu, args.p, cfg.height_budget)
    val = plancherel_pair(f, g, grid, args.p)
    result = {"lambda": list(args.lam), "mu": list(mu), "re": val.real, "im": val.imag,
              "exact": coset_count(args.lam, args.p, cfg.height_budget) if tuple(mu) == tuple(args.lam) else 0}
    _emit(args, cfg, result)


def _cmd_amplifier(args, cfg):
    from .amplifier import AmplifierKernel, build_kernel, verify_kernel
    from .spectral import QuadratureGrid, SpectralParameter

    if args.action == "build":
        if len(args.theta) != args.n - 1:
            raise UsageError(f"--theta needs {args.n - 1} values for n={args.n}")
        s = SpectralParameter.from_theta(args.theta)
        kernel = build_kernel(cfg.L, args.N, s, cfg.epsilon, args.p, cfg.L_max, cfg.q1_window)
        _emit(args, cfg, kernel.to_json())
        return
    try:
        with open(args.kernel) as fh:
            data = json.load(fh)
        data = data.get("result", data)
        kernel = AmplifierKernel.from_json(data)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read kernel file: {exc}") from exc
    grid = QuadratureGrid(kernel.n, cfg.resolution)
    report = verify_kernel(kernel, grid, args.samples, cfg.quadrature_tol, cfg.positivity_slack)
    _emit(args, cfg, report.to_json())
    return EXIT_OK if report.ok else EXIT_CHECK


def _cmd_kronecker(args, cfg):
    from .kronecker import equidistribution_defect, simultaneous_approx

    if args.action == "approx":
        if not 0 < args.eps <= 0.5 or args.N < 1:
            raise UsageError("need 0 < eps <= 1/2 and N >= 1")
        _emit(args, cfg, simultaneous_approx(args.alpha, args.eps, args.N).to_json())
    else:
        if args.K < 1 or args.N < 1:
            raise UsageError("need N, K >= 1")
        _emit(args, cfg, {"defect": equidistribution_defect(args.alpha, args.N, args.K)})


def _cmd_selftest(args, cfg):
    from . import acceptance

    if (args.n, args.p) != (2, 2) and not args.full:
        raise UsageError("the quick self-test runs at n=2, p=2; use --full for every parameter set")
    results = acceptance.run_all(restrict=not args.full, echo=lambda line: print(line, file=sys.stderr))
    summary = {
        "passed": sum(r.passed for r in results),
        "total": len(results),
        "criteria": [{"number": r.number, "title": r.title, "pass": r.passed, "detail": r.detail,
                      "seconds": round(r.seconds, 3)} for r in results],
    }
    _emit(args, cfg, summary)
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK


COMMANDS = {
    "satake": _cmd_satake,
    "convolve": _cmd_convolve,
    "spherical": _cmd_spherical,
    "plancherel": _cmd_plancherel,
    "amplifier": _cmd_amplifier,
    "kronecker": _cmd_kronecker,
    "selftest": _cmd_selftest,
}


def run_command(argv: Sequence[str] | None = None) -> int:
    from .amplifier import AmplifierError, NoAdmissibleQ1
    from .cartan import BudgetExceeded
    from .kronecker import WindowExhausted

    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        code = COMMANDS[args.command](args, cfg)
        return EXIT_OK if code is None else code
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NoAdmissibleQ1, WindowExhausted, BudgetExceeded, AmplifierError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


def main() -> None:
    sys.exit(run_command())
