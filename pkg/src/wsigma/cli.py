"""Command-line interface: ``wsigma <command> ...`` printing JSON reports.

Exit codes: 0 on success, 1 for invalid input, 2 when a numerical identity
fails its tolerance.  Floats are written as decimal strings with 17
significant digits and keys are sorted, so identical inputs give
byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ConfigError, ValidationError, VerificationError, WSigmaError

SUITE_NAMES = ("translation", "parity", "schur", "rjfr", "kempf", "legendre")


# --------------------------------------------------------------------------
# JSON


def jsonable(obj):
    """Convert numbers and containers into stable JSON values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (float, np.floating)):
        return f"{float(obj):.17g}"
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return {"re": f"{z.real:.17g}", "im": f"{z.imag:.17g}"}
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"


# --------------------------------------------------------------------------
# configuration


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from exc
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from exc
    if v <= 0:
        raise argparse.ArgumentTypeError("value must be positive")
    return v


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not a complex number") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write JSON here instead of stdout")
    common.add_argument("--order", type=_positive_int, help="truncation order of series at infinity")
    common.add_argument("--tol", type=_positive_float, help="override the tolerance of every check")
    common.add_argument("--threads", type=_positive_int, default=1, help="worker threads for verification batches")
    common.add_argument("--no-cache", action="store_true", help="ignore and do not write the period cache")
    common.add_argument("--cache-dir", help="period cache directory (default: $WSIGMA_CACHE_DIR or ~/.cache/wsigma)")
    common.add_argument("--extension", choices=("P", "Q"), default="P", help="which admissible two-point kernel to use")

    p = argparse.ArgumentParser(prog="wsigma", description="Sigma functions of plane Weierstrass curves.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("semigroup", parents=[common], help="gaps, Young diagram and natural indices")
    s.add_argument("generators", help="comma separated generators, e.g. 5,7,11")
    for name, text in (
        ("curve", "curve data: genus, smoothness, branch points"),
        ("differentials", "first and second kind differentials and the Klein form"),
        ("periods", "homology cycles and period matrices"),
    ):
        c = sub.add_parser(name, parents=[common], help=text)
        c.add_argument("file", help="TOML or JSON curve description")
    s = sub.add_parser("sigma", parents=[common], help="evaluate sigma")
    s.add_argument("file")
    s.add_argument("--at", nargs="+", type=_complex, action="append", required=True, metavar="U", help="point u_1 ... u_g (repeatable)")
    s = sub.add_parser("verify", parents=[common], help="run identity checks")
    s.add_argument("file")
    s.add_argument("--suite", default="legendre,translation,parity", help=f"comma separated subset of {','.join(SUITE_NAMES)}")
    return p


def _cache_dir(args) -> str | None:
    if args.no_cache:
        return None
    return args.cache_dir or os.environ.get("WSIGMA_CACHE_DIR") or os.path.join(os.path.expanduser("~"), ".cache", "wsigma")


# --------------------------------------------------------------------------
# commands


def cmd_semigroup(args) -> tuple[dict, int]:
    from .semigroup import build_semigroup, semigroup_report

    try:
        gens = [int(x) for x in args.generators.replace(" ", "").split(",") if x]
    except ValueError as exc:
        raise ConfigError(f"generators must be integers: {args.generators!r}") from exc
    return semigroup_report(build_semigroup(gens)), 0


def _load(args):
    from .curve import load_curve

    return load_curve(args.file)


def cmd_curve(args) -> tuple[dict, int]:
    curve = _load(args)
    out = {"curve": curve.to_dict(), "semigroup": curve.semigroup.to_dict(), "smooth": curve.is_smooth, "cyclic": curve.is_cyclic}
    out["weight_homogeneous"] = curve.is_weight_homogeneous()
    if curve.is_cyclic and curve.is_smooth:
        out["branch_data"] = curve.branch_data().to_dict()
    return out, 0


def cmd_differentials(args) -> tuple[dict, int]:
    from .kleinforms import differential_bases

    curve = _load(args)
    B = differential_bases(curve, args.extension)
    D = B.duality()
    g = curve.genus
    ok = all(D["I_II"][i][j] == (i == j) and D["I_I"][i][j] == 0 and D["II_II"][i][j] == 0 for i in range(g) for j in range(g))
    out = {"curve": curve.to_dict(), "bases": B.to_dict(), "duality": D, "duality_exact": ok}
    return out, 0 if ok else 2


def cmd_periods(args) -> tuple[dict, int]:
    from .periods import homology_cycles, period_matrices

    curve = _load(args)
    pm = period_matrices(curve, extension=args.extension, cache_dir=_cache_dir(args))
    cycles = homology_cycles(curve)
    out = {
        "curve": curve.to_dict(),
        "cycles": cycles.to_dict(),
        "periods": pm.to_dict(),
        "symplectic_residual": pm.symplectic_residual,
        "tau_symmetry": pm.tau_symmetry,
    }
    return out, 0


def _context(args, curve):
    from .thetasigma import build_context

    return build_context(curve, args.extension, cache_dir=_cache_dir(args), order=args.order)


def cmd_sigma(args) -> tuple[dict, int]:
    curve = _load(args)
    ctx = _context(args, curve)
    values = []
    for u in args.at:
        if len(u) != curve.genus:
            raise ValidationError(f"--at needs {curve.genus} components, got {len(u)}")
        s = ctx.sigma(np.array(u, dtype=complex))
        values.append({"u": [complex(x) for x in u], "sigma": {"re": f"{s.real:.15g}", "im": f"{s.imag:.15g}"}})
    return {"context": ctx.to_dict(), "values": values}, 0


def cmd_verify(args) -> tuple[dict, int]:
    from .thetasigma import verify_suite

    names = [x.strip() for x in args.suite.split(",") if x.strip()]
    unknown = [n for n in names if n not in SUITE_NAMES]
    if unknown or not names:
        raise ConfigError(f"unknown checks {unknown}; choose from {','.join(SUITE_NAMES)}")
    curve = _load(args)
    ctx = _context(args, curve)
    with ThreadPoolExecutor(max_workers=args.threads) as pool:
        results = list(pool.map(lambda n: verify_suite(ctx, [n], tolerance=args.tol)[0], names))
    report = [r.to_dict() for r in results]
    return {"curve": curve.to_dict(), "checks": report, "pass": all(r.passed for r in results)}, 0 if all(r.passed for r in results) else 2


COMMANDS = {
    "semigroup": cmd_semigroup,
    "curve": cmd_curve,
    "differentials": cmd_differentials,
    "periods": cmd_periods,
    "sigma": cmd_sigma,
    "verify": cmd_verify,
}


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, run the command and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors itself
        return 0 if exc.code == 0 else 1
    try:
        payload, code = COMMANDS[args.command](args)
    except WSigmaError as exc:
        code = 2 if isinstance(exc, VerificationError) else 1
        _emit(dumps(exc.to_dict()), args.out)
        print(f"wsigma: {exc.code}: {exc}", file=sys.stderr)
        return code
    _emit(dumps(payload), args.out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover
    main()
