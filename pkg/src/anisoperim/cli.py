"""Command line entry point.

``anisoperim run <config>`` executes verification suites described by an
INI file and writes delimited reports plus figures into the output
directory.  Exit status: 0 when every check passes, 1 when any check
fails (or a suite aborts on a consistency error), 2 for configuration or
input problems.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import __version__, io, plots
from .errors import AnisoperimError, ConfigurationError, InvalidDataError
from .norms import Norm, PolarNorm
from .presets import FIELD_NAMES, NORM_NAMES, field_spec, make_field, make_norm
from .suites import SUITE_NAMES, CheckRow, SuiteResult, run_suites

_SECTIONS = {
    "norm": {"kind", "a", "b", "p", "polar", "angular_samples"},
    "field": {"preset", "file"},
    "resolution": {"h", "levels", "radial_n", "refine"},
    "suites": {"run"},
    "output": {"directory", "figures"},
}

_GRID_ONLY_SUITES = ("identities", "geometry", "symmetrize")


def _load_config(path) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config: {exc}") from exc
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigurationError(f"unknown config section [{section}]")
        extra = set(parser[section]) - _SECTIONS[section]
        if extra:
            raise ConfigurationError(
                f"unknown keys in [{section}]: {sorted(extra)}")
    return parser


def _build_norm(cfg):
    sec = cfg["norm"] if cfg.has_section("norm") else {}
    kind = sec.get("kind", "euclidean")
    try:
        if kind == "euclidean":
            norm = Norm.euclidean()
        elif kind == "ellipse":
            norm = Norm.ellipse(float(sec.get("a", 2.0)), float(sec.get("b", 1.0)))
        elif kind == "power":
            norm = Norm.pnorm(float(sec.get("p", 3.0)))
        else:
            raise ConfigurationError(
                f"unknown norm kind {kind!r} (euclidean, ellipse or power)")
    except ValueError as exc:
        raise ConfigurationError(f"bad norm parameter: {exc}") from exc
    mode = sec.get("polar", "analytic")
    if mode not in ("analytic", "numeric"):
        raise ConfigurationError("polar must be 'analytic' or 'numeric'")
    polar = PolarNorm(norm, mode=mode,
                      angular_samples=int(sec.get("angular_samples", 720)))
    return kind, norm, polar


def _build_field(cfg, polar, h):
    if not cfg.has_section("field"):
        return None, None
    sec = cfg["field"]
    if "preset" in sec and "file" in sec:
        raise ConfigurationError("[field] takes either preset or file, not both")
    if "preset" in sec:
        name = sec["preset"]
        if name not in FIELD_NAMES:
            raise ConfigurationError(
                f"unknown field preset {name!r}; see 'anisoperim presets'")
        return make_field(name, "", polar, h=h), field_spec(name)
    if "file" in sec:
        return io.read_field(sec["file"]), None
    raise ConfigurationError("[field] needs a preset or file key")


def _suite_selection(cfg, field, polar):
    raw = "all"
    if cfg.has_section("suites"):
        raw = cfg["suites"].get("run", "all")
    tokens = [t for t in raw.replace(",", " ").split() if t]
    analytic = field is not None and field.analytic
    # a numeric polar exists to cross-check the polar itself; field suites
    # would drive finite-difference chains through the angular scan
    field_free = ("identities", "geometry")
    if tokens == ["all"]:
        if field is None or polar.mode == "numeric":
            return field_free
        return SUITE_NAMES if analytic else _GRID_ONLY_SUITES
    unknown = [t for t in tokens if t not in SUITE_NAMES]
    if unknown:
        raise ConfigurationError(f"unknown suites: {unknown}")
    if polar.mode == "numeric":
        blocked = [t for t in tokens if t not in field_free]
        if blocked:
            raise ConfigurationError(
                f"suites {blocked} need an analytic polar; numeric mode "
                f"supports only {list(field_free)}")
    if not analytic:
        blocked = [t for t in tokens if t not in _GRID_ONLY_SUITES]
        if blocked and field is None:
            raise ConfigurationError(f"suites {blocked} need a [field] section")
        if blocked:
            raise ConfigurationError(
                f"suites {blocked} need closed-form derivatives; grid files "
                f"support only {list(_GRID_ONLY_SUITES)}")
    return tuple(tokens)


def _write_artifacts(outdir, results, figures):
    for res in results:
        art = res.artifacts
        if "steiner" in art:
            io.write_table(
                os.path.join(outdir, "steiner.csv"),
                ["delta", "area", "area_predicted", "perimeter",
                 "perimeter_predicted", "total_curvature",
                 "total_curvature_predicted"],
                [(r["delta"], r["area"], r["area_predicted"], r["perimeter"],
                  r["perimeter_predicted"], r["total_curvature"],
                  r["total_curvature_predicted"]) for r in art["steiner"]])
        if "routes" in art:
            io.write_table(os.path.join(outdir, "hessian_routes.csv"),
                          ["route", "value"],
                          sorted(art["routes"].items()))
            io.write_table(os.path.join(outdir, "reilly.csv"),
                          ["t", "bulk", "boundary", "rel_gap"],
                          [(r["t"], r["bulk"], r["boundary"], r["rel_gap"])
                           for r in art["reilly"]])
        if "profile" in art:
            io.write_profile(os.path.join(outdir, "profile.csv"), art["profile"])
            if figures:
                plots.save_profile(os.path.join(outdir, "profile.svg"),
                                   art["profile"])
        if "schwarz" in art:
            io.write_radial(os.path.join(outdir, "u_star.csv"),
                            art["schwarz"].table)
            io.write_radial(os.path.join(outdir, "u_diamond.csv"),
                            art["star"].table)
            io.write_table(os.path.join(outdir, "lp.csv"),
                          ["p", "field", "schwarz", "star",
                           "equimeasure_gap", "star_margin"],
                          [(row["p"], row["field"], row["schwarz"], row["star"],
                            row["equimeasure_gap"], row["star_margin"])
                           for row in art["lp"]])
        if "comparison" in art:
            cmp = art["comparison"]
            rows = [(r["s"], r["u_sharp"], r["v_sharp"], r["margin"])
                    for r in cmp["rows"]]
            io.write_comparison(os.path.join(outdir, "comparison.csv"), rows)
            io.write_radial(os.path.join(outdir, "v_sharp.csv"), cmp["v_sharp"])
            if figures:
                plots.save_comparison(os.path.join(outdir, "comparison.svg"),
                                      rows)


def _overlay(outdir, results, field):
    for res in results:
        if "star" in res.artifacts and field is not None:
            plots.save_overlay(os.path.join(outdir, "overlay.svg"),
                               field.domain, res.artifacts["star"])
            return


def cmd_run(args) -> int:
    cfg = _load_config(args.config)
    norm_kind, norm, polar = _build_norm(cfg)

    res_sec = cfg["resolution"] if cfg.has_section("resolution") else {}
    try:
        h = float(res_sec.get("h", 1.0 / 256.0))
        n_levels = int(res_sec.get("levels", 32))
        radial_n = int(res_sec.get("radial_n", 512))
        refine = int(res_sec.get("refine", 2))
    except ValueError as exc:
        raise ConfigurationError(f"bad resolution value: {exc}") from exc
    if h <= 0:
        raise ConfigurationError("grid spacing must be positive")

    field, spec = _build_field(cfg, polar, h)
    selection = _suite_selection(cfg, field, polar)

    outdir = args.out
    if outdir is None and cfg.has_section("output"):
        outdir = cfg["output"].get("directory")
    outdir = outdir or "out"
    figures = True
    if cfg.has_section("output"):
        figures = cfg["output"].getboolean("figures", fallback=True)
    os.makedirs(outdir, exist_ok=True)

    norm_name = {"euclidean": "euclidean", "ellipse": "ellipse",
                 "power": "power3"}.get(norm_kind, norm_kind)

    def one(name) -> SuiteResult:
        try:
            return run_suites((name,), norm, polar, field=field, spec=spec,
                              norm_name=norm_name, n_levels=n_levels,
                              radial_n=radial_n, refine=refine)[0]
        except AnisoperimError as exc:
            row = CheckRow(f"aborted: {type(exc).__name__}: {exc}",
                           float("nan"), 0.0, False)
            return SuiteResult(name, [row])

    if args.parallel:
        with ThreadPoolExecutor(max_workers=min(4, len(selection))) as pool:
            results = list(pool.map(one, selection))
    else:
        results = [one(name) for name in selection]

    all_rows = []
    for res in results:
        for row in res.rows:
            all_rows.append((f"{res.name}: {row.name}", row.value,
                             row.tolerance, row.passed))
            flag = "PASS" if row.passed else "FAIL"
            print(f"[{flag}] {res.name}: {row.name} "
                  f"(value {row.value:.6g}, bound {row.tolerance:.6g})")
    io.write_checks(os.path.join(outdir, "summary.csv"), all_rows)
    _write_artifacts(outdir, results, figures)
    if figures:
        _overlay(outdir, results, field)

    ok = all(res.passed for res in results)
    n_pass = sum(1 for row in all_rows if row[3])
    print(f"{'PASSED' if ok else 'FAILED'}: {n_pass}/{len(all_rows)} checks")
    return 0 if ok else 1


def cmd_presets(_args) -> int:
    print("norms:")
    for name in NORM_NAMES:
        print(f"  {name}")
    print("fields:")
    for name in FIELD_NAMES:
        print(f"  {name}")
    print("suites:")
    for name in SUITE_NAMES:
        print(f"  {name}")
    return 0


def cmd_version(_args) -> int:
    print(__version__)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="anisoperim",
        description="verification suites for anisotropic symmetrization")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run suites described by a config file")
    run_p.add_argument("config", help="INI configuration file")
    run_p.add_argument("--out", default=None, help="output directory")
    run_p.add_argument("--parallel", action="store_true",
                       help="run suites on a thread pool")
    run_p.set_defaults(func=cmd_run)

    presets_p = sub.add_parser("presets", help="list built-in names")
    presets_p.set_defaults(func=cmd_presets)

    version_p = sub.add_parser("version", help="print the package version")
    version_p.set_defaults(func=cmd_version)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, InvalidDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AnisoperimError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
