"""Batch front end: spectra, coherent-state tables, statistics profiles and
the identity-verification suite, emitted as CSV (with ``#`` metadata lines)
or JSON.

Exit codes: 0 success, 1 verification failure (or non-convergence),
2 usage/domain error.  Output is byte-deterministic for a fixed
configuration: floats are printed with 17 significant digits and no
timestamps or environment data are embedded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import algebra, coherent, geometry, statistics
from .qcore import (ConvergenceError, DeformParams, DomainError, q_number,
                    structure_function)

__all__ = [
    "EXIT_OK",
    "EXIT_VERIFY_FAIL",
    "EXIT_USAGE",
    "DEFAULT_TOLERANCES",
    "GridSpec",
    "RunConfig",
    "VerifyOutcome",
    "run_verification_suite",
    "main",
]

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2

#: q -> 1 cross-check mode pins q at this value
LIMIT_Q1_VALUE = 1.0 + 1e-6

DEFAULT_TOLERANCES: dict[str, float] = {
    "structure_recurrence": 1e-12,
    "commutator": 1e-12,
    "boundedness": 1e-6,
    "vacuum_uncertainty": 1e-12,
    "functional_equation": 1e-11,
    "series_product": 1e-10,
    "qderiv_fixed_point": 1e-9,
    "moments_qgt1": 1e-8,
    "moments_qlt1": 1e-5,
    "pdf_normalization": 1e-10,
    "mandel_smallx": 1e-3,
    "metric_w0": 1e-10,
    "metric_identity": 1e-6,
    "metric_smallx": 1e-2,
    "reduction_unit_scale": 1e-13,
}


@dataclass(frozen=True)
class GridSpec:
    """Sampling of the x = |z|^2 axis."""

    x_min: float
    x_max: float
    count: int
    log: bool = False

    def points(self) -> list[float]:
        if self.count < 1:
            raise DomainError(f"grid needs count >= 1, got {self.count}")
        if self.count == 1:
            return [self.x_min]
        if self.log:
            if not (self.x_min > 0.0):
                raise DomainError("log grid requires x_min > 0")
            lo, hi = math.log(self.x_min), math.log(self.x_max)
            return [math.exp(lo + i * (hi - lo) / (self.count - 1)) for i in range(self.count)]
        step = (self.x_max - self.x_min) / (self.count - 1)
        return [self.x_min + i * step for i in range(self.count)]


@dataclass
class RunConfig:
    """Everything a command needs: parameters, truncation, grid, output."""

    params: DeformParams
    dim: int = 256
    grid: GridSpec | None = None
    output_format: str = "csv"
    tolerances: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    seed: int = 0
    hbar: float = 1.0
    mass: float = 1.0
    omega: float = 1.0
    out: str | None = None
    n_max: int = 10
    z: complex = 0j
    limit_q1: bool = False


@dataclass(frozen=True)
class VerifyOutcome:
    """One named identity check: passed iff max_rel_error <= threshold."""

    check_name: str
    max_rel_error: float
    threshold: float
    passed: bool
    skipped: bool = False


# ----------------------------- verification -----------------------------

def _outcome(name: str, err: float, tol: float) -> VerifyOutcome:
    return VerifyOutcome(name, err, tol, passed=bool(err <= tol))


def _skipped(name: str, tol: float) -> VerifyOutcome:
    return VerifyOutcome(name, 0.0, tol, passed=True, skipped=True)


def _x_scale(p: DeformParams) -> float:
    """Characteristic label scale: the disk radius for q > 1, s/(1-q) below."""
    if p.q > 1.0:
        return coherent.domain_radius(p).radius
    return p.scale / (1.0 - p.q)


def _check_structure_recurrence(p: DeformParams, tol: float) -> VerifyOutcome:
    worst = 0.0
    phi_n = 0.0
    for n in range(61):
        phi_n1 = structure_function(p, n + 1)
        target = p.scale * p.q ** (-(n + 1))
        worst = max(worst, abs(phi_n1 - phi_n - target) / phi_n1)
        phi_n = phi_n1
    return _outcome("structure_recurrence", worst, tol)


def _check_commutator(p: DeformParams, dim: int, tol: float) -> VerifyOutcome:
    t = algebra.FockTruncation(dim)
    res = algebra.commutator_defect(p, t)
    worst = 0.0
    phi_n = 0.0
    for n in range(dim - 1):
        phi_n1 = structure_function(p, n + 1)
        scale = max(p.scale, phi_n, phi_n1)
        worst = max(worst, abs(res[n]) / scale)
        phi_n = phi_n1
    return _outcome("commutator", worst, tol)


def _check_boundedness(p: DeformParams, tol: float) -> VerifyOutcome:
    report = algebra.boundedness_diagnostic(p, probe_n=200)
    if p.q > 1.0:
        err = max(0.0, report.max_ratio_to_bound - 1.0)
    else:
        err = abs(report.ratio_at_probe - report.ratio_limit) / report.ratio_limit
    return _outcome("boundedness", err, tol)


def _check_vacuum_uncertainty(p: DeformParams, tol: float) -> VerifyOutcome:
    row = algebra.spectrum(p, 0)[0]
    expected = p.scale / p.q
    err = abs(row.uncertainty_product - expected) / expected
    return _outcome("vacuum_uncertainty", err, tol)


def _check_functional_equation(p: DeformParams, tol: float) -> VerifyOutcome:
    if p.q < 1.0:
        return _skipped("functional_equation", tol)
    radius = coherent.domain_radius(p).radius
    worst = 0.0
    for x in np.geomspace(1e-6 * radius, 0.999 * radius, 50):
        lhs = coherent.normalization(p, x).value * (1.0 - (p.q - 1.0) * x / p.scale)
        rhs = coherent.normalization(p, x / p.q).value
        worst = max(worst, abs(lhs - rhs) / rhs)
    return _outcome("functional_equation", worst, tol)


def _check_series_product(p: DeformParams, tol: float) -> VerifyOutcome:
    if p.q < 1.0:
        return _skipped("series_product", tol)
    radius = coherent.domain_radius(p).radius
    worst = 0.0
    for x in np.geomspace(1e-6 * radius, 0.999 * radius, 50):
        series = coherent.normalization(p, x).value
        prod, _ = coherent.pochhammer_product(p, x)
        worst = max(worst, abs(series - 1.0 / prod) * prod)
    return _outcome("series_product", worst, tol)


def _check_qderiv_fixed_point(p: DeformParams, tol: float) -> VerifyOutcome:
    from .qcore import q_derivative
    xc = _x_scale(p)
    hi = 0.9 * xc if p.q > 1.0 else 10.0 * xc
    worst = 0.0
    value = lambda y: coherent.normalization(p, y).value
    for x in np.geomspace(1e-2 * xc, hi, 25):
        lhs = q_derivative(value, p, x)
        rhs = value(x)
        worst = max(worst, abs(lhs - rhs) / rhs)
    return _outcome("qderiv_fixed_point", worst, tol)


def _check_moments(p: DeformParams, tol_gt: float, tol_lt: float) -> list[VerifyOutcome]:
    if p.q > 1.0:
        report = coherent.verify_moments(p, 10)
        return [_outcome("moments_qgt1", max(report.rel_error), tol_gt),
                _skipped("moments_qlt1", tol_lt)]
    report = coherent.verify_moments(p, 8)
    return [_skipped("moments_qgt1", tol_gt),
            _outcome("moments_qlt1", max(report.rel_error), tol_lt)]


def _check_pdf_normalization(p: DeformParams, tol: float) -> VerifyOutcome:
    xc = _x_scale(p)
    span = 0.45 * xc if p.q > 1.0 else 3.0 * xc
    worst = 0.0
    for frac in (0.1, 0.45, 1.0):
        x = frac * span
        e = coherent.normalization(p, x)
        ratios = coherent._term_ratios(p, x)
        term = 1.0
        terms = [1.0]
        for _ in range(1, e.terms_used + 200):
            term *= next(ratios)
            terms.append(term)
        total = math.fsum(terms) / e.value
        worst = max(worst, abs(total - 1.0))
    return _outcome("pdf_normalization", worst, tol)


def _check_mandel_smallx(p: DeformParams, tol: float) -> VerifyOutcome:
    return _outcome("mandel_smallx", statistics.mandel_smallx_check(p).rel_error, tol)


def _check_metric_w0(p: DeformParams, tol: float) -> VerifyOutcome:
    expected = p.q / p.scale
    err = abs(geometry.metric_w(p, 0.0).w - expected) / expected
    return _outcome("metric_w0", err, tol)


def _check_metric_identity(p: DeformParams, tol: float) -> VerifyOutcome:
    xc = _x_scale(p)
    hi = 0.4 * xc if p.q > 1.0 else 1.5 * xc
    h = 2e-6 * xc
    worst = 0.0
    for x in np.linspace(hi / 20.0, hi, 20):
        fd = (statistics.stats_point(p, x + h).mean_n
              - statistics.stats_point(p, x - h).mean_n) / (2.0 * h)
        w = geometry.metric_w(p, x).w
        worst = max(worst, abs(fd - w) / abs(w))
    return _outcome("metric_identity", worst, tol)


def _check_metric_smallx(p: DeformParams, tol: float) -> VerifyOutcome:
    radius = coherent.domain_radius(p).radius
    probe = 1e-4 * min(1.0, radius)
    return _outcome("metric_smallx", geometry.metric_smallx_check(p, probe).rel_error, tol)


def _check_reduction(p: DeformParams, tol: float) -> VerifyOutcome:
    reduced = DeformParams(p.q, 1.0, 0.0)
    worst = 0.0
    for n in range(1, 61):
        direct = reduced.q ** (-n) * q_number(n, reduced.q)
        phi = structure_function(reduced, n)
        worst = max(worst, abs(phi - direct) / direct)
    return _outcome("reduction_unit_scale", worst, tol)


def run_verification_suite(p: DeformParams, dim: int = 256,
                           tolerances: dict[str, float] | None = None
                           ) -> list[VerifyOutcome]:
    """Run every identity check; q-regime-specific checks are skipped (not
    failed) in the other regime."""
    tol = dict(DEFAULT_TOLERANCES)
    if tolerances:
        tol.update(tolerances)
    out = [
        _check_structure_recurrence(p, tol["structure_recurrence"]),
        _check_commutator(p, dim, tol["commutator"]),
        _check_boundedness(p, tol["boundedness"]),
        _check_vacuum_uncertainty(p, tol["vacuum_uncertainty"]),
        _check_functional_equation(p, tol["functional_equation"]),
        _check_series_product(p, tol["series_product"]),
        _check_qderiv_fixed_point(p, tol["qderiv_fixed_point"]),
    ]
    out.extend(_check_moments(p, tol["moments_qgt1"], tol["moments_qlt1"]))
    out.extend([
        _check_pdf_normalization(p, tol["pdf_normalization"]),
        _check_mandel_smallx(p, tol["mandel_smallx"]),
        _check_metric_w0(p, tol["metric_w0"]),
        _check_metric_identity(p, tol["metric_identity"]),
        _check_metric_smallx(p, tol["metric_smallx"]),
        _check_reduction(p, tol["reduction_unit_scale"]),
    ])
    return out


# ----------------------------- output -----------------------------

def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _emit_table(meta: dict, columns: list[str], rows: list[list], cfg: RunConfig) -> None:
    if cfg.output_format == "json":
        doc = {"metadata": meta, "columns": columns, "rows": rows}
        text = json.dumps(doc, indent=2) + "\n"
    else:
        lines = [f"# {key} = {_fmt(val)}" for key, val in meta.items()]
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row))
        text = "\n".join(lines) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _base_meta(cfg: RunConfig, command: str) -> dict:
    p = cfg.params
    return {
        "command": command,
        "q": p.q,
        "l": p.l,
        "lambda": p.lmbda,
        "scale": p.scale,
        "seed": cfg.seed,
        "limit_q1": cfg.limit_q1,
    }


# ----------------------------- commands -----------------------------

def cmd_spectrum(cfg: RunConfig) -> int:
    rows_raw = algebra.spectrum(cfg.params, cfg.n_max, hbar_omega=cfg.hbar * cfg.omega)
    cx = cfg.hbar / (2.0 * cfg.mass * cfg.omega)
    cp = cfg.mass * cfg.hbar * cfg.omega / 2.0
    cu = cfg.hbar / 2.0
    meta = _base_meta(cfg, "spectrum")
    meta.update({"hbar": cfg.hbar, "mass": cfg.mass, "omega": cfg.omega, "n_max": cfg.n_max})
    columns = ["n", "energy", "delta_x2", "delta_p2", "uncertainty_product"]
    rows = [[r.n, r.energy, cx * r.var_x, cp * r.var_p, cu * r.uncertainty_product]
            for r in rows_raw]
    _emit_table(meta, columns, rows, cfg)
    return EXIT_OK


def cmd_coherent(cfg: RunConfig, z: complex) -> int:
    p = cfg.params
    radius = coherent.domain_radius(p).radius
    if abs(z) ** 2 > radius * (1.0 - coherent.DOMAIN_MARGIN):
        raise DomainError(
            f"|z|^2 = {abs(z) ** 2} is outside the state domain: radius R = {radius}")
    t = algebra.FockTruncation(cfg.dim)
    state = coherent.amplitudes(p, z, t)
    residual = coherent.eigen_residual(p, z, t)
    meta = _base_meta(cfg, "coherent")
    meta.update({
        "z_re": z.real,
        "z_im": z.imag,
        "dim": cfg.dim,
        "radius": radius,
        "norm_value": state.norm_value,
        "tail_bound": state.tail_bound,
        "eigen_residual": residual,
    })
    columns = ["n", "re_c", "im_c", "prob"]
    rows = [[n, state.amplitudes[n].real, state.amplitudes[n].imag,
             abs(state.amplitudes[n]) ** 2] for n in range(cfg.dim)]
    _emit_table(meta, columns, rows, cfg)
    return EXIT_OK


def cmd_stats(cfg: RunConfig) -> int:
    p = cfg.params
    grid = cfg.grid or _default_grid(p)
    radius = coherent.domain_radius(p).radius
    if math.isfinite(radius) and grid.x_max > radius * (1.0 - coherent.DOMAIN_MARGIN):
        raise DomainError(
            f"grid escapes the state domain: x_max = {grid.x_max}, radius R = {radius}")
    meta = _base_meta(cfg, "stats")
    meta.update({"x_min": grid.x_min, "x_max": grid.x_max, "points": grid.count,
                 "log_grid": grid.log})
    columns = ["x", "mean_n", "second_moment", "mandel_q", "metric_w"]
    rows = []
    for x in grid.points():
        sp = statistics.stats_point(p, x)
        mp = geometry.metric_w(p, x)
        rows.append([x, sp.mean_n, sp.second_moment, sp.mandel_q, mp.w])
    _emit_table(meta, columns, rows, cfg)
    return EXIT_OK


def _default_grid(p: DeformParams) -> GridSpec:
    if p.q > 1.0:
        hi = 0.5 * coherent.domain_radius(p).radius
    else:
        hi = 2.0 * p.scale / (1.0 - p.q)
    return GridSpec(x_min=0.0, x_max=hi, count=21, log=False)


def cmd_verify(cfg: RunConfig) -> int:
    outcomes = run_verification_suite(cfg.params, cfg.dim, cfg.tolerances)
    meta = _base_meta(cfg, "verify")
    meta["dim"] = cfg.dim
    columns = ["check_name", "max_rel_error", "threshold", "passed", "skipped"]
    rows = [[o.check_name, o.max_rel_error, o.threshold, o.passed, o.skipped]
            for o in outcomes]
    _emit_table(meta, columns, rows, cfg)
    failed = [o for o in outcomes if not o.passed]
    if failed:
        names = ", ".join(o.check_name for o in failed)
        print(f"verify: FAILED checks: {names}", file=sys.stderr)
        return EXIT_VERIFY_FAIL
    return EXIT_OK


# ----------------------------- argument parsing -----------------------------

def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--q", type=float, default=2.0, help="deformation base q (q > 0, q != 1)")
    sub.add_argument("--l", type=float, default=1.0, help="scale parameter l (nonzero)")
    sub.add_argument("--lambda", dest="lam", type=float, default=0.0,
                     help="exponent shift lambda")
    sub.add_argument("--limit-q1", action="store_true",
                     help=f"cross-check mode: pin q at {LIMIT_Q1_VALUE}")
    sub.add_argument("--dim", type=int, default=256, help="Fock truncation dimension")
    sub.add_argument("--format", dest="output_format", choices=("csv", "json"),
                     default="csv", help="output table format")
    sub.add_argument("--out", type=str, default=None, help="output path (default stdout)")
    sub.add_argument("--seed", type=int, default=0, help="seed recorded for randomized grids")
    sub.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                     help="override a named tolerance (repeatable)")
    sub.add_argument("--hbar", type=float, default=1.0)
    sub.add_argument("--mass", type=float, default=1.0)
    sub.add_argument("--omega", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdeform",
        description="Deformed-oscillator numerics: spectra, coherent states, "
                    "photon statistics and identity verification.")
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("spectrum", help="energies and number-state uncertainties")
    _add_common(sp)
    sp.add_argument("--nmax", type=int, default=10, help="highest level n")

    co = subs.add_parser("coherent", help="coherent-state amplitude table")
    _add_common(co)
    co.add_argument("--z-re", type=float, default=0.0)
    co.add_argument("--z-im", type=float, default=0.0)

    st = subs.add_parser("stats", help="statistics/metric profile over an x grid")
    _add_common(st)
    st.add_argument("--x-min", type=float, default=None)
    st.add_argument("--x-max", type=float, default=None)
    st.add_argument("--points", type=int, default=21)
    st.add_argument("--log-grid", action="store_true")

    ve = subs.add_parser("verify", help="run the identity suite with pass/fail lines")
    _add_common(ve)
    return parser


def _parse_tolerances(pairs: list[str]) -> dict[str, float]:
    out: dict[str, float] = {}
    for pair in pairs:
        name, _, raw = pair.partition("=")
        if name not in DEFAULT_TOLERANCES:
            raise DomainError(
                f"unknown tolerance '{name}'; known: {', '.join(sorted(DEFAULT_TOLERANCES))}")
        value = float(raw)
        if not (value > 0.0):
            raise DomainError(f"tolerance {name} must be positive, got {value}")
        out[name] = value
    return out


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    q = LIMIT_Q1_VALUE if args.limit_q1 else args.q
    params = DeformParams(q, args.l, args.lam)
    tolerances = dict(DEFAULT_TOLERANCES)
    tolerances.update(_parse_tolerances(args.tol))
    cfg = RunConfig(params=params, dim=args.dim, output_format=args.output_format,
                    tolerances=tolerances, seed=args.seed, hbar=args.hbar,
                    mass=args.mass, omega=args.omega, out=args.out,
                    limit_q1=args.limit_q1)
    if getattr(args, "nmax", None) is not None:
        cfg.n_max = args.nmax
    if args.command == "stats":
        default = _default_grid(params)
        x_min = default.x_min if args.x_min is None else args.x_min
        x_max = default.x_max if args.x_max is None else args.x_max
        cfg.grid = GridSpec(x_min=x_min, x_max=x_max, count=args.points,
                            log=args.log_grid)
    if args.command == "coherent":
        cfg.z = complex(args.z_re, args.z_im)
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        cfg = _config_from_args(args)
        if args.command == "spectrum":
            return cmd_spectrum(cfg)
        if args.command == "coherent":
            return cmd_coherent(cfg, cfg.z)
        if args.command == "stats":
            return cmd_stats(cfg)
        if args.command == "verify":
            return cmd_verify(cfg)
        parser.error(f"unknown command {args.command}")
        return EXIT_USAGE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY_FAIL


if __name__ == "__main__":
    sys.exit(main())
