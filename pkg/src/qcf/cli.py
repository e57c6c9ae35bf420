"""Command-line front end.

    qcf potential-info
    qcf ghost-table --N 8 --K 4 [--a 1.0]
    qcf solve   --config run.json [--tension 2.0] --out-json r.json --out-csv h.csv
    qcf iterate --N 12 --K 4 --tension 1.5 --gamma 0.5
    qcf region  --kind existence --rU 1.0883
    qcf sweep   --kind contraction --gamma 0.5 --rU-min 1.0 --rU-max 1.1 --count 51

Exit codes: 0 converged (or region found), 1 bad configuration,
2 no convergence, 3 region violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field, fields

import numpy as np

from . import io as qio
from . import models
from .analysis import (
    contraction_bound,
    lj_contraction_region,
    lj_existence_region,
    region_sweep,
    verify_certificate,
)
from .chain import ChainGeometry, aggregate_loads, load_from_potential, tension_load
from .errors import (
    ConfigError,
    ContinuationStalled,
    EmptyRegion,
    InnerSolveFailed,
    OutsideBounds,
    QCFError,
)
from .potential import LennardJones, default_radii
from .solvers import SolverConfig, Status, ghost_force_iteration, solve

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NOT_CONVERGED = 2
EXIT_REGION = 3

POTENTIALS = {"lennard-jones": LennardJones}
HISTORY_COLUMNS = ["step", "residual_inf", "ratio_to_limit", "in_box"]
SWEEP_COLUMNS = ["r_U", "r_L", "phi_lo", "phi_hi", "bound", "empty"]


class _Parser(argparse.ArgumentParser):
    """Usage errors are configuration errors (exit 1), not argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    potential: str = "lennard-jones"
    N: int = 12
    K: int = 4
    nu: str | list = "uniform:1"
    tension: float | None = None
    f_tilde: list | None = None
    Phi: list | None = None
    solver: str = "newton"
    solver_config: dict = field(default_factory=dict)
    region: dict | None = None  # {"kind": "existence", "rU": ...} or {"kind": "contraction", "gamma": ...}
    out_json: str | None = None
    out_csv: str | None = None

    # -- parsing -----------------------------------------------------------

    @classmethod
    def from_dict(cls, d: dict, where: str = "config") -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError(f"{where}: top level must be a JSON object")
        known = {f.name for f in fields(cls)}
        flat = dict(d)
        geom = flat.pop("geometry", None)
        if geom is not None:
            if not isinstance(geom, dict):
                raise ConfigError(f"{where}: field 'geometry' must be an object")
            for k in ("N", "K", "nu"):
                if k in geom:
                    flat[k] = geom[k]
        load = flat.pop("load", None)
        if load is not None:
            if not isinstance(load, dict):
                raise ConfigError(f"{where}: field 'load' must be an object")
            for k in ("tension", "f_tilde", "Phi"):
                if k in load:
                    flat[k] = load[k]
        outputs = flat.pop("outputs", None)
        if outputs is not None:
            if not isinstance(outputs, dict):
                raise ConfigError(f"{where}: field 'outputs' must be an object")
            flat["out_json"] = outputs.get("json")
            flat["out_csv"] = outputs.get("csv")
        unknown = sorted(set(flat) - known)
        if unknown:
            raise ConfigError(f"{where}: unknown field(s) {', '.join(unknown)}")
        cfg = cls(**flat)
        cfg.validate(where)
        return cfg

    def validate(self, where: str = "config") -> None:
        if self.potential not in POTENTIALS:
            raise ConfigError(f"{where}: field 'potential': unknown potential {self.potential!r}")
        for k in ("N", "K"):
            v = getattr(self, k)
            if isinstance(v, bool) or not isinstance(v, int):
                raise ConfigError(f"{where}: field '{k}' must be an integer, got {v!r}")
        given = [k for k in ("tension", "f_tilde", "Phi") if getattr(self, k) is not None]
        if len(given) > 1:
            raise ConfigError(f"{where}: field 'load': give only one of tension, f_tilde, Phi (got {given})")
        if self.solver not in ("newton", "homotopy", "gfi"):
            raise ConfigError(f"{where}: field 'solver': expected newton, homotopy or gfi, got {self.solver!r}")
        if self.region is not None and self.region.get("kind") not in ("existence", "contraction"):
            raise ConfigError(f"{where}: field 'region.kind' must be 'existence' or 'contraction'")

    # -- construction -------------------------------------------------------

    def potential_obj(self):
        return POTENTIALS[self.potential]()

    def geometry(self) -> ChainGeometry:
        try:
            if isinstance(self.nu, str):
                kind, _, val = self.nu.partition(":")
                if kind != "uniform":
                    raise ConfigError(f"field 'nu': expected 'uniform:k' or a list, got {self.nu!r}")
                return ChainGeometry.uniform(self.N, self.K, int(val or 1))
            return ChainGeometry(self.N, self.K, tuple(int(v) for v in self.nu))
        except ConfigError:
            raise
        except QCFError as exc:
            raise ConfigError(f"field 'geometry': {exc}") from exc
        except ValueError as exc:
            raise ConfigError(f"field 'nu': {exc}") from exc

    def load(self, g: ChainGeometry):
        try:
            if self.Phi is not None:
                Phi = np.asarray(self.Phi, dtype=float)
                if Phi.shape != (g.n_strain,):
                    raise ConfigError(f"field 'Phi': expected {g.n_strain} values, got {Phi.size}")
                return load_from_potential(Phi)
            if self.f_tilde is not None:
                return aggregate_loads(g, self.f_tilde)
            return tension_load(g, float(self.tension or 0.0))
        except ConfigError:
            raise
        except QCFError as exc:
            raise ConfigError(f"field 'load': {exc}") from exc
        except ValueError as exc:
            raise ConfigError(f"field 'load': {exc}") from exc

    def certificate(self, p):
        if self.region is None:
            return None
        kind = self.region["kind"]
        if kind == "existence":
            return lj_existence_region(self.region.get("rU"), p)
        cert, _ = lj_contraction_region(float(self.region.get("gamma", 0.5)), self.region.get("rU"), p)
        return cert

    def solver_cfg(self, cert) -> SolverConfig:
        opts = dict(self.solver_config)
        known = {f.name for f in fields(SolverConfig)}
        unknown = sorted(set(opts) - known)
        if unknown:
            raise ConfigError(f"field 'solver_config': unknown option(s) {', '.join(unknown)}")
        if cert is not None:
            opts.setdefault("box", (cert.r_L, cert.r_U))
            opts.setdefault("phi_bounds", (cert.phi_lo, cert.phi_hi))
        try:
            return SolverConfig(**opts)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"field 'solver_config': {exc}") from exc

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)
                if f.name not in ("out_json", "out_csv")}


# ---------------------------------------------------------------------------
# commands


def cmd_potential_info(args) -> int:
    p = LennardJones()
    radii = default_radii(p)
    rows = [
        ("r1", radii.r1),
        ("r2", radii.r2),
        ("a0", radii.a0),
        ("a1", radii.a1),
        ("eta_hat(a1)", float(p.eta_hat(radii.a1))),
        ("r2/2", radii.half_r2),
    ]
    print(f"potential: {p.name}")
    for name, v in rows:
        print(f"{name:<12} {v:.6g}")
    if args.out_json:
        qio.write_json(args.out_json, {"potential": p.name, **{k: v for k, v in rows}})
    return EXIT_OK


def ghost_table_rows(g: ChainGeometry, a: float, p) -> list[dict]:
    r = np.full(g.n_strain, a)
    qce, ghost, qcf = models.force_qce(g, r, p), models.force_ghost(g, r, p), models.force_qcf(g, r, p)
    return [{"j": j, "F_qce": qce[k], "F_ghost": ghost[k], "F_qcf": qcf[k]}
            for k, j in enumerate(range(-g.N, g.N + 2))]


def cmd_ghost_table(args) -> int:
    p = LennardJones()
    try:
        g = ChainGeometry.uniform(args.N or 8, args.K or 4)
    except QCFError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    a = default_radii(p).a0 if args.a is None else args.a
    if not a > 0:
        print("error: --a must be positive", file=sys.stderr)
        return EXIT_CONFIG
    rows = ghost_table_rows(g, a, p)
    cols = ["j", "F_qce", "F_ghost", "F_qcf"]
    print(f"a = {a:.12g}, eta(2a) = {float(p.eta(2 * a)):.12g}")
    print(qio.csv_text(rows, cols), end="")
    if args.out_csv:
        qio.write_csv(args.out_csv, rows, cols)
    if args.out_json:
        qio.write_json(args.out_json, {"a": a, "index_origin": -g.N, "rows": rows})
    return EXIT_OK


def _load_config(args, solver: str | None) -> RunConfig:
    data: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"{args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.config}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    cfg = RunConfig.from_dict(data, where=args.config or "config")
    if args.N is not None:
        cfg.N = args.N
    if args.K is not None:
        cfg.K = args.K
    if args.tension is not None:
        cfg.tension, cfg.f_tilde, cfg.Phi = args.tension, None, None
    if args.gamma is not None:
        cfg.region = {"kind": "contraction", "gamma": args.gamma, "rU": args.rU}
    elif args.rU is not None:
        cfg.region = {"kind": "existence", "rU": args.rU}
    if solver is not None:
        cfg.solver = solver
    elif getattr(args, "method", None):
        cfg.solver = args.method
    if args.out_json:
        cfg.out_json = args.out_json
    if args.out_csv:
        cfg.out_csv = args.out_csv
    cfg.validate(args.config or "config")
    return cfg


def history_rows(report) -> list[dict]:
    n = len(report.residuals)
    ratios = list(report.ratios) + [None] * (n - len(report.ratios))
    in_box = list(report.in_box) + [True] * (n - len(report.in_box))
    return [{"step": report.steps[k] if k < len(report.steps) else k,
             "residual_inf": report.residuals[k],
             "ratio_to_limit": ratios[k],
             "in_box": in_box[k]} for k in range(n)]


def _exit_code(status: Status) -> int:
    if status is Status.CONVERGED:
        return EXIT_OK
    if status is Status.LEFT_REGION:
        return EXIT_REGION
    return EXIT_NOT_CONVERGED


def run(cfg: RunConfig) -> tuple[int, dict | None]:
    """Execute a solve; returns the exit code and the JSON document."""
    p = cfg.potential_obj()
    g = cfg.geometry()
    load = cfg.load(g)
    try:
        cert = cfg.certificate(p)
    except EmptyRegion as exc:
        print(f"region violation: {exc}", file=sys.stderr)
        return EXIT_REGION, None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field 'region': {exc}") from exc
    scfg = cfg.solver_cfg(cert)
    try:
        if cfg.solver == "gfi":
            report = ghost_force_iteration(g, load.Phi, scfg, p)
        else:
            report = solve(cfg.solver, g, load.Phi, scfg, p)
    except OutsideBounds as exc:
        print(f"region violation: {exc}", file=sys.stderr)
        return EXIT_REGION, None
    except (ContinuationStalled, InnerSolveFailed) as exc:
        print(f"solver failed: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED, None
    doc = {
        "config": cfg.to_dict(),
        "index_origin": -g.N,
        "report": report.to_dict(),
    }
    if cert is not None:
        doc["certificate"] = cert.to_dict()
        doc["contraction_bound"] = contraction_bound(cert.r_L, cert.r_U, p)
    if cfg.out_json:
        qio.write_json(cfg.out_json, doc)
    if cfg.out_csv:
        qio.write_csv(cfg.out_csv, history_rows(report), HISTORY_COLUMNS)
    print(f"{report.method}: {report.status.value} after {len(report.residuals)} rows, "
          f"residual {report.residuals[-1]:.3e}")
    return _exit_code(report.status), doc


def _cmd_run(args, solver: str | None) -> int:
    try:
        cfg = _load_config(args, solver)
        code, _ = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return code


def cmd_solve(args) -> int:
    return _cmd_run(args, None)


def cmd_iterate(args) -> int:
    return _cmd_run(args, "gfi")


def _region(kind: str, gamma: float, r_U):
    if kind == "existence":
        cert = lj_existence_region(r_U)
        return cert, None
    return lj_contraction_region(gamma, r_U)


def cmd_region(args) -> int:
    gamma = 0.5 if args.gamma is None else args.gamma
    try:
        cert, est = _region(args.kind, gamma, args.rU)
    except EmptyRegion as exc:
        doc = {"kind": args.kind, "r_U": args.rU, "empty": True, "message": str(exc)}
        print(f"empty region: {exc}")
        if args.out_json:
            qio.write_json(args.out_json, doc)
        return EXIT_REGION
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    doc = {"kind": args.kind, "empty": False, **cert.to_dict()}
    doc["bound"] = contraction_bound(cert.r_L, cert.r_U)
    if est is not None:
        doc["gamma"] = est.gamma
    doc["hypotheses"] = [{"name": c.name, "passed": c.passed, "margin": c.margin}
                         for c in verify_certificate(None, cert)]
    for k in ("r_L", "r_U", "phi_lo", "phi_hi", "symmetric_bound", "bound"):
        print(f"{k:<16} {doc[k]:.6g}")
    if args.out_json:
        qio.write_json(args.out_json, doc)
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.count < 1 or not args.rU_min < args.rU_max:
        print("config error: need --count >= 1 and --rU-min < --rU-max", file=sys.stderr)
        return EXIT_CONFIG
    gamma = 0.5 if args.gamma is None else args.gamma
    grid = np.linspace(args.rU_min, args.rU_max, args.count)
    try:
        rows = region_sweep(args.kind, grid, gamma)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = qio.csv_text(rows, SWEEP_COLUMNS)
    if args.out_csv:
        qio.write_csv(args.out_csv, rows, SWEEP_COLUMNS)
    else:
        print(text, end="")
    if args.out_json:
        qio.write_json(args.out_json, {"kind": args.kind, "gamma": gamma, "rows": rows})
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qcf", description="1D force-based quasicontinuum solver")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, config=True):
        if config:
            sp.add_argument("--config", help="JSON run configuration")
        sp.add_argument("--N", type=int, help="number of intervals is 2N+1")
        sp.add_argument("--K", type=int, help="atomistic sites are -K+1..K")
        sp.add_argument("--tension", type=float, help="end tension T (Phi = T)")
        sp.add_argument("--gamma", type=float, help="contraction constant for the region box")
        sp.add_argument("--rU", type=float, help="upper bound of the region box")
        sp.add_argument("--out-json", dest="out_json")
        sp.add_argument("--out-csv", dest="out_csv")

    sp = sub.add_parser("potential-info", help="critical radii of the LJ potential")
    sp.add_argument("--out-json", dest="out_json")
    sp.set_defaults(func=cmd_potential_info)

    sp = sub.add_parser("ghost-table", help="QCE, ghost and QCF forces at uniform spacing")
    sp.add_argument("--N", type=int)
    sp.add_argument("--K", type=int)
    sp.add_argument("--a", type=float, help="uniform spacing (default a0)")
    sp.add_argument("--out-json", dest="out_json")
    sp.add_argument("--out-csv", dest="out_csv")
    sp.set_defaults(func=cmd_ghost_table)

    sp = sub.add_parser("solve", help="solve the force-based equations")
    common(sp)
    sp.add_argument("--method", choices=["newton", "homotopy", "gfi"])
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("iterate", help="ghost force iteration")
    common(sp)
    sp.set_defaults(func=cmd_iterate)

    sp = sub.add_parser("region", help="existence or contraction box")
    sp.add_argument("--kind", choices=["existence", "contraction"], default="existence")
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--rU", type=float, help="omit to maximize the symmetric load bound")
    sp.add_argument("--out-json", dest="out_json")
    sp.set_defaults(func=cmd_region)

    sp = sub.add_parser("sweep", help="region bounds over a range of r_U")
    sp.add_argument("--kind", choices=["existence", "contraction"], default="existence")
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--rU-min", dest="rU_min", type=float, default=1.0)
    sp.add_argument("--rU-max", dest="rU_max", type=float, default=1.105)
    sp.add_argument("--count", type=int, default=41)
    sp.add_argument("--out-json", dest="out_json")
    sp.add_argument("--out-csv", dest="out_csv")
    sp.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
