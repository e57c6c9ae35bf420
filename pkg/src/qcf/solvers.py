"""Solvers for the strain-space force-based equilibrium system ``psi_hat^F(r) = Phi``.

Three routes are provided and are expected to agree:

* :func:`newton_solve`: damped Newton on ``psi_hat^F(r) - Phi``;
* :func:`homotopy_solve`: continuation from the decoupled local system;
* :func:`ghost_force_iteration`: the fixed-point scheme
  ``psi_hat^E(r^{n+1}) = Phi - psi_hat^G(r^n)``.

Solvers are deterministic and return an immutable :class:`SolveReport`.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from . import conjugate
from .chain import ChainGeometry, check_strain
from .errors import ContinuationStalled, InnerSolveFailed, NoBracket, OutsideBounds
from .potential import LennardJones, PairPotential, default_radii, find_root

LJ = LennardJones()

PIVOT_TOL = 1e-14
MAX_HALVINGS = 30
MIN_HOMOTOPY_STEP = 2.0**-10
INNER_TOL = 1e-12
# Ratios to the limit are not reported once ||r^n - r|| falls to roundoff level.
RATIO_FLOOR = 1e-9

JACOBIAN_VARIANTS = ("Fhat", "E", "Ghat", "L", "F")


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERS = "MaxIters"
    JACOBIAN_SINGULAR = "JacobianSingular"
    LEFT_REGION = "LeftRegion"
    STALLED = "Stalled"  # damping could not reduce the residual


@dataclass(frozen=True)
class SolverConfig:
    newton_tol: float = 1e-12
    max_newton_iters: int = 50
    homotopy_steps: int = 20
    gfi_tol: float = 1e-12
    max_gfi_iters: int = 200
    initial_strain: tuple[float, ...] | None = None
    box: tuple[float, float] | None = None  # open box (r_L, r_U) for LeftRegion checks
    phi_bounds: tuple[float, float] | None = None  # demand certification against these
    inner_tol: float = INNER_TOL

    def __post_init__(self):
        for name in ("newton_tol", "gfi_tol", "inner_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("max_newton_iters", "homotopy_steps", "max_gfi_iters"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.initial_strain is not None:
            object.__setattr__(self, "initial_strain", tuple(float(x) for x in self.initial_strain))
        if self.box is not None:
            lo, hi = map(float, self.box)
            if not 0 < lo < hi:
                raise ValueError(f"box must satisfy 0 < r_L < r_U, got {self.box}")
            object.__setattr__(self, "box", (lo, hi))

    def start(self, g: ChainGeometry, p: PairPotential) -> np.ndarray:
        if self.initial_strain is not None:
            return check_strain(g, self.initial_strain).copy()
        return np.full(g.n_strain, _a0(p))

    def with_overrides(self, **kw) -> "SolverConfig":
        return replace(self, **kw)


def _a0(p: PairPotential) -> float:
    return default_radii(p).a0


@dataclass(frozen=True, eq=False)
class SolveReport:
    method: str
    status: Status
    r: np.ndarray
    residuals: tuple[float, ...]  # ||psi_hat^F(r^k) - Phi||_inf per history row
    steps: tuple[int, ...] = ()
    ratios: tuple[float | None, ...] = ()  # ||r^{n} - r|| / ||r^{n-1} - r||, post hoc
    successive: tuple[float, ...] = ()  # ||r^n - r^{n-1}||_inf
    in_box: tuple[bool, ...] = ()
    t_values: tuple[float, ...] = ()
    message: str = ""

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED

    @property
    def iterations(self) -> int:
        return len(self.residuals)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "status": self.status.value,
            "message": self.message,
            "index_origin": -(len(self.r) // 2),
            "r": [float(x) for x in self.r],
            "steps": list(self.steps),
            "residuals": list(self.residuals),
            "ratios": list(self.ratios),
            "successive": list(self.successive),
            "in_box": list(self.in_box),
            "t_values": list(self.t_values),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SolveReport":
        return cls(
            method=d["method"],
            status=Status(d["status"]),
            r=np.asarray(d["r"], dtype=float),
            residuals=tuple(float(x) for x in d["residuals"]),
            steps=tuple(int(x) for x in d.get("steps", ())),
            ratios=tuple(None if x is None else float(x) for x in d.get("ratios", ())),
            successive=tuple(float(x) for x in d.get("successive", ())),
            in_box=tuple(bool(x) for x in d.get("in_box", ())),
            t_values=tuple(float(x) for x in d.get("t_values", ())),
            message=d.get("message", ""),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, SolveReport):
            return NotImplemented
        a, b = self.to_dict(), other.to_dict()
        return a == b


# ---------------------------------------------------------------------------
# Jacobians


def jacobian(g: ChainGeometry, r, variant: str = "Fhat", p: PairPotential = LJ) -> np.ndarray:
    """Dense ``(2N+1) x (2N+1)`` matrix ``D_j psi_i`` of a conjugate force variant."""
    r = check_strain(g, r)
    return conjugate.table_for(g, variant).jacobian(p.eta_prime, r)[:-1]


def _residual_fn(g, Phi, variant, p):
    table = conjugate.table_for(g, variant)

    def fun(r):
        return table.evaluate(p.eta, r)[:-1] - Phi

    def jac(r):
        return table.jacobian(p.eta_prime, r)[:-1]

    return fun, jac


def _inf(v) -> float:
    return float(np.max(np.abs(v))) if len(v) else 0.0


def _inside(r, box) -> bool:
    if box is None:
        return True
    return bool(np.all(r > box[0]) and np.all(r < box[1]))


def _factor(J):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(J, check_finite=False)
    if np.min(np.abs(np.diag(lu))) < PIVOT_TOL or not np.all(np.isfinite(lu)):
        return None
    return lu, piv


@dataclass
class _NewtonResult:
    r: np.ndarray
    status: Status
    residuals: list = field(default_factory=list)
    iterates: list = field(default_factory=list)


def _safe_norm(fun, r) -> float:
    if not np.all(r > 0):
        return math.inf
    v = fun(r)
    return _inf(v) if np.all(np.isfinite(v)) else math.inf


def _newton(fun: Callable, jac: Callable, r0, tol: float, max_iters: int, box=None) -> _NewtonResult:
    """Damped Newton.  Steps are halved until the residual norm decreases."""
    r = np.array(r0, dtype=float)
    res = fun(r)
    out = _NewtonResult(r=r, status=Status.MAX_ITERS, residuals=[_inf(res)], iterates=[r.copy()])
    for _ in range(max_iters):
        if out.residuals[-1] <= tol:
            out.status = Status.CONVERGED
            break
        fac = _factor(jac(r))
        if fac is None:
            out.status = Status.JACOBIAN_SINGULAR
            break
        step = lu_solve(fac, -res, check_finite=False)
        lam, current = 1.0, out.residuals[-1]
        for _ in range(MAX_HALVINGS + 1):
            trial = r + lam * step
            norm = _safe_norm(fun, trial)
            if norm < current:
                break
            lam *= 0.5
        else:
            out.status = Status.STALLED
            break
        r = trial
        res = fun(r)
        out.r = r
        out.residuals.append(_inf(res))
        out.iterates.append(r.copy())
        if not _inside(r, box):
            out.status = Status.LEFT_REGION
            break
    else:
        if out.residuals[-1] <= tol:
            out.status = Status.CONVERGED
    return out


def _ratios_to_limit(iterates, limit) -> list:
    dist = [_inf(x - limit) for x in iterates]
    ratios = []
    for prev, cur in zip(dist[:-1], dist[1:]):
        ratios.append(cur / prev if prev > RATIO_FLOOR else None)
    return ratios


def _check_phi(g: ChainGeometry, Phi) -> np.ndarray:
    Phi = np.asarray(Phi, dtype=float)
    if Phi.shape != (g.n_strain,):
        raise ValueError(f"Phi must have length {g.n_strain}, got shape {Phi.shape}")
    return Phi


def _certify(Phi, cfg: SolverConfig):
    if cfg.phi_bounds is None:
        return
    lo, hi = cfg.phi_bounds
    if not (np.all(Phi > lo) and np.all(Phi < hi)):
        raise OutsideBounds(f"Phi range [{Phi.min():.6g}, {Phi.max():.6g}] is not inside ({lo:.6g}, {hi:.6g})")


# ---------------------------------------------------------------------------
# Newton


def newton_solve(g: ChainGeometry, Phi, cfg: SolverConfig = SolverConfig(), p: PairPotential = LJ) -> SolveReport:
    """Damped Newton on ``psi_hat^F(r) = Phi`` from ``cfg.initial_strain``."""
    Phi = _check_phi(g, Phi)
    _certify(Phi, cfg)
    fun, jac = _residual_fn(g, Phi, "Fhat", p)
    out = _newton(fun, jac, cfg.start(g, p), cfg.newton_tol, cfg.max_newton_iters, cfg.box)
    ratios = [None] + _ratios_to_limit(out.iterates, out.r)
    succ = [0.0] + [_inf(b - a) for a, b in zip(out.iterates[:-1], out.iterates[1:])]
    return SolveReport(
        method="newton",
        status=out.status,
        r=out.r.copy(),
        residuals=tuple(out.residuals),
        steps=tuple(range(len(out.residuals))),
        ratios=tuple(ratios),
        successive=tuple(succ),
        in_box=tuple(_inside(x, cfg.box) for x in out.iterates),
    )


# ---------------------------------------------------------------------------
# homotopy


def homotopy_residual(g: ChainGeometry, r, t: float, Phi, p: PairPotential = LJ) -> np.ndarray:
    """``h(r, t) = (1-t)(psi_hat^L(r) - Phi) + t(psi_hat^F(r) - Phi)``."""
    r = check_strain(g, r)
    Phi = _check_phi(g, Phi)
    loc = conjugate.evaluate(g, r, "L", p)
    full = conjugate.evaluate(g, r, "Fhat", p)
    return (1 - t) * (loc - Phi) + t * (full - Phi)


def solve_local(g: ChainGeometry, Phi, bracket: tuple[float, float] | None = None,
                p: PairPotential = LJ) -> np.ndarray:
    """Solve the decoupled system ``eta_hat(r_j) = Phi_j`` component by component.

    ``eta_hat`` is increasing below ``a1``, so each component has at most one
    root in ``bracket`` (default ``(r2/2, a1)``).
    """
    Phi = _check_phi(g, Phi)
    if bracket is None:
        radii = default_radii(p)
        bracket = (radii.half_r2, radii.a1)
    lo, hi = bracket
    cache: dict[float, float] = {}
    r = np.empty_like(Phi)
    for k, phi in enumerate(Phi):
        if phi not in cache:
            cache[phi] = find_root(lambda x: p.eta_hat(x) - phi, lo, hi)
        r[k] = cache[phi]
    return r


def homotopy_solve(g: ChainGeometry, Phi, cfg: SolverConfig = SolverConfig(), p: PairPotential = LJ) -> SolveReport:
    """Continue ``h(r, t) = 0`` from the local solution at ``t = 0`` to ``t = 1``."""
    Phi = _check_phi(g, Phi)
    _certify(Phi, cfg)
    try:
        r = solve_local(g, Phi, cfg.box, p)
    except NoBracket as exc:
        raise ContinuationStalled(f"local system has no root at t=0: {exc}") from exc

    tl, jl = conjugate.table_for(g, "L"), conjugate.table_for(g, "Fhat")

    def system(t):
        def fun(x):
            return (1 - t) * tl.evaluate(p.eta, x)[:-1] + t * jl.evaluate(p.eta, x)[:-1] - Phi

        def jac(x):
            return (1 - t) * tl.jacobian(p.eta_prime, x)[:-1] + t * jl.jacobian(p.eta_prime, x)[:-1]

        return fun, jac

    base = 1.0 / cfg.homotopy_steps
    t, dt = 0.0, base
    ts = [0.0]
    residuals = [_inf(system(0.0)[0](r))]
    in_box = [_inside(r, cfg.box)]
    iterates = [r.copy()]
    while t < 1.0:
        t_next = min(1.0, t + dt)
        if 1.0 - t_next < 1e-14:
            t_next = 1.0
        fun, jac = system(t_next)
        out = _newton(fun, jac, r, cfg.newton_tol, cfg.max_newton_iters, cfg.box)
        if out.status is not Status.CONVERGED:
            if dt / 2 < MIN_HOMOTOPY_STEP:
                raise ContinuationStalled(
                    f"Newton correction failed at t={t_next:.6g} ({out.status.value}) with step {dt:.3g}")
            dt /= 2
            continue
        t, r = t_next, out.r
        ts.append(t)
        residuals.append(out.residuals[-1])
        in_box.append(_inside(r, cfg.box))
        iterates.append(r.copy())
        dt = min(base, 2 * dt)

    ratios = [None] + _ratios_to_limit(iterates, r)
    succ = [0.0] + [_inf(b - a) for a, b in zip(iterates[:-1], iterates[1:])]
    return SolveReport(
        method="homotopy",
        status=Status.CONVERGED,
        r=r.copy(),
        residuals=tuple(residuals),
        steps=tuple(range(len(ts))),
        ratios=tuple(ratios),
        successive=tuple(succ),
        in_box=tuple(in_box),
        t_values=tuple(ts),
    )


# ---------------------------------------------------------------------------
# ghost force iteration


def ghost_force_iteration(g: ChainGeometry, Phi, cfg: SolverConfig = SolverConfig(),
                          p: PairPotential = LJ) -> SolveReport:
    """Fixed-point iteration ``psi_hat^E(r^{n+1}) = Phi - psi_hat^G(r^n)``.

    Each outer step is solved by Newton to ``cfg.inner_tol``.  History rows
    start at outer step 1; ratios to the limit are filled in after the run.
    """
    Phi = _check_phi(g, Phi)
    _certify(Phi, cfg)
    te = conjugate.table_for(g, "E")
    tg = conjugate.table_for(g, "Ghat")
    fun_f, _ = _residual_fn(g, Phi, "Fhat", p)

    r = cfg.start(g, p)
    iterates = [r.copy()]
    residuals, succ, in_box = [], [], []
    status = Status.MAX_ITERS
    for n in range(cfg.max_gfi_iters):
        rhs = Phi - tg.evaluate(p.eta, r)[:-1]

        def fun(x, rhs=rhs):
            return te.evaluate(p.eta, x)[:-1] - rhs

        def jac(x):
            return te.jacobian(p.eta_prime, x)[:-1]

        inner = _newton(fun, jac, r, cfg.inner_tol, cfg.max_newton_iters)
        if inner.status is not Status.CONVERGED:
            raise InnerSolveFailed(f"inner solve at outer step {n + 1} ended with {inner.status.value}")
        r_next = inner.r
        succ.append(_inf(r_next - r))
        residuals.append(_safe_norm(fun_f, r_next))
        in_box.append(_inside(r_next, cfg.box))
        iterates.append(r_next.copy())
        r = r_next
        if not in_box[-1]:
            status = Status.LEFT_REGION
            break
        if succ[-1] <= cfg.gfi_tol:
            status = Status.CONVERGED
            break

    ratios = _ratios_to_limit(iterates, r) if status is Status.CONVERGED else [None] * len(residuals)
    return SolveReport(
        method="gfi",
        status=status,
        r=r.copy(),
        residuals=tuple(residuals),
        steps=tuple(range(1, len(residuals) + 1)),
        ratios=tuple(ratios),
        successive=tuple(succ),
        in_box=tuple(in_box),
    )


SOLVERS = {
    "newton": newton_solve,
    "homotopy": homotopy_solve,
    "gfi": ghost_force_iteration,
}


def solve(method: str, g: ChainGeometry, Phi, cfg: SolverConfig = SolverConfig(), p: PairPotential = LJ) -> SolveReport:
    try:
        fn = SOLVERS[method]
    except KeyError:
        raise ValueError(f"unknown solver {method!r}; expected one of {sorted(SOLVERS)}") from None
    return fn(g, Phi, cfg, p)
