"""Acceptance criteria, one test each.

Every test prints a single PASS/FAIL line (also repeated in the terminal
summary) and then asserts the same condition at the stated tolerance.
"""

import time

import numpy as np

from conftest import ACCEPTANCE_LINES
from helpers import fd_gradient, fd_jacobian, rel_err
from qcf import conjugate as C
from qcf import models as M
from qcf.analysis import contraction_bound, lj_contraction_region, lj_existence_region
from qcf.chain import ChainGeometry, aggregate_loads, positions_from_strain, strain_from_positions
from qcf.models import ModelKind
from qcf.potential import LennardJones, critical_radii, default_radii
from qcf.sampling import random_geometry, random_positions, rng as make_rng, symmetric_vector
from qcf.solvers import SolverConfig, ghost_force_iteration, homotopy_solve, jacobian, newton_solve

LJ = LennardJones()


def record(n: int, title: str, checks: dict[str, bool], detail: str = "") -> None:
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    line = f"criterion {n} {'PASS' if ok else 'FAIL'}: {title}"
    if detail:
        line += f" | {detail}"
    if failed:
        line += f" | failed: {', '.join(failed)}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_criterion_1_critical_constants():
    t0 = time.perf_counter()
    radii = critical_radii(LJ)
    eh = float(LJ.eta_hat(radii.a1))
    elapsed = time.perf_counter() - t0
    record(1, "critical constants", {
        "a1": abs(radii.a1 - 1.1059) <= 5e-4,
        "r2/2": abs(radii.half_r2 - 0.6085) <= 5e-4,
        "eta_hat(a1)": abs(eh - 2.781) <= 5e-3,
        "runtime": elapsed < 1.0,
    }, f"a1={radii.a1:.8f} r2/2={radii.half_r2:.8f} eta_hat(a1)={eh:.6f} t={elapsed:.3f}s")


def test_criterion_2_ghost_force_table():
    N, K = 8, 4
    g = ChainGeometry(N, K)
    a = default_radii(LJ).a0
    r = np.full(g.n_strain, a)
    h = 0.5 * float(LJ.eta(2 * a))
    expect = np.zeros(2 * N + 2)
    pattern = {-K - 1: h, -K: -h, -K + 1: -h, -K + 2: h, K - 1: -h, K: h, K + 1: h, K + 2: -h}
    for j, v in pattern.items():
        expect[j + N] = v
    expect[0], expect[-1] = LJ.eta_hat(a), -LJ.eta_hat(a)
    qce = M.force_qce(g, r, LJ)
    qcf = M.force_qcf(g, r, LJ)
    e_qce = float(np.max(np.abs(qce - expect)))
    e_qcf = float(np.max(np.abs(qcf[1:-1])))
    record(2, "ghost-force table at a0 (K=4, N=8)", {
        "F_qce pattern": e_qce <= 1e-12,
        "F_qcf interior zero": e_qcf <= 1e-12,
    }, f"eta(2a0)/2={h:.6e} qce err={e_qce:.1e} qcf interior={e_qcf:.1e}")


def test_criterion_3_nonconservativity():
    g = ChainGeometry(8, 4)
    N, K, hstep = g.N, g.K, 1e-6
    gen = make_rng()
    worst_fd, min_gap = 0.0, np.inf
    ok_formula = True
    for rK in np.linspace(0.9, 1.1, 21):
        r = gen.uniform(0.97, 1.03, g.n_strain)
        r[K + N] = rK
        a, b = M.nonconservativity_witness(g, r, LJ)
        ok_formula &= a == LJ.eta_prime(rK) and abs(b - (LJ.eta_prime(rK) + 4 * LJ.eta_prime(2 * rK))) <= 1e-12 * abs(b)
        z = positions_from_strain(g, r)

        def d(row, col):
            zp, zm = z.copy(), z.copy()
            zp[col + N] += hstep
            zm[col + N] -= hstep
            fp = M.force_qcf(g, strain_from_positions(g, zp), LJ)[row + N]
            fm = M.force_qcf(g, strain_from_positions(g, zm), LJ)[row + N]
            return (fp - fm) / (2 * hstep)

        worst_fd = max(worst_fd, abs(d(K, K + 1) - a) / abs(a), abs(d(K + 1, K) - b) / abs(b))
        min_gap = min(min_gap, abs(b - a))
    record(3, "nonconservativity witness", {
        "analytic partials": bool(ok_formula),
        "FD agreement": worst_fd <= 1e-6,
        "4 eta'(2 r_K) nonzero": min_gap > 0,
    }, f"FD rel err={worst_fd:.1e} min |4 eta'(2r_K)|={min_gap:.3e}")


def test_criterion_4_existence_region():
    t0 = time.perf_counter()
    cert = lj_existence_region(1.0883)
    c = cert.symmetric_bound
    opt = lj_existence_region()
    g = ChainGeometry(12, 4)
    gen = make_rng()
    worst_agree = worst_eq = 0.0
    all_conv = in_box = True
    for _ in range(20):
        Phi = symmetric_vector(g, -c, c, gen)
        nr = newton_solve(g, Phi, SolverConfig(), LJ)
        hr = homotopy_solve(g, Phi, SolverConfig(), LJ)
        all_conv &= nr.converged and hr.converged
        worst_agree = max(worst_agree, float(np.max(np.abs(nr.r - hr.r))))
        f = np.diff(np.concatenate(([0.0], -Phi, [0.0])))  # f_j = Phi_{j-1} - Phi_j
        worst_eq = max(worst_eq, float(np.max(np.abs(M.force_qcf(g, nr.r, LJ) + f))))
        in_box &= bool(np.all((nr.r > cert.r_L) & (nr.r < cert.r_U)))
    elapsed = time.perf_counter() - t0
    record(4, "existence region and solves", {
        "r_L <= 0.9701": cert.r_L <= 0.9700 + 1e-4,
        "interval contains (-2.62, 2.62)": cert.phi_lo <= -2.62 and cert.phi_hi >= 2.62,
        "both converge": all_conv,
        "agree 1e-10": worst_agree <= 1e-10,
        "F_qcf + f = 0": worst_eq <= 1e-10,
        "solutions in box": in_box,
        "runtime": elapsed < 10.0,
    }, (f"r_L={cert.r_L:.8f} Phi=({cert.phi_lo:.7f}, {cert.phi_hi:.7f}) agree={worst_agree:.1e} "
        f"eq={worst_eq:.1e} t={elapsed:.2f}s; optimized r_U={opt.r_U:.10f} gives r_L={opt.r_L:.7f} "
        f"c={opt.symmetric_bound:.7f}"))


def test_criterion_5_contraction_region():
    cert, est = lj_contraction_region(0.5)
    g = ChainGeometry.uniform(12, 4, 2)
    gen = make_rng()
    c = cert.symmetric_bound
    worst_ratio = 0.0
    all_conv = stays = True
    for _ in range(20):
        Phi = symmetric_vector(g, -c, c, gen)
        r0 = symmetric_vector(g, cert.r_L, cert.r_U, gen)
        rep = ghost_force_iteration(g, Phi, SolverConfig(initial_strain=r0, box=(cert.r_L, cert.r_U)), LJ)
        all_conv &= rep.converged
        stays &= all(rep.in_box)
        worst_ratio = max([worst_ratio] + [x for x in rep.ratios if x is not None])
    s = abs(LJ.eta_prime(2 * cert.r_L))
    bound = 8 * s / (LJ.eta_prime(cert.r_U) - 5 * s)
    record(5, "contraction region and GFI", {
        "box contains (0.9706, 1.0771)": cert.contains_box(0.9706, 1.0771),
        "interval contains (-2.56, 2.56)": cert.phi_lo <= -2.56 and cert.phi_hi >= 2.56,
        "GFI converges": all_conv,
        "ratios <= 0.5": worst_ratio <= 0.5 + 1e-9,
        "iterates in box": stays,
        "theoretical bound <= 0.5": bound <= 0.5 and abs(bound - est.bound) <= 1e-14,
    }, f"box=({cert.r_L:.7f}, {cert.r_U:.7f}) c={c:.6f} bound={bound:.6f} max ratio={worst_ratio:.4f}")


def test_criterion_6_constrained_oracle():
    gen = make_rng()
    worst = 0.0
    for _ in range(200):
        g = random_geometry(gen, n_max=10, nu_max=4)
        z = random_positions(g, gen)
        e1 = M.energy_constrained(g, z, LJ)
        e2 = M.energy_constrained_direct(g, z, LJ)
        worst = max(worst, abs(e1 - e2) / abs(e2))
    record(6, "constrained energy partition vs direct sum (200 geometries)",
           {"relative 1e-12": worst <= 1e-12}, f"max rel err={worst:.1e}")


def test_criterion_7_gradient_suite():
    gen = make_rng()
    worst = {k: 0.0 for k in ("atomistic", "constrained", "local", "qce")}
    for _ in range(200):
        g = random_geometry(gen, n_max=8)
        z = random_positions(g, gen)
        r = strain_from_positions(g, z)
        y = np.cumsum(gen.uniform(0.9, 1.2, 14))
        worst["atomistic"] = max(worst["atomistic"], rel_err(
            M.force_atomistic(np.diff(y), LJ), -fd_gradient(lambda x: M.energy_atomistic(x, LJ), y)))
        for name, kind in (("constrained", ModelKind.CONSTRAINED), ("local", ModelKind.LOCAL),
                           ("qce", ModelKind.QCE)):
            F = M.force(kind, g, r, LJ)
            worst[name] = max(worst[name], rel_err(F, -fd_gradient(lambda x: M.energy(kind, g, x, LJ), z)))
    jworst = {k: 0.0 for k in ("E", "Fhat", "Ghat")}
    for _ in range(50):
        g = random_geometry(gen, n_max=9)
        r = gen.uniform(0.9, 1.15, g.n_strain)
        for v in jworst:
            J = jacobian(g, r, v, LJ)
            Jfd = fd_jacobian(lambda x: C.evaluate(g, x, v, LJ), r)
            jworst[v] = max(jworst[v], float(np.max(np.abs(J - Jfd)) / max(1.0, np.max(np.abs(J)))))
    checks = {f"force {k}": v <= 1e-6 for k, v in worst.items()}
    checks.update({f"jacobian {k}": v <= 1e-6 for k, v in jworst.items()})
    detail = " ".join(f"{k}={v:.1e}" for k, v in {**worst, **jworst}.items())
    record(7, "force and Jacobian FD checks", checks, detail)


def test_criterion_8_symmetry():
    gen = make_rng()
    cert, _ = lj_contraction_region(0.5)
    worst_sol = worst_it = 0.0
    for coarsen in (1, 2, 3):
        g = ChainGeometry.uniform(10, 4, coarsen)
        for _ in range(4):
            half = gen.uniform(-0.3, 0.3, g.M + 1)
            half[-1] = gen.uniform(0.5, 2.0)  # end tension dominates
            ft = np.concatenate((-half[::-1], half))
            Phi = aggregate_loads(g, ft).Phi
            if np.max(np.abs(Phi)) > 2.0:  # keep the load inside the existence interval
                ft = ft * (2.0 / np.max(np.abs(Phi)))
                Phi = aggregate_loads(g, ft).Phi
            rep = newton_solve(g, Phi, SolverConfig(), LJ)
            assert rep.converged
            worst_sol = max(worst_sol, float(np.max(np.abs(rep.r - rep.r[::-1]))))
            r0 = symmetric_vector(g, cert.r_L, cert.r_U, gen)
            full = ghost_force_iteration(g, Phi, SolverConfig(initial_strain=r0), LJ)
            for n in range(1, len(full.residuals) + 1):
                it = ghost_force_iteration(g, Phi, SolverConfig(initial_strain=r0, max_gfi_iters=n), LJ).r
                worst_it = max(worst_it, float(np.max(np.abs(it - it[::-1]))))
    record(8, "anti-symmetric loads give symmetric solutions and GFI iterates", {
        "solutions 1e-13": worst_sol <= 1e-13,
        "GFI iterates 1e-13": worst_it <= 1e-13,
    }, f"solution asym={worst_sol:.1e} iterate asym={worst_it:.1e}")


def test_criterion_9_conjugate_identities():
    gen = make_rng()
    worst = dict(prefix=0.0, diff=0.0, hat=0.0, resultant=0.0)
    for coarsen in (1, 2):
        g = ChainGeometry.uniform(10, 4, coarsen)
        for _ in range(10):
            Phi = symmetric_vector(g, -2.0, 2.0, gen)
            rep = newton_solve(g, Phi, SolverConfig(), LJ)
            assert rep.converged
            r = rep.r
            for psi, F in ((C.psi_e(g, r, LJ), M.force_qce(g, r, LJ)),
                           (C.psi_f(g, r, LJ), M.force_qcf(g, r, LJ)),
                           (C.psi_local(g, r, LJ), M.force_local(g, r, LJ))):
                worst["prefix"] = max(worst["prefix"], float(np.max(np.abs(psi.extended()[1:] - np.cumsum(F)))))
                worst["diff"] = max(worst["diff"], float(np.max(np.abs(psi.differences() - F))))
            lhs = C.psi_f_hat(g, r, LJ).values
            rhs = C.psi_e(g, r, LJ).values + C.psi_g_hat(g, r, LJ).values
            worst["hat"] = max(worst["hat"], float(np.max(np.abs(lhs - rhs))))
            worst["resultant"] = max(worst["resultant"], abs(C.check_no_resultant(g, r, LJ)))
    record(9, "conjugate identities on solved instances",
           {k: v <= 1e-12 for k, v in worst.items()},
           " ".join(f"{k}={v:.1e}" for k, v in worst.items()))
