import json

import numpy as np
import pytest

from helpers import fd_jacobian
from qcf import conjugate as C
from qcf import models as M
from qcf.analysis import diag_dominance_margin, lj_contraction_region, lj_existence_region
from qcf.chain import ChainGeometry, forces_from_potential, tension_load
from qcf.errors import ContinuationStalled, InnerSolveFailed, OutsideBounds
from qcf.potential import LennardJones, PairPotential
from qcf.sampling import random_geometry, symmetric_vector, symmetrize
from qcf.solvers import (
    SolverConfig,
    SolveReport,
    Status,
    ghost_force_iteration,
    homotopy_residual,
    homotopy_solve,
    jacobian,
    newton_solve,
    solve,
    solve_local,
)


@pytest.fixture(scope="module")
def existence():
    return lj_existence_region(1.0883)


@pytest.fixture(scope="module")
def contraction():
    return lj_contraction_region(0.5)


# -- Jacobians ----------------------------------------------------------------


@pytest.mark.parametrize("variant", ["Fhat", "E", "Ghat", "L", "F"])
def test_jacobian_fd(variant, rng, lj):
    for _ in range(10):
        g = random_geometry(rng, n_max=9)
        r = rng.uniform(0.9, 1.15, g.n_strain)
        J = jacobian(g, r, variant, lj)
        Jfd = fd_jacobian(lambda x: C.evaluate(g, x, variant, lj), r)
        assert np.max(np.abs(J - Jfd)) / max(1.0, np.max(np.abs(J))) < 1e-6


def test_jacobian_identity_and_structure(rng, lj):
    g = ChainGeometry(10, 4)
    r = rng.uniform(0.9, 1.15, g.n_strain)
    JF, JE, JG = (jacobian(g, r, v, lj) for v in ("Fhat", "E", "Ghat"))
    assert np.max(np.abs(JF - JE - JG)) < 1e-12
    N, K = g.N, g.K
    for i in list(range(-N, -K + 1)) + list(range(K, N + 1)):
        row = JF[i + N]
        assert row[i + N] == pytest.approx(lj.eta_hat_prime(r[i + N]), rel=1e-14)
        assert np.count_nonzero(row) == 1
    # atomistic rows couple to columns K-1, K, K+1 beyond the band
    for i in range(-K + 1, K):
        nz = set(np.flatnonzero(JF[i + N]) - N)
        assert nz <= set(range(i - 1, i + 2)) | {K - 1, K, K + 1}
        assert {K - 1, K, K + 1} <= nz | set(range(i - 1, i + 2))


def test_jacobian_shape(lj):
    g = ChainGeometry(6, 3)
    assert jacobian(g, np.ones(13), "Fhat", lj).shape == (13, 13)


# -- Newton -------------------------------------------------------------------


def test_newton_zero_load_from_box(rng, lj, radii, existence):
    g = ChainGeometry(8, 4)
    for _ in range(5):
        r0 = rng.uniform(existence.r_L, existence.r_U, g.n_strain)
        rep = newton_solve(g, np.zeros(g.n_strain), SolverConfig(initial_strain=r0), lj)
        assert rep.status is Status.CONVERGED
        assert np.max(np.abs(rep.r - radii.a0)) < 1e-12


def test_newton_uniform_load(lj):
    g = ChainGeometry.uniform(10, 4, 2)
    rstar = 1.05
    c = lj.eta_hat(rstar)
    assert np.allclose(C.evaluate(g, np.full(g.n_strain, rstar), "Fhat", lj) - c, 0, atol=1e-14)
    rep = newton_solve(g, np.full(g.n_strain, c), SolverConfig(), lj)
    assert rep.converged
    assert np.max(np.abs(rep.r - rstar)) < 1e-12


def test_newton_antisymmetric_end_loads(lj, existence):
    g = ChainGeometry.uniform(12, 4, 3)
    load = tension_load(g, 2.0)
    rep = newton_solve(g, load.Phi, SolverConfig(), lj)
    assert rep.converged
    assert np.max(np.abs(rep.r - rep.r[::-1])) < 1e-13
    assert np.all((rep.r > existence.r_L) & (rep.r < existence.r_U))
    assert np.max(np.abs(M.force_qcf(g, rep.r, lj) + load.f)) < 1e-10


def test_newton_history_rows(lj, radii):
    g = ChainGeometry(6, 3)
    rep = newton_solve(g, np.zeros(g.n_strain), SolverConfig(), lj)
    assert rep.steps == (0,) and len(rep.residuals) == 1


def test_newton_max_iters_and_left_region(lj):
    g = ChainGeometry(6, 3)
    Phi = np.full(g.n_strain, 2.0)
    rep = newton_solve(g, Phi, SolverConfig(max_newton_iters=1), lj)
    assert rep.status is Status.MAX_ITERS
    rep = newton_solve(g, Phi, SolverConfig(box=(0.99, 1.0)), lj)
    assert rep.status is Status.LEFT_REGION
    assert rep.in_box[-1] is False


class Flat(PairPotential):
    """eta is constant, so every Jacobian vanishes."""

    name = "flat"

    def phi(self, r):
        return r

    def eta(self, r):
        return 1.0 + 0 * np.asarray(r, dtype=float)

    def eta_prime(self, r):
        return 0 * np.asarray(r, dtype=float)

    def eta_second(self, r):
        return 0 * np.asarray(r, dtype=float)


def test_jacobian_singular():
    g = ChainGeometry(6, 3)
    rep = newton_solve(g, np.zeros(g.n_strain), SolverConfig(initial_strain=np.ones(g.n_strain)), Flat())
    assert rep.status is Status.JACOBIAN_SINGULAR


def test_outside_bounds(lj, existence):
    g = ChainGeometry(6, 3)
    cfg = SolverConfig(phi_bounds=(existence.phi_lo, existence.phi_hi))
    with pytest.raises(OutsideBounds):
        newton_solve(g, np.full(g.n_strain, existence.phi_hi), cfg, lj)
    with pytest.raises(OutsideBounds):
        homotopy_solve(g, np.full(g.n_strain, 2.7), cfg, lj)


# -- homotopy -----------------------------------------------------------------


def test_homotopy_zero_load(lj, radii):
    g = ChainGeometry(7, 3)
    rep = homotopy_solve(g, np.zeros(g.n_strain), SolverConfig(), lj)
    assert rep.converged and rep.t_values[-1] == 1.0
    assert len(rep.t_values) == 21
    assert np.max(np.abs(rep.r - radii.a0)) < 1e-12


def test_homotopy_matches_newton(lj):
    g = ChainGeometry.uniform(12, 4, 2)
    Phi = np.full(g.n_strain, 2.0)
    cfg = SolverConfig(box=(0.9700, 1.0883))
    h = homotopy_solve(g, Phi, cfg, lj)
    n = newton_solve(g, Phi, SolverConfig(), lj)
    assert h.converged and n.converged
    assert all(h.in_box)
    assert np.max(np.abs(h.r - n.r)) < 1e-10


def test_local_start(rng, lj, existence):
    g = ChainGeometry(8, 4)
    Phi = symmetric_vector(g, -2.5, 2.5, rng)
    r = solve_local(g, Phi, (existence.r_L, existence.r_U), lj)
    assert np.max(np.abs(lj.eta_hat(r) - Phi)) < 1e-12
    assert np.max(np.abs(homotopy_residual(g, r, 0.0, Phi, lj))) < 1e-12


def test_homotopy_stalls_without_local_root(lj):
    g = ChainGeometry(6, 3)
    with pytest.raises(ContinuationStalled):
        homotopy_solve(g, np.full(g.n_strain, 3.5), SolverConfig(), lj)


def test_homotopy_adaptive_steps(lj, existence):
    # one coarse step over the whole path still lands on the same solution
    g = ChainGeometry(8, 3)
    Phi = np.full(g.n_strain, -2.5)
    a = homotopy_solve(g, Phi, SolverConfig(homotopy_steps=1), lj)
    b = newton_solve(g, Phi, SolverConfig(), lj)
    assert np.max(np.abs(a.r - b.r)) < 1e-10


# -- ghost force iteration ----------------------------------------------------


def test_gfi_zero_load_fixed_point(lj, radii):
    g = ChainGeometry(8, 4)
    rep = ghost_force_iteration(g, np.zeros(g.n_strain), SolverConfig(), lj)
    assert rep.converged and rep.steps == (1,)
    assert np.max(np.abs(rep.r - radii.a0)) < 1e-13


def test_gfi_contraction_instance(rng, lj, contraction):
    cert, est = contraction
    assert est.bound <= 0.5
    g = ChainGeometry.uniform(12, 4, 2)
    box = (cert.r_L, cert.r_U)
    for _ in range(5):
        Phi = symmetric_vector(g, -2.56, 2.56, rng)
        r0 = symmetric_vector(g, 0.9706, 1.0771, rng)
        rep = ghost_force_iteration(g, Phi, SolverConfig(initial_strain=r0, box=box), lj)
        assert rep.converged and all(rep.in_box)
        ratios = [x for x in rep.ratios if x is not None]
        assert ratios and max(ratios) <= 0.5
        assert max(ratios) <= est.bound + 1e-9
        n = newton_solve(g, Phi, SolverConfig(), lj)
        assert np.max(np.abs(rep.r - n.r)) < 1e-10
        assert np.max(np.abs(C.evaluate(g, rep.r, "Fhat", lj) - Phi)) < 1e-10
        assert np.max(np.abs(M.force_qcf(g, rep.r, lj) + forces_from_potential(Phi))) < 1e-10


def test_gfi_iterates_symmetric_and_dominant(rng, lj, contraction):
    cert, _ = contraction
    g = ChainGeometry.uniform(10, 4, 3)
    Phi = tension_load(g, -1.3).Phi
    r0 = symmetric_vector(g, cert.r_L, cert.r_U, rng)
    full = ghost_force_iteration(g, Phi, SolverConfig(initial_strain=r0), lj)
    for n in range(1, len(full.residuals) + 1):
        rep = ghost_force_iteration(g, Phi, SolverConfig(initial_strain=r0, max_gfi_iters=n), lj)
        r = rep.r
        assert np.max(np.abs(r - r[::-1])) <= 1e-13
        assert np.all((r > cert.r_L) & (r < cert.r_U))
        assert diag_dominance_margin(g, r, "E", lj) > 0
        assert diag_dominance_margin(g, r, "Fhat", lj) > 0


def test_gfi_max_iters_and_inner_failure(lj):
    g = ChainGeometry(6, 3)
    rep = ghost_force_iteration(g, np.full(g.n_strain, 1.0), SolverConfig(max_gfi_iters=2), lj)
    assert rep.status is Status.MAX_ITERS and all(x is None for x in rep.ratios)
    with pytest.raises(InnerSolveFailed):
        ghost_force_iteration(g, np.full(g.n_strain, 10.0), SolverConfig(), lj)


# -- agreement ----------------------------------------------------------------


def test_cross_solver_agreement(rng, lj, contraction):
    cert, _ = contraction
    for _ in range(50):
        g = random_geometry(rng, n_max=10, nu_max=3)
        Phi = symmetric_vector(g, cert.phi_lo * 0.999, cert.phi_hi * 0.999, rng)
        a = newton_solve(g, Phi, SolverConfig(), lj)
        b = homotopy_solve(g, Phi, SolverConfig(), lj)
        c = ghost_force_iteration(g, Phi, SolverConfig(), lj)
        assert a.converged and b.converged and c.converged
        assert np.max(np.abs(a.r - b.r)) < 1e-10
        assert np.max(np.abs(a.r - c.r)) < 1e-10


def test_small_instance_grid_oracle(lj):
    # minimal legal geometry; scan symmetric uniform-plus-bump strains
    g = ChainGeometry(5, 3)
    c = 1.4
    Phi = np.full(g.n_strain, c)
    rep = newton_solve(g, Phi, SolverConfig(), lj)
    bump = np.zeros(g.n_strain)
    bump[g.N] = 1.0

    def scan(us, bs):
        best = (np.inf, None, None)
        for u in us:
            for b in bs:
                res = np.max(np.abs(C.evaluate(g, u + b * bump, "Fhat", lj) - Phi))
                if res < best[0]:
                    best = (res, u, b)
        return best

    _, u, b = scan(np.arange(0.95, 1.10, 1e-3), np.arange(-0.01, 0.0101, 1e-3))
    _, u, b = scan(np.arange(u - 2e-3, u + 2e-3, 1e-4), np.arange(b - 2e-3, b + 2e-3, 1e-4))
    assert np.max(np.abs(rep.r - (u + b * bump))) <= 1e-4


# -- report -------------------------------------------------------------------


def test_report_round_trip(lj):
    g = ChainGeometry(8, 4)
    rep = ghost_force_iteration(g, np.full(g.n_strain, 1.2), SolverConfig(), lj)
    back = SolveReport.from_dict(json.loads(json.dumps(rep.to_dict())))
    assert back == rep
    assert rep.to_dict()["index_origin"] == -8


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(newton_tol=0)
    with pytest.raises(ValueError):
        SolverConfig(homotopy_steps=0)
    with pytest.raises(ValueError):
        SolverConfig(box=(1.1, 1.0))
    with pytest.raises(ValueError):
        solve("bogus", ChainGeometry(5, 3), np.zeros(11))
