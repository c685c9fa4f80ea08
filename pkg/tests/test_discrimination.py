import cvxpy as cp
import numpy as np
import pytest
from numpy.testing import assert_allclose

from coherence_duality import discrimination as dc, qmath, state_prep as sp
from coherence_duality.measures import path_coherence
from coherence_duality.qmath import H, V


def ensemble_of(priors, kets):
    return dc.DetectorEnsemble(np.asarray(priors, float), [qmath.density_from_ket(k) for k in kets])


def projective_sweep_oracle(ens, n_grid=400):
    # best two-outcome projective qubit measurement over a Bloch-sphere grid
    w1, w2 = ens.weighted()
    best = 0.0
    for th in np.linspace(0, np.pi, n_grid // 4):
        for ph in np.linspace(0, 2 * np.pi, n_grid, endpoint=False):
            u = np.array([np.cos(th / 2), np.exp(1j * ph) * np.sin(th / 2)])
            pi1 = qmath.projector(u)
            ps = np.trace(pi1 @ w1).real + np.trace((np.eye(2) - pi1) @ w2).real
            best = max(best, ps)
    return best


def sdp_oracle(ens):
    # minimum-error discrimination as a semidefinite program
    d = ens.dim
    els = [cp.Variable((d, d), hermitian=True) for _ in range(ens.n)]
    cons = [e >> 0 for e in els] + [sum(els) == np.eye(d)]
    obj = cp.Maximize(cp.real(sum(cp.trace(e @ w) for e, w in zip(els, ens.weighted()))))
    prob = cp.Problem(obj, cons)
    prob.solve(solver=cp.CLARABEL)
    return prob.value


def trine():
    return [np.array([np.cos(k * np.pi / 3), np.sin(k * np.pi / 3)]) for k in range(3)]


class TestExtractEnsemble:
    def test_round_trip(self, rng):
        p = rng.dirichlet([1, 1, 1])
        dets = [qmath.rand_haar_state(2, rng) for _ in range(3)]
        ens = dc.extract_ensemble(sp.build_path_detector_state(p, dets), 3)
        assert_allclose(ens.priors, p, atol=1e-12)
        for rho, eta in zip(ens.states, dets):
            assert_allclose(rho, qmath.density_from_ket(eta), atol=1e-12)

    def test_class_iii(self):
        ens = dc.extract_ensemble(sp.prepare(sp.state_class("III"), 0.3))
        for rho in ens.states:
            assert_allclose(rho, qmath.projector(H), atol=1e-14)

    def test_class_i_overlap(self):
        ps = sp.prepare(sp.state_class("I"), np.pi / 8)
        ens = dc.extract_ensemble(ps)
        t_h, t_v = sp.state_class("I").channel.t_h, sp.state_class("I").channel.t_v
        expected = (t_h ** 8 - t_v ** 8) / (t_h ** 8 + t_v ** 8)
        overlap = np.sqrt(np.trace(ens.states[0] @ ens.states[1]).real)
        assert overlap == pytest.approx(expected, abs=1e-12)

    def test_zero_prior_flagged(self):
        ens = dc.extract_ensemble(sp.prepare(sp.state_class("III"), 0.0))
        assert ens.empty == (True, False)
        assert_allclose(ens.states[0], np.eye(2) / 2)
        assert ens.priors[0] == 0


class TestHelstrom:
    def test_orthogonal(self):
        assert dc.helstrom_success(ensemble_of([0.5, 0.5], [H, V])) == pytest.approx(1)

    def test_identical(self):
        assert dc.helstrom_success(ensemble_of([0.3, 0.7], [H, H])) == pytest.approx(0.7)

    def test_overlap_root_half(self):
        ens = ensemble_of([0.5, 0.5], [H, qmath.D])
        expected = 0.5 * (1 + np.sqrt(0.5))
        assert dc.helstrom_success(ens) == pytest.approx(expected, abs=1e-12)
        assert dc.helstrom_success(ens) == pytest.approx(0.85355, abs=1e-5)
        assert projective_sweep_oracle(ens) == pytest.approx(expected, abs=1e-4)

    def test_pure_closed_form(self, rng):
        for _ in range(20):
            p = rng.dirichlet([1, 1])
            k1, k2 = qmath.rand_haar_state(2, rng), qmath.rand_haar_state(2, rng)
            ens = ensemble_of(p, [k1, k2])
            assert dc.helstrom_success(ens) == pytest.approx(
                dc.helstrom_success_pure(p[0], p[1], abs(np.vdot(k1, k2))), abs=1e-12)
            assert dc.helstrom_success(ens) >= max(p) - 1e-12

    def test_mixed_vs_sdp(self, rng):
        for _ in range(5):
            ens = dc.DetectorEnsemble(rng.dirichlet([1, 1]),
                                      [qmath.rand_density_matrix(3, rng=rng) for _ in range(2)])
            assert dc.helstrom_success(ens) == pytest.approx(sdp_oracle(ens), abs=1e-6)

    def test_needs_two(self):
        with pytest.raises(ValueError):
            dc.helstrom_success(ensemble_of(np.full(3, 1 / 3), trine()))


class TestHelstromPovm:
    def test_orthogonal(self):
        povm = dc.helstrom_povm(ensemble_of([0.5, 0.5], [H, V]))
        assert_allclose(povm.elements[0], qmath.projector(H), atol=1e-15)
        assert_allclose(povm.elements[1], qmath.projector(V), atol=1e-15)

    def test_identical_tie_break(self):
        povm = dc.helstrom_povm(ensemble_of([0.5, 0.5], [H, H]))
        assert_allclose(povm.elements[0], np.eye(2), atol=1e-15)
        assert_allclose(povm.elements[1], np.zeros((2, 2)), atol=1e-15)

    def test_success_matches(self, rng):
        for _ in range(50):
            ens = dc.DetectorEnsemble(rng.dirichlet([1, 1]),
                                      [qmath.rand_density_matrix(2, rng=rng) for _ in range(2)])
            assert dc.povm_success(ens, dc.helstrom_povm(ens)) == pytest.approx(
                dc.helstrom_success(ens), abs=1e-10)

    def test_class_iii_sweep(self):
        for theta in sp.theta_grid():
            ens = dc.extract_ensemble(sp.prepare(sp.state_class("III"), theta))
            assert abs(dc.povm_success(ens, dc.helstrom_povm(ens)) - dc.helstrom_success(ens)) < 1e-10


class TestPovmSuccess:
    def test_identical_states(self, rng):
        rho = qmath.rand_density_matrix(2, rng=rng)
        ens = dc.DetectorEnsemble(np.array([0.5, 0.5]), [rho, rho])
        g = qmath.rand_density_matrix(2, rng=rng)
        povm = dc.PovmSet([g, np.eye(2) - g])
        assert dc.povm_success(ens, povm) == pytest.approx(0.5)

    def test_computational_basis(self):
        povm = dc.PovmSet([qmath.projector(H), qmath.projector(V)])
        assert dc.povm_success(ensemble_of([0.4, 0.6], [H, V]), povm) == pytest.approx(1)

    def test_trivial(self):
        povm = dc.PovmSet([np.eye(2), np.zeros((2, 2))])
        assert dc.povm_success(ensemble_of([0.7, 0.3], [H, V]), povm) == pytest.approx(0.7)

    def test_invalid(self):
        ens = ensemble_of([0.5, 0.5], [H, V])
        with pytest.raises(ValueError):
            dc.povm_success(ens, dc.PovmSet([np.eye(2), np.eye(2)]))
        with pytest.raises(ValueError):
            dc.povm_success(ens, dc.PovmSet([np.diag([1.5, 1]), np.diag([-0.5, 0])]))
        with pytest.raises(ValueError):
            dc.povm_success(ens, dc.PovmSet([np.eye(2)]))


class TestOptimizePovm:
    def test_matches_helstrom(self, rng):
        for _ in range(100):
            p = rng.dirichlet([1, 1])
            ens = ensemble_of(p, [qmath.rand_haar_state(2, rng) for _ in range(2)])
            povm, ps = dc.optimize_povm(ens)
            assert ps == pytest.approx(dc.helstrom_success(ens), abs=1e-6)
            assert ps >= dc.helstrom_success(ens) - 1e-8
            povm.validate()

    def test_orthogonal_three(self):
        basis = list(np.eye(3))
        _, ps = dc.optimize_povm(ensemble_of(np.full(3, 1 / 3), basis))
        assert ps == pytest.approx(1, abs=1e-10)

    def test_trine(self):
        ens = ensemble_of(np.full(3, 1 / 3), trine())
        povm, ps = dc.optimize_povm(ens)
        assert ps == pytest.approx(2 / 3, abs=1e-10)
        assert sdp_oracle(ens) == pytest.approx(2 / 3, abs=1e-6)
        assert povm.converged

    def test_random_vs_sdp(self, rng):
        for n, d in [(3, 2), (3, 3), (4, 3)]:
            ens = dc.DetectorEnsemble(rng.dirichlet(np.ones(n)),
                                      [qmath.rand_density_matrix(d, rng=rng) for _ in range(n)])
            _, ps = dc.optimize_povm(ens)
            assert ps == pytest.approx(sdp_oracle(ens), abs=1e-5)

    def test_optimality_certificate(self, rng):
        # Lambda = sum_i p_i rho_i Pi_i must dominate every p_j rho_j at the optimum
        ens = ensemble_of(rng.dirichlet(np.ones(3)), [qmath.rand_haar_state(2, rng) for _ in range(3)])
        povm, _ = dc.optimize_povm(ens)
        lam = sum(w @ e for w, e in zip(ens.weighted(), povm.elements))
        lam = (lam + lam.conj().T) / 2
        for w in ens.weighted():
            assert np.linalg.eigvalsh(lam - w).min() > -1e-6

    def test_non_convergence_flag(self, rng):
        ens = ensemble_of(rng.dirichlet(np.ones(3)), [qmath.rand_haar_state(2, rng) for _ in range(3)])
        povm, ps = dc.optimize_povm(ens, max_iters=1, tol=0)
        assert not povm.converged
        assert 0 < ps <= 1


class TestDualityPoint:
    def test_class_iii_balanced(self):
        pt = dc.duality_point(sp.prepare(sp.state_class("III"), np.pi / 8))
        assert (pt.coherence, pt.path_info) == pytest.approx((0.5, 0), abs=1e-12)
        assert pt.sum_of_squares == pytest.approx(0.25)

    def test_orthogonal(self):
        pt = dc.duality_point(sp.build_path_detector_state([0.5, 0.5], [H, V]))
        assert (pt.coherence, pt.path_info, pt.sum_of_squares) == pytest.approx((0, 0.5, 0.25))

    def test_class_i_equality(self):
        assert abs(dc.duality_point(sp.prepare(sp.state_class("I"), 0)).sum_of_squares - 0.25) < 1e-9

    def test_haar_bagan_equality(self, rng):
        for _ in range(200):
            pt = dc.duality_point(qmath.rand_haar_state(4, rng))
            assert abs(pt.sum_of_squares - 0.25) < 1e-9

    def test_three_path_inequality(self, rng):
        for _ in range(50):
            psi = sp.build_path_detector_state(rng.dirichlet(np.ones(3)),
                                               [qmath.rand_haar_state(3, rng) for _ in range(3)])
            pt = dc.duality_point(psi, 3)
            assert pt.sum_of_squares <= 4 / 9 + 1e-9
            assert 0 <= pt.path_info <= 2 / 3 + 1e-12

    def test_mixed_state_strict(self):
        ps = sp.prepare(sp.state_class("I"), 0.2, sp.SourceSpec(noise_weight=0.1))
        pt = dc.duality_point(ps)
        assert pt.sum_of_squares < 0.25

    @pytest.mark.parametrize("label", ["I", "II", "III"])
    def test_monotone_away_from_balance(self, label):
        pts = [dc.duality_point(sp.prepare(sp.state_class(label), th)) for th in sp.theta_grid()]
        for side in (lambda z: z <= 1, lambda z: z >= 1):
            sel = sorted((p for p in pts if side(p.zeta)), key=lambda p: abs(np.log(max(p.zeta, 1e-300))))
            cs = [p.coherence for p in sel]
            ps = [p.path_info for p in sel]
            assert np.all(np.diff(cs) <= 1e-12)
            assert np.all(np.diff(ps) >= -1e-12)

    def test_coherence_ceiling_grows_with_class(self):
        ceiling = {lab: max(path_coherence(sp.prepare(sp.state_class(lab), th)).c_normalized
                            for th in sp.theta_grid()) for lab in ("I", "II", "III")}
        assert ceiling["I"] < ceiling["II"] < ceiling["III"] == pytest.approx(0.5)
