import math

import numpy as np
import pytest

from latdet.bounds import (
    babai_radius,
    ball_volume,
    build_report,
    cover_radii,
    k_const,
    low_snr_node_count,
    r_min_lower_bound,
    relaxed_complexity_upper_bound,
    visitation_check,
)
from latdet.channel import draw, noise_variance, trial_rng
from latdet.constellation import build
from latdet.detectors import problem_from_factors, sesd_finite, sesd_relaxed
from latdet.errors import TooLarge
from latdet.numerics import sqrd


def rand_triangular(rng, m):
    r = np.triu(rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)))
    r[np.diag_indices(m)] = rng.uniform(0.5, 2.0, m)
    return r


class TestKConst:
    def test_unit_box_diagonal(self):
        assert k_const(build(4), 1) == pytest.approx(math.sqrt(2))

    def test_sixteen_qam_m4(self):
        assert k_const(build(16), 4) == pytest.approx(6 * math.sqrt(2))

    def test_rejects_m_zero(self):
        with pytest.raises(ValueError):
            k_const(build(4), 0)

    def test_dominates_sampled_pair_distances(self):
        rng = np.random.default_rng(0)
        cst = build(64)
        m = 3
        k = k_const(cst, m)
        worst = 0.0
        for _ in range(2000):
            a = rng.integers(0, cst.root, (m, 2))
            b = rng.integers(0, cst.root, (m, 2))
            worst = max(worst, np.linalg.norm((a - b) @ [1, 1j]))
        assert worst <= k + 1e-12
        corner = np.full(m, cst.k_max * (1 + 1j))
        origin = np.zeros(m)
        assert np.linalg.norm(corner - origin) == pytest.approx(k)


class TestRMinLowerBound:
    def test_zero_noise(self):
        assert r_min_lower_bound(0.0, 1.5, 4.0) == -6.0

    def test_zero_sigma(self):
        assert r_min_lower_bound(7.25, 0.0, 4.0) == 7.25

    def test_identity_sixteen_qam(self):
        k = k_const(build(16), 4)
        got = r_min_lower_bound(20.0, 1.0, k)
        assert got == pytest.approx(11.514718625761429)

    def test_rejects_negative_inputs(self):
        with pytest.raises(ValueError):
            r_min_lower_bound(-1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            r_min_lower_bound(1.0, -1.0, 1.0)


class TestLowSnrNodeCount:
    def test_sixteen_qam_m4(self):
        assert low_snr_node_count(16, 4) == 4369

    def test_single_level(self):
        assert low_snr_node_count(2, 1) == 1

    def test_four_qam_m2(self):
        assert low_snr_node_count(4, 2) == 5

    def test_matches_power_sum(self):
        for q in (2, 4, 16, 64):
            for m in (1, 2, 3, 4):
                assert low_snr_node_count(q, m) == sum(q ** k
                                                       for k in range(m))

    def test_overflow_guard(self):
        with pytest.raises(TooLarge):
            low_snr_node_count(16, 16)

    def test_rejects_degenerate(self):
        with pytest.raises(ValueError):
            low_snr_node_count(1, 4)
        with pytest.raises(ValueError):
            low_snr_node_count(16, 0)


class TestRadii:
    def test_identity_babai_radius(self):
        assert babai_radius(np.eye(4, dtype=complex)) == pytest.approx(
            math.sqrt(2))

    def test_cover_radii_structure(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            r = rand_triangular(rng, 5)
            gam = cover_radii(r)
            assert gam[0] == pytest.approx(babai_radius(r))
            assert np.all(gam > 0)
            assert np.all(np.diff(gam) <= 1e-12)

    def test_ball_volume_values(self):
        assert ball_volume(0, 3.0) == 1.0
        assert ball_volume(1, math.sqrt(2)) == pytest.approx(2 * math.pi)
        assert ball_volume(2, 1.0) == pytest.approx(math.pi ** 2 / 2)


class TestComplexityUpperBound:
    def test_scalar_identity(self):
        got = relaxed_complexity_upper_bound(np.eye(1, dtype=complex))
        assert got == pytest.approx(2 * math.pi)

    def test_identity_refined(self):
        got = relaxed_complexity_upper_bound(np.eye(4, dtype=complex),
                                             refined=True)
        s2, s15, s05 = math.sqrt(2), math.sqrt(1.5), math.sqrt(0.5)
        ref = (1.0
               + math.pi ** 3 * (s2 + s15) ** 6 / 6
               + math.pi ** 2 * (s2 + 1) ** 4 / 2
               + math.pi * (s2 + s05) ** 2)
        assert got == pytest.approx(ref, rel=1e-12)
        assert 1927.0 < got < 1929.0

    def test_identity_general(self):
        got = relaxed_complexity_upper_bound(np.eye(4, dtype=complex))
        s2, s15, s05 = math.sqrt(2), math.sqrt(1.5), math.sqrt(0.5)
        ref = (math.pi ** 4 * (2 * s2) ** 8 / 24
               + math.pi ** 3 * (s2 + s15) ** 6 / 6
               + math.pi ** 2 * (s2 + 1) ** 4 / 2
               + math.pi * (s2 + s05) ** 2)
        assert got == pytest.approx(ref, rel=1e-12)

    def test_scale_invariance(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            r = rand_triangular(rng, 4)
            base = relaxed_complexity_upper_bound(r)
            for t in (0.1, 3.7):
                assert relaxed_complexity_upper_bound(t * r) == \
                    pytest.approx(base, rel=1e-9)

    def test_refined_drops_top_level_volume(self):
        rng = np.random.default_rng(3)
        r = rand_triangular(rng, 4)
        diff = relaxed_complexity_upper_bound(r) \
            - relaxed_complexity_upper_bound(r, refined=True)
        beta = babai_radius(r)
        from latdet.numerics import gram_det
        ref = ball_volume(4, 2 * beta) / gram_det(r) - 1.0
        assert diff == pytest.approx(ref, rel=1e-12)


class TestSoundnessOnTrials:
    def test_first_leaf_within_babai_radius(self):
        cst = build(16)
        for trial in range(200):
            inst = draw(trial_rng(5, 0, trial), 4, cst, snr_db=9.0)
            qr = sqrd(inst.generator)
            p = problem_from_factors(qr.r, qr.q, inst.target, cst=None)
            res = sesd_relaxed(p)
            assert res.first_leaf_distance <= babai_radius(qr.r) + 1e-9

    def test_node_count_within_ceiling(self):
        cst = build(16)
        for trial in range(200):
            inst = draw(trial_rng(6, 0, trial), 4, cst, snr_db=3.0)
            qr = sqrd(inst.generator)
            p = problem_from_factors(qr.r, qr.q, inst.target, cst=None)
            res = sesd_relaxed(p)
            bound = relaxed_complexity_upper_bound(qr.r)
            assert res.nodes_visited <= math.ceil(bound)


class TestBuildReport:
    def test_fields_consistent(self):
        rng = np.random.default_rng(4)
        cst = build(16)
        r = rand_triangular(rng, 4)
        rep = build_report(r, cst, noise_norm=20.0)
        assert rep.k_const == pytest.approx(6 * math.sqrt(2))
        assert rep.babai_rad == pytest.approx(babai_radius(r))
        assert rep.cover_radii[0] == pytest.approx(rep.babai_rad)
        assert rep.nodes_low_snr == 4369
        assert rep.nodes_upper == pytest.approx(
            relaxed_complexity_upper_bound(r))


class TestVisitationCheck:
    def _low_snr_case(self, trial, seed=7):
        cst = build(4)
        inst = draw(trial_rng(seed, 0, trial), 2, cst, snr_db=-10.0)
        qr = sqrd(inst.generator)
        p = problem_from_factors(qr.r, qr.q, inst.target, cst)
        noise = inst.target - inst.generator @ inst.sent_grid
        rep = build_report(qr.r, cst, noise_norm=np.linalg.norm(noise))
        res = sesd_finite(p, want_trace=True)
        return p, res, rep

    def test_vacuous_when_floor_nonpositive(self):
        p, res, rep = self._low_snr_case(0)
        from dataclasses import replace
        neg = replace(rep, r_min_lower=-3.0)
        assert visitation_check(p, [], neg) is True

    def test_passes_on_low_snr_trials(self):
        positive = 0
        for trial in range(300):
            p, res, rep = self._low_snr_case(trial)
            assert visitation_check(p, res.trace, rep) is True
            if rep.r_min_lower > 0:
                positive += 1
        assert positive >= 50

    def test_corrupted_trace_fails(self):
        flagged = 0
        for trial in range(300):
            p, res, rep = self._low_snr_case(trial)
            if rep.r_min_lower <= 0:
                continue
            idx = [i for i, n in enumerate(res.trace)
                   if n.pd < rep.r_min_lower - 1e-9]
            if not idx:
                continue
            broken = res.trace[:idx[0]] + res.trace[idx[0] + 1:]
            assert visitation_check(p, broken, rep) is False
            flagged += 1
            if flagged >= 20:
                break
        assert flagged >= 20

    def test_dimension_guard(self):
        cst = build(4)
        inst = draw(trial_rng(8, 0, 0), 4, cst, snr_db=-10.0)
        qr = sqrd(inst.generator)
        p = problem_from_factors(qr.r, qr.q, inst.target, cst)
        noise = inst.target - inst.generator @ inst.sent_grid
        rep = build_report(qr.r, cst, noise_norm=np.linalg.norm(noise))
        res = sesd_finite(p, want_trace=True)
        with pytest.raises(TooLarge):
            visitation_check(p, res.trace, rep)
