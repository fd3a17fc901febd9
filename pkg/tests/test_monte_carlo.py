import numpy as np
import pytest
from dataclasses import replace

from active_ris import closed_form as cf
from active_ris import monte_carlo as mc
from active_ris.channels import sample_channel
from active_ris.config import default_config
from active_ris.geometry import PhaseConfig, aligned_phases, angle_gains
from active_ris.rng import stream


def make_cfg(M=4, N=4, k=(0.0, 0.0, 0.0, 0.0), ab=(1.0, 1.0, 1.0, 1.0), **kw):
    return replace(default_config(), M=M, N=N,
                   k1=k[0], k2=k[1], k3=k[2], k4=k[3],
                   alpha_u=ab[0], beta_u=ab[1], alpha_d=ab[2], beta_d=ab[3],
                   **kw)


def zero_phases(N):
    return PhaseConfig(np.zeros(N), 0)


class TestEstimateMoment:
    def test_cascade_power_rayleigh(self):
        cfg = make_cfg(M=4, N=9)
        est = mc.estimate_moment(mc.MomentKind.CASCADE_POWER_UP, cfg,
                                 zero_phases(9), 100_000, 31)
        assert abs(est.mean - 36.0) < 3 * est.std_error

    def test_cascade_fourth_single_element(self):
        cfg = make_cfg(M=1, N=1)
        est = mc.estimate_moment(mc.MomentKind.CASCADE_FOURTH_UP, cfg,
                                 zero_phases(1), 200_000, 32)
        assert abs(est.mean - 4.0) < 4 * est.std_error

    def test_noise_quadratic_central_wishart(self):
        # K1 = 0: exact identity alpha^2 * beta * M * N * (M + N)
        cfg = make_cfg(M=4, N=4, ab=(2.0, 0.5, 1, 1))
        expected = 4.0 * 0.5 * 4 * 4 * 8
        est = mc.estimate_moment(mc.MomentKind.NOISE_QUADRATIC_UP, cfg,
                                 zero_phases(4), 150_000, 33)
        assert abs(est.mean - expected) < 3 * est.std_error

    def test_downlink_cascade_power_matches_closed_form(self):
        cfg = make_cfg(M=4, N=4, k=(0, 0, 2.0, 1.0), ab=(1, 1, 0.7, 1.3))
        phases = aligned_phases(*angle_gains(cfg.angles, "down"), 4, 2)
        f2 = cf.f_abs2_down(cfg, phases)
        est = mc.estimate_moment(mc.MomentKind.CASCADE_POWER_DOWN, cfg,
                                 phases, 150_000, 34)
        assert abs(est.mean - cf.cascade_power_down(cfg, f2)) < 3 * est.std_error

    def test_deterministic_for_fixed_seed(self):
        cfg = make_cfg()
        a = mc.estimate_moment(mc.MomentKind.CASCADE_POWER_UP, cfg,
                               zero_phases(4), 5000, 7)
        b = mc.estimate_moment(mc.MomentKind.CASCADE_POWER_UP, cfg,
                               zero_phases(4), 5000, 7)
        assert (a.mean, a.std_error) == (b.mean, b.std_error)

    def test_doubling_trials_drifts_within_combined_se(self):
        cfg = make_cfg()
        a = mc.estimate_moment(mc.MomentKind.CASCADE_POWER_UP, cfg,
                               zero_phases(4), 40_000, 70)
        b = mc.estimate_moment(mc.MomentKind.CASCADE_POWER_UP, cfg,
                               zero_phases(4), 80_000, 70)
        combined = np.hypot(a.std_error, b.std_error)
        assert abs(a.mean - b.mean) < 3 * combined

    def test_minimum_trials_enforced(self):
        with pytest.raises(ValueError):
            mc.estimate_moment(mc.MomentKind.CASCADE_POWER_UP, make_cfg(),
                               zero_phases(4), 500, 1)

    def test_three_sigma_coverage_over_repeated_runs(self):
        # frozen-seed statistical check of the reported standard error
        cfg = make_cfg(M=4, N=4)
        truth = 16.0
        hits = 0
        runs = 200
        for i in range(runs):
            est = mc.estimate_moment(mc.MomentKind.CASCADE_POWER_UP, cfg,
                                     zero_phases(4), 1000, 9000 + i)
            if abs(est.mean - truth) <= 3 * est.std_error:
                hits += 1
        assert hits / runs >= 0.99


class TestInstantSnr:
    def test_passive_identity(self):
        cfg = replace(make_cfg(), pt=0.3)
        real = sample_channel(cfg, "up", stream(3, 0))
        phases = zero_phases(4)
        got = mc.snr_uplink_instant(real, phases, cfg, mode="passive")
        w = real.H @ (np.exp(1j * phases.thetas) * real.g)
        expected = cfg.pt * np.vdot(w, w).real / cfg.sigma2_nu
        assert got == pytest.approx(expected, rel=1e-12)

    def test_unit_channel_active_value(self):
        # M = N = 1, huge Rician factors, unit gains: |h| = |g| = 1
        cfg = replace(make_cfg(M=1, N=1, k=(1e12, 1e12, 1e12, 1e12)),
                      pt=2.0, pr=1.0, sigma2_vu=0.5, sigma2_nu=0.25)
        real = sample_channel(cfg, "up", stream(4, 0))
        eta2 = cf.amplification_factor_up(cfg) ** 2
        got = mc.snr_uplink_instant(real, zero_phases(1), cfg, mode="active")
        expected = cfg.pt * eta2 / (eta2 * cfg.sigma2_vu + cfg.sigma2_nu)
        assert got == pytest.approx(expected, rel=1e-4)

    def test_channel_scaling_moves_terms_as_expected(self):
        # numerator scales c^4, RIS-noise term c^4, receiver term c^2
        cfg = replace(make_cfg(), pt=0.3, pr=0.1)
        real = sample_channel(cfg, "up", stream(5, 0))
        phases = zero_phases(4)
        c = 2.0
        scaled = mc.ChannelRealization(H=c * real.H, g=real.g, direction="up")
        eta2 = cf.amplification_factor_up(cfg) ** 2
        phase = np.exp(1j * phases.thetas)
        w = real.H @ (phase * real.g)
        n1 = np.vdot(w, w).real
        mid = np.linalg.norm(real.H.conj().T @ w) ** 2
        expected = (cfg.pt * eta2 * (c**4) * n1 * n1
                    / (eta2 * (c**4) * mid * cfg.sigma2_vu
                       + cfg.sigma2_nu * (c**2) * n1))
        got = mc.snr_uplink_instant(scaled, phases, cfg, mode="active")
        assert got == pytest.approx(expected, rel=1e-10)

    def test_downlink_passive_reduction(self):
        cfg = replace(make_cfg(k=(0, 0, 1.0, 0.5)), pt=0.2)
        real = sample_channel(cfg, "down", stream(6, 0))
        phases = zero_phases(4)
        got = mc.snr_downlink_instant(real, phases, cfg, mode="passive")
        y = (real.g * np.exp(1j * phases.thetas)) @ real.H
        n2 = np.vdot(y, y).real
        mu = cfg.pt / cf.cascade_power_down(cfg, cf.f_abs2_down(cfg, phases))
        assert got == pytest.approx(mu * n2 * n2 / cfg.sigma2_nd, rel=1e-12)

    def test_downlink_unit_channel_value(self):
        cfg = replace(make_cfg(M=1, N=1, k=(1e12,) * 4),
                      pt=2.0, pr=1.0, sigma2_vd=0.5, sigma2_nd=0.25)
        real = sample_channel(cfg, "down", stream(7, 0))
        phases = zero_phases(1)
        mu, eta = cf.beamforming_constants_down(cfg, phases)
        got = mc.snr_downlink_instant(real, phases, cfg, mode="active")
        expected = mu * eta**4 / (eta**2 * cfg.sigma2_vd + cfg.sigma2_nd)
        assert got == pytest.approx(expected, rel=1e-3)


class TestErgodicRate:
    def test_zero_power_gives_zero_rate(self):
        cfg = replace(make_cfg(), pt=0.0, pr=0.01)
        est = mc.ergodic_rate(cfg, zero_phases(4), "up", "passive", 200, 1)
        assert est.mean == 0.0 and est.std_error == 0.0

    def test_matches_closed_form_within_five_percent(self):
        cfg = replace(default_config(), M=16, N=16, pt=0.01, pr=0.01)
        phases = aligned_phases(*angle_gains(cfg.angles, "up"), 16, cfg.bits)
        est = mc.ergodic_rate(cfg, phases, "up", "active", 10_000, 77)
        closed = cf.rate_uplink_active(cfg, phases)
        assert abs(closed - est.mean) / est.mean < 0.05

    def test_reproducible(self):
        cfg = make_cfg()
        a = mc.ergodic_rate(cfg, zero_phases(4), "down", "active", 500, 5)
        b = mc.ergodic_rate(cfg, zero_phases(4), "down", "active", 500, 5)
        assert (a.mean, a.std_error) == (b.mean, b.std_error)

    def test_trials_minimum(self):
        with pytest.raises(ValueError):
            mc.ergodic_rate(make_cfg(), zero_phases(4), "up", "active", 50, 1)

    def test_transmit_normalization_on_average(self):
        # E{w^H w} = pt for the downlink beamformer
        cfg = replace(make_cfg(M=4, N=4, k=(0, 0, 10.0, 1.0),
                               ab=(1, 1, 1.0, 1.0)), pt=0.01, pr=0.01)
        phases = aligned_phases(*angle_gains(cfg.angles, "down"), 4, 2)
        mu, eta = cf.beamforming_constants_down(cfg, phases)
        est = mc.estimate_moment(mc.MomentKind.CASCADE_POWER_DOWN, cfg,
                                 phases, 200_000, 55)
        got = mu * eta * eta * est.mean
        se = mu * eta * eta * est.std_error
        assert abs(got - cfg.pt) < 3 * se


@pytest.fixture(scope="module")
def report_k0():
    cfg = make_cfg(M=4, N=4)
    return mc.validate_all(cfg, zero_phases(4), trials=20_000, seed=3)


class TestValidateAll:
    def test_exact_rows_pass_at_k_zero(self, report_k0):
        assert report_k0.exact_rows_pass
        for row in report_k0.rows:
            assert row.policy in ("3se", "4se")
            assert row.passed

    def test_rate_rows_present(self, report_k0):
        names = {r.name for r in report_k0.rate_rows}
        assert names == {"rate_up_active", "rate_up_passive",
                         "rate_down_active", "rate_down_passive"}

    def test_adjudication_fields(self, report_k0):
        adj = report_k0.adjudication
        for link in ("uplink", "downlink"):
            for key in ("z_plus2", "z_minus2", "plus2_consistent",
                        "minus2_consistent"):
                assert key in adj[link]
        assert "verdict" in adj

    def test_tolerance_policy_switches_with_rician_factor(self):
        cfg = make_cfg(M=4, N=4, k=(10.0, 1.0, 10.0, 1.0))
        report = mc.validate_all(cfg, zero_phases(4), trials=2_000, seed=4)
        by_name = {r.name: r for r in report.rows}
        assert by_name["noise_quadratic_up"].policy == "rel10"
        assert by_name["reradiated_quadratic_down"].policy == "rel10"
        assert by_name["cascade_fourth_down"].policy == "adjudication"
        assert by_name["cascade_fourth_down"].passed is None
        assert by_name["cascade_fourth_up"].policy == "4se"

    def test_report_deterministic(self):
        cfg = make_cfg(M=4, N=4)
        r1 = mc.validate_all(cfg, zero_phases(4), trials=2_000, seed=9)
        r2 = mc.validate_all(cfg, zero_phases(4), trials=2_000, seed=9)
        assert r1.to_text() == r2.to_text()
        assert r1.to_dict() == r2.to_dict()

    def test_text_table_renders(self, report_k0):
        text = report_k0.to_text()
        assert "cascade_power_up" in text
        assert "adjudication" in text


def test_rate_report_bundles_constants():
    cfg = replace(make_cfg(k=(0, 0, 1.0, 0.5)), pt=0.01, pr=0.01)
    rep = mc.rate_report(cfg, zero_phases(4), "down", "active", 500, 11)
    assert rep.mu is not None and rep.eta > 0
    assert rep.mc.trials == 500
