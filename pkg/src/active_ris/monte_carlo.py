"""Brute-force simulation oracles for the closed-form expressions.

Instantaneous SNRs, ergodic rates, and direct estimators of every moment
the closed forms predict.  The moment estimators touch nothing but raw
channel draws: their only shared code with the analytic side is channel
sampling itself, so they stay valid as independent checks.

Estimates are deterministic: trials are partitioned into fixed-size
batches, batch i draws from the substream keyed (seed, i), and batch
statistics are merged in index order.  Reductions use numpy's own
kernels (einsum / pairwise sums), so results do not depend on BLAS
threading.
"""

import enum
from dataclasses import dataclass

import numpy as np

from . import closed_form as cf
from .channels import ChannelRealization, sample_channel_batch
from .config import SystemConfig
from .geometry import PhaseConfig
from .rng import batches, derive_seed

_LN2 = np.log(2.0)


@dataclass
class MonteCarloEstimate:
    """Sample mean with its standard error and provenance."""

    mean: float
    std_error: float
    trials: int
    seed: int


class MomentKind(enum.Enum):
    """Moments with a one-to-one closed-form counterpart."""

    CASCADE_POWER_UP = "cascade_power_up"            # E ||H Phi g||^2
    CASCADE_FOURTH_UP = "cascade_fourth_up"          # E ||H Phi g||^4
    NOISE_QUADRATIC_UP = "noise_quadratic_up"        # E ||(H^H H) Phi g||^2
    CASCADE_POWER_DOWN = "cascade_power_down"        # E ||g Phi H||^2
    CASCADE_FOURTH_DOWN = "cascade_fourth_down"      # E ||g Phi H||^4
    RERADIATED_QUADRATIC_DOWN = "reradiated_quadratic_down"

    @property
    def direction(self) -> str:
        return "up" if self.name.endswith("_UP") else "down"


def _norm2(x: np.ndarray) -> np.ndarray:
    """Squared Euclidean norm along the last axis (fixed reduction order)."""
    return np.einsum("...i,...i->...", x.real, x.real) + np.einsum(
        "...i,...i->...", x.imag, x.imag)


def _cascade_up(H, g, phase):
    return np.einsum("bmn,bn->bm", H, phase * g)


def _cascade_down(H, g, phase):
    return np.einsum("bn,bnm->bm", g * phase, H)


def _moment_stat_batch(kind: MomentKind, H, g, phase) -> np.ndarray:
    if kind is MomentKind.CASCADE_POWER_UP:
        return _norm2(_cascade_up(H, g, phase))
    if kind is MomentKind.CASCADE_FOURTH_UP:
        return _norm2(_cascade_up(H, g, phase)) ** 2
    if kind is MomentKind.NOISE_QUADRATIC_UP:
        w = _cascade_up(H, g, phase)
        back = np.einsum("bmn,bm->bn", H.conj(), w)
        return _norm2(back)
    if kind is MomentKind.CASCADE_POWER_DOWN:
        return _norm2(_cascade_down(H, g, phase))
    if kind is MomentKind.CASCADE_FOURTH_DOWN:
        return _norm2(_cascade_down(H, g, phase)) ** 2
    if kind is MomentKind.RERADIATED_QUADRATIC_DOWN:
        a = phase.conj() * g.conj()
        v = np.einsum("bnm,bn->bm", H.conj(), a)
        w = np.einsum("bnm,bm->bn", H, v)
        return _norm2(phase * w)
    raise ValueError(f"unknown moment kind {kind!r}")


class _RunningMoments:
    """Batch-merged mean/variance accumulator (order-stable)."""

    def __init__(self):
        self.count = 0
        self.mean = 0.0
        self.m2 = 0.0

    def add(self, x: np.ndarray):
        n = x.size
        bmean = float(x.mean())
        bm2 = float(((x - bmean) ** 2).sum())
        total = self.count + n
        delta = bmean - self.mean
        self.mean += delta * n / total
        self.m2 += bm2 + delta * delta * self.count * n / total
        self.count = total

    def estimate(self, seed: int) -> MonteCarloEstimate:
        if self.count < 2:
            return MonteCarloEstimate(self.mean, 0.0, self.count, seed)
        var = max(self.m2 / (self.count - 1), 0.0)
        return MonteCarloEstimate(self.mean, float(np.sqrt(var / self.count)),
                                  self.count, seed)


def estimate_moment(kind: MomentKind, cfg: SystemConfig, phases: PhaseConfig,
                    trials: int, seed: int) -> MonteCarloEstimate:
    """Direct sample mean of the defining expectation from raw draws."""
    if trials < 1000:
        raise ValueError("moment estimation needs at least 1000 trials")
    phase = np.exp(1j * phases.thetas)
    acc = _RunningMoments()
    for _, size, gen in batches(seed, trials):
        H, g = sample_channel_batch(cfg, kind.direction, gen, size)
        acc.add(_moment_stat_batch(kind, H, g, phase))
    return acc.estimate(seed)


# ---------------------------------------------------------------------------
# instantaneous SNRs

def _snr_up_batch(H, g, phase, cfg: SystemConfig, mode: str) -> np.ndarray:
    w = _cascade_up(H, g, phase)
    n2 = _norm2(w)
    if mode == "passive":
        return cfg.pt * n2 / cfg.sigma2_nu
    eta2 = cf.amplification_factor_up(cfg) ** 2
    back = np.einsum("bmn,bm->bn", H.conj(), w)
    mid = _norm2(back)
    return (cfg.pt * eta2 * n2 * n2
            / (eta2 * mid * cfg.sigma2_vu + cfg.sigma2_nu * n2))


def _snr_down_batch(H, g, phase, cfg: SystemConfig, mode: str,
                    mu: float, eta: float) -> np.ndarray:
    y = _cascade_down(H, g, phase)
    n2 = _norm2(y)
    if mode == "passive":
        return mu * n2 * n2 / cfg.sigma2_nd
    eta2 = eta * eta
    ris_noise = eta2 * _norm2(g * phase) * cfg.sigma2_vd
    return mu * eta2 * eta2 * n2 * n2 / (ris_noise + cfg.sigma2_nd)


def _down_constants(cfg: SystemConfig, phases: PhaseConfig, mode: str):
    f2 = cf.f_abs2_down(cfg, phases)
    if mode == "passive":
        return cfg.pt / cf.cascade_power_down(cfg, f2), 1.0
    return cf.beamforming_constants_down_f2(cfg, f2)


def snr_uplink_instant(real: ChannelRealization, phases: PhaseConfig,
                       cfg: SystemConfig, mode: str = "active") -> float:
    """SNR of one uplink realization under matched combining.

    Active mode amplifies both signal and RIS thermal noise with the
    statistics-calibrated gain; passive mode reduces to
    pt * ||H Phi g||^2 / sigma2_n.
    """
    _check_mode(mode)
    return float(_snr_up_batch(real.H[None], real.g[None],
                               np.exp(1j * phases.thetas), cfg, mode)[0])


def snr_downlink_instant(real: ChannelRealization, phases: PhaseConfig,
                         cfg: SystemConfig, mode: str = "active") -> float:
    """SNR of one downlink realization under matched transmit beamforming."""
    _check_mode(mode)
    mu, eta = _down_constants(cfg, phases, mode)
    return float(_snr_down_batch(real.H[None], real.g[None],
                                 np.exp(1j * phases.thetas), cfg, mode,
                                 mu, eta)[0])


def _check_mode(mode: str):
    if mode not in ("active", "passive"):
        raise ValueError(f"mode must be 'active' or 'passive', got {mode!r}")


def ergodic_rate(cfg: SystemConfig, phases: PhaseConfig, direction: str,
                 mode: str, trials: int, seed: int) -> MonteCarloEstimate:
    """Sample mean of log2(1 + SNR) over i.i.d. channel draws."""
    if trials < 100:
        raise ValueError("rate estimation needs at least 100 trials")
    _check_mode(mode)
    if direction not in ("up", "down"):
        raise ValueError(f"direction must be 'up' or 'down', got {direction!r}")
    phase = np.exp(1j * phases.thetas)
    if direction == "down":
        mu, eta = _down_constants(cfg, phases, mode)
    acc = _RunningMoments()
    for _, size, gen in batches(seed, trials):
        H, g = sample_channel_batch(cfg, direction, gen, size)
        if direction == "up":
            snr = _snr_up_batch(H, g, phase, cfg, mode)
        else:
            snr = _snr_down_batch(H, g, phase, cfg, mode, mu, eta)
        acc.add(np.log1p(snr) / _LN2)
    return acc.estimate(seed)


# ---------------------------------------------------------------------------
# validation report

@dataclass
class RateReport:
    """Closed-form rate next to its Monte-Carlo estimate."""

    link: str
    mode: str
    closed_form: float
    mc: MonteCarloEstimate
    f_abs2: float
    eta: float
    mu: float | None


@dataclass
class ValidationRow:
    name: str
    closed_form: float
    mc_mean: float
    mc_std_error: float
    z_score: float
    policy: str          # "3se" | "4se" | "rel10" | "rel5" | "adjudication"
    passed: bool | None  # None for adjudication-only rows


@dataclass
class ValidationReport:
    rows: list
    rate_rows: list
    adjudication: dict
    trials_base: int
    seed: int

    @property
    def hard_rows_pass(self) -> bool:
        rows = [r for r in self.rows + self.rate_rows if r.passed is not None]
        return all(r.passed for r in rows)

    @property
    def exact_rows_pass(self) -> bool:
        """Pass/fail over the exact-moment rows only (SE-band policies);
        approximation and rate rows do not gate this."""
        rows = [r for r in self.rows if r.policy in ("3se", "4se")]
        return all(r.passed for r in rows)

    def to_dict(self) -> dict:
        return {
            "schema_version": "1",
            "trials_base": self.trials_base,
            "seed": self.seed,
            "all_hard_rows_pass": self.hard_rows_pass,
            "exact_rows_pass": self.exact_rows_pass,
            "moments": [vars(r).copy() for r in self.rows],
            "rates": [vars(r).copy() for r in self.rate_rows],
            "adjudication": self.adjudication,
        }

    def to_text(self) -> str:
        lines = []
        head = (f"{'quantity':<28} {'closed form':>14} {'mc mean':>14} "
                f"{'mc se':>12} {'z':>8} {'policy':>12} {'result':>8}")
        lines.append(head)
        lines.append("-" * len(head))
        for r in self.rows + self.rate_rows:
            result = "info" if r.passed is None else ("pass" if r.passed else "FAIL")
            lines.append(
                f"{r.name:<28} {r.closed_form:>14.6e} {r.mc_mean:>14.6e} "
                f"{r.mc_std_error:>12.4e} {r.z_score:>8.2f} {r.policy:>12} {result:>8}")
        adj = self.adjudication
        lines.append("")
        lines.append("fourth-moment cross-term adjudication "
                     "(uplink carries +2, downlink carries -2):")
        for link in ("uplink", "downlink"):
            a = adj[link]
            lines.append(
                f"  {link}: z(+2) = {a['z_plus2']:+.2f} "
                f"({'consistent' if a['plus2_consistent'] else 'inconsistent'}), "
                f"z(-2) = {a['z_minus2']:+.2f} "
                f"({'consistent' if a['minus2_consistent'] else 'inconsistent'})")
        lines.append(f"  verdict: {adj['verdict']}")
        return "\n".join(lines) + "\n"


_MOMENT_CLOSED = {
    MomentKind.CASCADE_POWER_UP: cf.cascade_power_up,
    MomentKind.CASCADE_FOURTH_UP: cf.cascade_fourth_up,
    MomentKind.NOISE_QUADRATIC_UP: cf.noise_quadratic_up,
    MomentKind.CASCADE_POWER_DOWN: cf.cascade_power_down,
    MomentKind.CASCADE_FOURTH_DOWN: cf.cascade_fourth_down,
    MomentKind.RERADIATED_QUADRATIC_DOWN: cf.reradiated_quadratic_down,
}


def _row_policy(kind: MomentKind, cfg: SystemConfig, f2: float) -> str:
    if kind in (MomentKind.CASCADE_POWER_UP, MomentKind.CASCADE_POWER_DOWN):
        return "3se"
    if kind is MomentKind.CASCADE_FOURTH_UP:
        return "4se"
    if kind is MomentKind.CASCADE_FOURTH_DOWN:
        # The disputed -2 contribution scales with k3*k4*|f|^2; when it
        # vanishes the row is an exact moment, otherwise adjudication-only.
        return "4se" if cfg.k3 * cfg.k4 * f2 < 1e-12 else "adjudication"
    if kind is MomentKind.NOISE_QUADRATIC_UP:
        return "3se" if cfg.k1 == 0.0 else "rel10"
    return "3se" if cfg.k3 == 0.0 else "rel10"


def _apply_policy(policy: str, closed: float, mc: MonteCarloEstimate):
    z = (mc.mean - closed) / mc.std_error if mc.std_error > 0 else 0.0
    if policy == "3se":
        return z, abs(z) <= 3.0
    if policy == "4se":
        return z, abs(z) <= 4.0
    if policy == "rel10":
        return z, abs(closed - mc.mean) <= 0.10 * abs(mc.mean)
    if policy == "rel5":
        return z, abs(closed - mc.mean) <= 0.05 * abs(mc.mean)
    return z, None


def rate_report(cfg: SystemConfig, phases: PhaseConfig, link: str, mode: str,
                trials: int, seed: int) -> RateReport:
    """Closed-form vs Monte-Carlo rate for one link and mode."""
    mc = ergodic_rate(cfg, phases, link, mode, trials, seed)
    if link == "up":
        f2 = cf.f_abs2_up(cfg, phases)
        closed = (cf.rate_uplink_active_f2(cfg, f2) if mode == "active"
                  else cf.rate_uplink_passive_f2(cfg, f2))
        eta = cf.amplification_factor_up(cfg) if mode == "active" else 1.0
        mu = None
    else:
        f2 = cf.f_abs2_down(cfg, phases)
        closed = (cf.rate_downlink_active_f2(cfg, f2) if mode == "active"
                  else cf.rate_downlink_passive_f2(cfg, f2))
        mu, eta = _down_constants(cfg, phases, mode)
    return RateReport(link=link, mode=mode, closed_form=closed, mc=mc,
                      f_abs2=f2, eta=eta, mu=mu)


def validate_all(cfg: SystemConfig, phases: PhaseConfig,
                 trials: int = 100_000, seed: int = 1) -> ValidationReport:
    """Compare every closed-form quantity against its simulation oracle.

    ``trials`` is the budget for second moments; fourth moments run 10x
    that (heavy tails) and rate comparisons a tenth.  The cross-term
    adjudication reuses the fourth-moment estimates: both the +2 and -2
    variants of each expansion are scored against the same oracle.
    """
    fourth = trials * 10
    rate_trials = max(trials // 10, 100)
    f2 = {"up": cf.f_abs2_up(cfg, phases), "down": cf.f_abs2_down(cfg, phases)}
    rows = []
    estimates = {}
    for i, kind in enumerate(MomentKind):
        n = fourth if "FOURTH" in kind.name else trials
        mc = estimate_moment(kind, cfg, phases, n, derive_seed(seed, 10 + i))
        estimates[kind] = mc
        closed = _MOMENT_CLOSED[kind](cfg, f2[kind.direction])
        policy = _row_policy(kind, cfg, f2[kind.direction])
        z, passed = _apply_policy(policy, closed, mc)
        rows.append(ValidationRow(name=kind.value, closed_form=closed,
                                  mc_mean=mc.mean, mc_std_error=mc.std_error,
                                  z_score=z, policy=policy, passed=passed))

    rate_rows = []
    for j, (link, mode) in enumerate(
            (("up", "active"), ("up", "passive"),
             ("down", "active"), ("down", "passive"))):
        rep = rate_report(cfg, phases, link, mode, rate_trials,
                          derive_seed(seed, 20 + j))
        z, passed = _apply_policy("rel5", rep.closed_form, rep.mc)
        rate_rows.append(ValidationRow(
            name=f"rate_{link}_{mode}", closed_form=rep.closed_form,
            mc_mean=rep.mc.mean, mc_std_error=rep.mc.std_error,
            z_score=z, policy="rel5", passed=passed))

    adjudication = _adjudicate_cross_term(cfg, f2, estimates)
    return ValidationReport(rows=rows, rate_rows=rate_rows,
                            adjudication=adjudication,
                            trials_base=trials, seed=seed)


def _adjudicate_cross_term(cfg: SystemConfig, f2: dict, estimates: dict) -> dict:
    out = {}
    gain_u, gain_d = cf.composite_gain_up(cfg), cf.composite_gain_down(cfg)
    spec = {
        "uplink": (MomentKind.CASCADE_FOURTH_UP, cfg.k1, cfg.k2, gain_u, f2["up"]),
        "downlink": (MomentKind.CASCADE_FOURTH_DOWN, cfg.k3, cfg.k4, gain_d,
                     f2["down"]),
    }
    for link, (kind, ka, kb, gain, f2v) in spec.items():
        mc = estimates[kind]
        plus = cf._cascade_fourth(cfg.M, cfg.N, ka, kb, gain, f2v, +2.0)
        minus = cf._cascade_fourth(cfg.M, cfg.N, ka, kb, gain, f2v, -2.0)
        se = mc.std_error if mc.std_error > 0 else np.inf
        z_plus = (mc.mean - plus) / se
        z_minus = (mc.mean - minus) / se
        out[link] = {
            "z_plus2": float(z_plus),
            "z_minus2": float(z_minus),
            "plus2_consistent": bool(abs(z_plus) <= 4.0),
            "minus2_consistent": bool(abs(z_minus) <= 4.0),
            "discriminable": bool(abs(z_plus - z_minus) > 4.0),
        }
    up, down = out["uplink"], out["downlink"]
    if up["plus2_consistent"] and down["plus2_consistent"] and not down["minus2_consistent"]:
        verdict = ("oracle supports the +2 cross term on both links; the "
                   "downlink's printed -2 is inconsistent with the "
                   "fourth-moment estimate")
    elif up["plus2_consistent"] and down["minus2_consistent"] and not down["discriminable"]:
        verdict = ("cross-term sign not discriminable at this configuration "
                   "(disputed contribution below oracle resolution)")
    else:
        verdict = "see per-link z-scores"
    out["verdict"] = verdict
    return out
