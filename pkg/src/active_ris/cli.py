"""Experiment driver: power sweeps, validation, optimization, comparison.

Subcommands
    sweep     rate vs total power for one link, CSV + JSON summary
    compare   sweep over both modes plus active/passive crossover detection
    validate  closed-form vs Monte-Carlo moment and rate report
    optimize  GA phase optimization against the closed-form rate

All user-facing powers are dBm; everything internal is Watts.  Outputs
are byte-deterministic for a fixed config and seed: no timestamps, no
absolute paths, fixed float formatting.

Exit codes: 0 success, 1 usage error, 2 validation failure, 3 infeasible
budget everywhere.
"""

import argparse
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import closed_form as cf
from .config import SystemConfig, dbm_to_watt, default_config, load_config
from .errors import ConfigError, InfeasibleBudgetError
from .geometry import PhaseConfig, aligned_phases, angle_gains
from .monte_carlo import ergodic_rate, validate_all
from .optimizer import GAParams, optimize_rate, random_phases
from .rng import derive_seed
from .svgplot import emit_plot

SCHEMA_VERSION = "1"
CSV_COLUMNS = ["total_power_dbm", "mode", "closed_form_rate", "mc_rate",
               "mc_stderr", "f_abs2", "pt", "pr", "eta"]
INFEASIBLE = "infeasible"


class UsageError(Exception):
    pass


@dataclass
class SweepSpec:
    link: str = "up"
    power_start: float = 10.0
    power_end: float = 50.0
    power_step: float = 5.0
    modes: tuple = ("active", "passive")
    phase_policy: str = "aligned"
    trials: int = 0
    seed: int = 1
    ga_power_dbm: float | None = None   # None -> sweep midpoint
    ga_params: GAParams | None = None

    def __post_init__(self):
        if self.link not in ("up", "down"):
            raise UsageError(f"link must be up|down, got {self.link}")
        if self.power_start > self.power_end:
            raise UsageError("power_start must be <= power_end")
        if self.power_step <= 0:
            raise UsageError("power_step must be > 0")
        if not self.modes or any(m not in ("active", "passive") for m in self.modes):
            raise UsageError(f"bad mode list {self.modes}")
        if self.phase_policy not in ("optimized", "aligned", "random", "zero"):
            raise UsageError(f"unknown phase policy {self.phase_policy!r}")
        if self.trials and self.trials < 100:
            raise UsageError("Monte-Carlo columns need trials >= 100")

    def powers_dbm(self) -> list:
        n = int(np.floor((self.power_end - self.power_start) / self.power_step + 1e-9)) + 1
        return [self.power_start + i * self.power_step for i in range(n)]


def _fmt(x) -> str:
    return f"{x:.10g}"


def _resolve_phases(spec: SweepSpec, cfg: SystemConfig) -> tuple[PhaseConfig, dict]:
    """Phase pattern for the whole sweep, per the requested policy."""
    k, q = angle_gains(cfg.angles, spec.link)
    note = {"phase_policy": spec.phase_policy, "ga_power_dbm": None,
            "ga_mode": None}
    if spec.phase_policy == "zero":
        return PhaseConfig(np.zeros(cfg.N), cfg.bits), note
    if spec.phase_policy == "aligned":
        return aligned_phases(k, q, cfg.N, cfg.bits), note
    if spec.phase_policy == "random":
        return random_phases(cfg.N, cfg.bits, spec.seed), note
    # optimized: statistical CSI fixes the phases per sweep; tune the GA at
    # one operating point (midpoint unless overridden) and reuse everywhere.
    ga_dbm = (spec.ga_power_dbm if spec.ga_power_dbm is not None
              else (spec.power_start + spec.power_end) / 2.0)
    total = dbm_to_watt(ga_dbm)
    ga_mode = None
    for mode in ("active", "passive"):
        if mode not in spec.modes:
            continue
        try:
            budget = cf.split_budget(total, cfg, mode)
            ga_mode = mode
            break
        except InfeasibleBudgetError:
            continue
    if ga_mode is None:
        raise InfeasibleBudgetError(
            f"no requested mode is feasible at the GA power {ga_dbm} dBm")
    params = spec.ga_params or GAParams(seed=derive_seed(spec.seed, 71))
    cfg_ga = cfg.with_powers(budget.pt, budget.pr)
    result = optimize_rate(cfg_ga, spec.link, cfg.bits, params, mode=ga_mode)
    note.update(ga_power_dbm=ga_dbm, ga_mode=ga_mode,
                ga_best_rate=result.best_objective,
                ga_evaluations=result.evaluations)
    return result.best, note


def _closed_rate(cfg: SystemConfig, link: str, mode: str, f2: float) -> float:
    if link == "up":
        return (cf.rate_uplink_active_f2(cfg, f2) if mode == "active"
                else cf.rate_uplink_passive_f2(cfg, f2))
    return (cf.rate_downlink_active_f2(cfg, f2) if mode == "active"
            else cf.rate_downlink_passive_f2(cfg, f2))


def _row_eta(cfg: SystemConfig, link: str, mode: str, f2: float) -> float:
    if mode == "passive":
        return 1.0
    if link == "up":
        return cf.amplification_factor_up(cfg)
    return cf.beamforming_constants_down_f2(cfg, f2)[1]


def run_sweep(spec: SweepSpec, cfg: SystemConfig) -> tuple[list, dict]:
    """One row per (power, mode); infeasible points are marked, not dropped."""
    phases, phase_note = _resolve_phases(spec, cfg)
    f2 = (cf.f_abs2_up(cfg, phases) if spec.link == "up"
          else cf.f_abs2_down(cfg, phases))
    rows = []
    feasible_any = False
    for ip, dbm in enumerate(spec.powers_dbm()):
        total = dbm_to_watt(dbm)
        for im, mode in enumerate(spec.modes):
            row = {c: "" for c in CSV_COLUMNS}
            row.update(total_power_dbm=_fmt(dbm), mode=mode, f_abs2=_fmt(f2))
            try:
                budget = cf.split_budget(total, cfg, mode)
            except InfeasibleBudgetError:
                row["closed_form_rate"] = INFEASIBLE
                rows.append(row)
                continue
            feasible_any = True
            cfg_row = cfg.with_powers(budget.pt, budget.pr)
            row["closed_form_rate"] = _fmt(_closed_rate(cfg_row, spec.link, mode, f2))
            row["pt"] = _fmt(budget.pt)
            row["pr"] = _fmt(budget.pr)
            row["eta"] = _fmt(_row_eta(cfg_row, spec.link, mode, f2))
            if spec.trials:
                est = ergodic_rate(cfg_row, phases, spec.link, mode,
                                   spec.trials, derive_seed(spec.seed, ip, im))
                row["mc_rate"] = _fmt(est.mean)
                row["mc_stderr"] = _fmt(est.std_error)
            rows.append(row)
    if not feasible_any:
        raise InfeasibleBudgetError("every sweep point is infeasible in every mode")
    summary = {
        "schema_version": SCHEMA_VERSION,
        "link": spec.link,
        "modes": list(spec.modes),
        "power_start_dbm": spec.power_start,
        "power_end_dbm": spec.power_end,
        "power_step_dbm": spec.power_step,
        "trials": spec.trials,
        "seed": spec.seed,
        "f_abs2": f2,
        "phases": [float(t) for t in phases.thetas],
        "phase_bits": phases.bits,
        "rows": rows,
    }
    summary.update(phase_note)
    return rows, summary


def detect_crossover(rows: list) -> dict:
    """Sign structure of (active - passive) closed-form rate vs power.

    Infeasible points count as zero rate: a mode that cannot operate
    delivers nothing, so the feasible mode wins the comparison there.
    """
    by_power = {}
    for row in rows:
        rate = 0.0 if row["closed_form_rate"] == INFEASIBLE else float(row["closed_form_rate"])
        by_power.setdefault(float(row["total_power_dbm"]), {})[row["mode"]] = rate
    powers = sorted(by_power)
    diffs = [by_power[p].get("active", 0.0) - by_power[p].get("passive", 0.0)
             for p in powers]
    crossings = []
    for i in range(len(diffs) - 1):
        if diffs[i] * diffs[i + 1] < 0:
            crossings.append([powers[i], powers[i + 1]])
    return {
        "powers_dbm": powers,
        "active_minus_passive": diffs,
        "sign_changes": len(crossings),
        "crossover_between_dbm": crossings,
        "negative_at_low_end": bool(diffs and diffs[0] < 0),
        "positive_at_high_end": bool(diffs and diffs[-1] > 0),
    }


# ---------------------------------------------------------------------------
# argument handling

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="active-ris", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON config file (defaults applied)")
        sp.add_argument("--seed", type=int, default=1)
        sp.add_argument("--trials", type=int, default=None)
        sp.add_argument("--bits", type=int, default=None,
                        help="override phase quantization depth")

    for name in ("sweep", "compare"):
        sp = sub.add_parser(name, help=f"{name} rates over a power range")
        common(sp)
        sp.add_argument("--link", choices=("up", "down"), default="up")
        sp.add_argument("--mode", choices=("active", "passive", "both"),
                        default="both")
        sp.add_argument("--power-start", type=float, default=10.0)
        sp.add_argument("--power-end", type=float, default=50.0)
        sp.add_argument("--power-step", type=float, default=5.0)
        sp.add_argument("--phase-policy", default="aligned",
                        choices=("optimized", "aligned", "random", "zero"))
        sp.add_argument("--ga-power-dbm", type=float, default=None)
        sp.add_argument("--out", required=True, help="output CSV path")
        sp.add_argument("--plot", default=None, help="optional SVG path")

    sp = sub.add_parser("validate", help="moment and rate validation report")
    common(sp)
    sp.add_argument("--phase-policy", default="aligned",
                    choices=("aligned", "random", "zero"))
    sp.add_argument("--out", default=None, help="optional JSON report path")

    sp = sub.add_parser("optimize", help="GA phase optimization")
    common(sp)
    sp.add_argument("--link", choices=("up", "down"), default="up")
    sp.add_argument("--mode", choices=("active", "passive"), default="active")
    sp.add_argument("--population", type=int, default=100)
    sp.add_argument("--generations", type=int, default=200)
    sp.add_argument("--out", required=True, help="output JSON path")
    return p


def _load_cfg(args) -> SystemConfig:
    cfg = load_config(args.config) if args.config else default_config()
    if getattr(args, "bits", None) is not None:
        cfg = SystemConfig(**{**_cfg_kwargs(cfg), "bits": args.bits})
    return cfg


def _cfg_kwargs(cfg: SystemConfig) -> dict:
    from dataclasses import asdict
    d = asdict(cfg)
    d["angles"] = cfg.angles
    return d


def _write_csv(path, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(str(row[c]) for c in CSV_COLUMNS) + "\n")


def _write_json(path, doc):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _json_sibling(out_csv: str) -> str:
    return (out_csv[:-4] if out_csv.endswith(".csv") else out_csv) + ".json"


def _cmd_sweep(args, compare: bool) -> int:
    cfg = _load_cfg(args)
    modes = ("active", "passive") if (compare or args.mode == "both") else (args.mode,)
    spec = SweepSpec(
        link=args.link, power_start=args.power_start, power_end=args.power_end,
        power_step=args.power_step, modes=modes, phase_policy=args.phase_policy,
        trials=args.trials or 0, seed=args.seed, ga_power_dbm=args.ga_power_dbm)
    try:
        rows, summary = run_sweep(spec, cfg)
    except InfeasibleBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    if compare:
        summary["crossover"] = detect_crossover(rows)
    _write_csv(args.out, rows)
    _write_json(_json_sibling(args.out), summary)
    if args.plot:
        columns = ["closed_form_rate"] + (["mc_rate"] if spec.trials else [])
        emit_plot(args.out, columns, args.plot)
    feasible = sum(1 for r in rows if r["closed_form_rate"] != INFEASIBLE)
    print(f"wrote {len(rows)} rows ({feasible} feasible) to {args.out}")
    if compare:
        x = summary["crossover"]
        print(f"active-passive sign changes: {x['sign_changes']} "
              f"at {x['crossover_between_dbm']}")
    return 0


def _cmd_validate(args) -> int:
    cfg = _load_cfg(args)
    k, q = angle_gains(cfg.angles, "up")
    if args.phase_policy == "zero":
        phases = PhaseConfig(np.zeros(cfg.N), cfg.bits)
    elif args.phase_policy == "random":
        phases = random_phases(cfg.N, cfg.bits, args.seed)
    else:
        phases = aligned_phases(k, q, cfg.N, cfg.bits)
    trials = args.trials if args.trials else 100_000
    report = validate_all(cfg, phases, trials=trials, seed=args.seed)
    sys.stdout.write(report.to_text())
    if args.out:
        _write_json(args.out, report.to_dict())
    return 0 if report.exact_rows_pass else 2


def _cmd_optimize(args) -> int:
    cfg = _load_cfg(args)
    params = GAParams(population=args.population, generations=args.generations,
                      seed=args.seed)
    result = optimize_rate(cfg, args.link, cfg.bits, params, mode=args.mode)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "link": args.link,
        "mode": args.mode,
        "bits": cfg.bits,
        "seed": args.seed,
        "best_rate": result.best_objective,
        "best_phases": [float(t) for t in result.best.thetas],
        "evaluations": result.evaluations,
    }
    _write_json(args.out, doc)
    hist_path = _json_sibling(args.out)[:-5] + "_history.csv"
    with open(hist_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("generation,best_rate\n")
        for g, v in enumerate(result.history):
            fh.write(f"{g},{_fmt(v)}\n")
    print(f"best rate {_fmt(result.best_objective)} bits/s/Hz "
          f"({result.evaluations} evaluations); wrote {args.out}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "sweep":
            return _cmd_sweep(args, compare=False)
        if args.command == "compare":
            return _cmd_sweep(args, compare=True)
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "optimize":
            return _cmd_optimize(args)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
