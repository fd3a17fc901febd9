"""Discrete phase-shift optimization.

The search space is the b-bit phase alphabet per RIS element; the default
objective is the closed-form rate, which depends on the phases only
through |f|^2, so an |f|^2 objective is also provided for cheap
benchmarking.  A seeded genetic algorithm does the real work; an
exhaustive search over tiny instances serves as the global-optimum
oracle, and quantized-aligned / all-zero / random patterns are the
baselines.
"""

from dataclasses import dataclass, field

import numpy as np

from . import closed_form as cf
from .config import SystemConfig
from .geometry import PhaseConfig, aligned_phases, angle_gains, f_scalar_batch
from .rng import stream

TWO_PI = 2.0 * np.pi


@dataclass
class GAParams:
    population: int = 100
    generations: int = 200
    crossover_prob: float = 0.8
    mutation_prob: float | None = None   # None -> 1/N per gene
    elite_fraction: float = 0.05
    tournament_size: int = 2
    seed: int = 1

    def __post_init__(self):
        if self.population < 4:
            raise ValueError("population must be >= 4")
        for name in ("crossover_prob", "elite_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.mutation_prob is not None and not 0.0 <= self.mutation_prob <= 1.0:
            raise ValueError("mutation_prob must be in [0, 1]")
        if int(self.elite_fraction * self.population) < 1:
            raise ValueError("elite_fraction * population must be >= 1")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be >= 1")


@dataclass
class OptimizationResult:
    best: PhaseConfig
    best_objective: float
    history: list = field(default_factory=list)
    evaluations: int = 0


def _genome_to_phases(genome: np.ndarray, bits: int) -> PhaseConfig:
    step = TWO_PI / (1 << bits)
    return PhaseConfig(genome * step, bits)


def ga_optimize(objective, N: int, bits: int, params: GAParams,
                seed_configs=()) -> OptimizationResult:
    """Maximize ``objective`` over b-bit phase patterns with a GA.

    Stages: population initialization, fitness evaluation, tournament
    selection, uniform crossover, per-gene mutation, elitism.  The
    initial population always contains the all-zero pattern plus any
    ``seed_configs`` (e.g. the quantized-aligned baseline), so with
    elitism the result can never fall below those baselines.  Runs are
    bit-deterministic for a fixed params.seed.
    """
    if bits < 1:
        raise ValueError("GA needs a discrete alphabet (bits >= 1)")
    alphabet = 1 << bits
    step = TWO_PI / alphabet
    rng = stream(params.seed, 0xA11E)
    pop = rng.integers(0, alphabet, size=(params.population, N), dtype=np.int64)
    pop[0] = 0
    for i, pc in enumerate(seed_configs, start=1):
        if i >= params.population:
            break
        idx = np.round(np.asarray(pc.thetas) / step).astype(np.int64) % alphabet
        pop[i] = idx

    mut_p = params.mutation_prob if params.mutation_prob is not None else 1.0 / N
    n_elite = int(params.elite_fraction * params.population)

    def evaluate(genomes):
        return np.array([objective(_genome_to_phases(g, bits)) for g in genomes])

    fitness = evaluate(pop)
    evaluations = len(pop)
    best_i = int(np.argmax(fitness))
    best_genome = pop[best_i].copy()
    best_fit = float(fitness[best_i])
    history = [best_fit]

    for _ in range(params.generations):
        order = np.argsort(-fitness, kind="stable")
        elites = pop[order[:n_elite]]
        elite_fit = fitness[order[:n_elite]]

        n_children = params.population - n_elite
        # Tournament selection for both parent slots.
        draws = rng.integers(0, params.population,
                             size=(2, n_children, params.tournament_size))
        winners = draws[..., 0]
        for t in range(1, params.tournament_size):
            challenger = draws[..., t]
            better = fitness[challenger] > fitness[winners]
            winners = np.where(better, challenger, winners)
        pa, pb = pop[winners[0]], pop[winners[1]]

        cross = rng.random(n_children) < params.crossover_prob
        take_b = rng.random((n_children, N)) < 0.5
        children = np.where(cross[:, None] & take_b, pb, pa)

        mutate = rng.random((n_children, N)) < mut_p
        shifts = rng.integers(1, alphabet, size=(n_children, N), dtype=np.int64)
        children = np.where(mutate, (children + shifts) % alphabet, children)

        child_fit = evaluate(children)
        evaluations += n_children
        pop = np.concatenate([elites, children])
        fitness = np.concatenate([elite_fit, child_fit])

        gen_best = int(np.argmax(fitness))
        if fitness[gen_best] > best_fit:
            best_fit = float(fitness[gen_best])
            best_genome = pop[gen_best].copy()
        history.append(best_fit)

    return OptimizationResult(best=_genome_to_phases(best_genome, bits),
                              best_objective=best_fit, history=history,
                              evaluations=evaluations)


def exhaustive_search(objective, N: int, bits: int) -> OptimizationResult:
    """Exact argmax over all 2**(N*bits) patterns (tiny instances only).

    Ties resolve to the lexicographically smallest genome via strict
    improvement over an in-order scan.
    """
    if N * bits > 20:
        raise ValueError(f"instance too large: N*bits = {N * bits} > 20")
    alphabet = 1 << bits
    best_genome = None
    best_fit = -np.inf
    genome = np.zeros(N, dtype=np.int64)
    total = alphabet ** N
    for _ in range(total):
        fit = objective(_genome_to_phases(genome, bits))
        if fit > best_fit:
            best_fit = float(fit)
            best_genome = genome.copy()
        # odometer increment, last gene fastest (lexicographic order)
        for pos in range(N - 1, -1, -1):
            genome[pos] += 1
            if genome[pos] < alphabet:
                break
            genome[pos] = 0
    return OptimizationResult(best=_genome_to_phases(best_genome, bits),
                              best_objective=best_fit, history=[best_fit],
                              evaluations=total)


def random_phases(N: int, bits: int, seed: int) -> PhaseConfig:
    """Uniform i.i.d. pattern over the b-bit alphabet (continuous if 0)."""
    rng = stream(seed, 0x5A4D)
    if bits == 0:
        return PhaseConfig(rng.uniform(0.0, TWO_PI, size=N), 0)
    step = TWO_PI / (1 << bits)
    return PhaseConfig(rng.integers(0, 1 << bits, size=N) * step, bits)


# ---------------------------------------------------------------------------
# objectives and the wired-up rate optimizer

def f2_objective(k: float, q: float):
    """|f|^2 objective for a fixed geometry pair."""

    def objective(phases: PhaseConfig) -> float:
        f = f_scalar_batch(phases.thetas[None, :], k, q)[0]
        return float(f.real * f.real + f.imag * f.imag)

    return objective


def rate_objective(cfg: SystemConfig, link: str, mode: str = "active"):
    """Closed-form rate objective for the given link and mode."""
    table = {
        ("up", "active"): cf.rate_uplink_active_f2,
        ("up", "passive"): cf.rate_uplink_passive_f2,
        ("down", "active"): cf.rate_downlink_active_f2,
        ("down", "passive"): cf.rate_downlink_passive_f2,
    }
    try:
        rate_f2 = table[(link, mode)]
    except KeyError:
        raise ValueError(f"unknown link/mode {(link, mode)!r}") from None
    k, q = angle_gains(cfg.angles, link)

    def objective(phases: PhaseConfig) -> float:
        f = f_scalar_batch(phases.thetas[None, :], k, q)[0]
        return rate_f2(cfg, float(f.real * f.real + f.imag * f.imag))

    return objective


def optimize_rate(cfg: SystemConfig, link: str, bits: int,
                  params: GAParams, mode: str = "active") -> OptimizationResult:
    """GA rate maximization seeded with the quantized-aligned baseline."""
    k, q = angle_gains(cfg.angles, link)
    seeds = [aligned_phases(k, q, cfg.N, bits)]
    return ga_optimize(rate_objective(cfg, link, mode), cfg.N, bits, params,
                       seed_configs=seeds)
