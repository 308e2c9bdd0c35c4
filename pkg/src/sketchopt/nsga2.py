"""NSGA-II multi-objective evolutionary optimizer over bounded real genomes.

Standard components: fast non-dominated sorting, crowding distance,
crowded binary tournament selection, simulated binary crossover, bounded
polynomial mutation, and elitist (mu + lambda) truncation. Infeasible
individuals rank strictly below every feasible one (constraint-domination)
rather than receiving a numeric penalty, which keeps the scheme robust to
objective scaling.

Determinism contract: one seeded generator drives every stochastic step in
a fixed order, and objective evaluation is pure, so equal seeds produce
bit-identical histories regardless of how evaluations are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .errors import ConfigError, InfeasibleProblemError, ParamError
from .objective import ObjectiveVector

GENOME_DEDUP_TOL = 1e-9


@dataclass(frozen=True)
class OptConfig:
    """Optimizer settings; defaults are the conventional NSGA-II values."""

    population_size: int = 40
    generations: int = 60
    crossover_prob: float = 0.9
    mutation_prob: float | None = None  # None: 1 / genome_length
    eta_c: float = 20.0
    eta_m: float = 20.0
    seed: int = 0
    objectives: tuple[str, ...] = ("stress", "torsion")

    def validate(self) -> None:
        if self.population_size < 4 or self.population_size % 2:
            raise ConfigError(
                f"population_size must be even and >= 4, got {self.population_size}"
            )
        if self.generations < 0:
            raise ConfigError(f"generations must be >= 0, got {self.generations}")
        for name in ("crossover_prob", "mutation_prob"):
            p = getattr(self, name)
            if p is not None and not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {p}")
        if self.eta_c <= 0 or self.eta_m <= 0:
            raise ConfigError("eta_c and eta_m must be positive")


@dataclass
class Individual:
    """A genome with its evaluation and (after sorting) rank/crowding."""

    genome: tuple[float, ...]
    objectives: ObjectiveVector
    rank: int | None = None
    crowding: float | None = None

    @property
    def feasible(self) -> bool:
        return self.objectives.feasible


@dataclass(frozen=True)
class GenerationSnapshot:
    """Population state recorded after each generation's truncation."""

    index: int
    genomes: tuple[tuple[float, ...], ...]
    objectives: tuple[tuple[float, ...] | None, ...]
    ranks: tuple[int, ...]
    front_size: int
    hypervolume: float
    best: tuple[float, ...]  # per-objective feasible minimum


@dataclass(frozen=True)
class ParetoFront:
    """Rank-0 feasible individuals, deduplicated by genome."""

    members: tuple[Individual, ...]
    hypervolume_history: tuple[float, ...] = ()


def dominates(a: ObjectiveVector, b: ObjectiveVector) -> bool:
    """Minimization dominance with constraint handling.

    A feasible vector dominates any infeasible one; two infeasible vectors
    never dominate each other; between feasible vectors, a must be <= b
    everywhere and < somewhere.
    """
    if a.feasible and not b.feasible:
        return True
    if not a.feasible:
        return False
    if len(a.values) != len(b.values):
        raise ParamError(
            f"objective length mismatch: {len(a.values)} vs {len(b.values)}"
        )
    le = all(x <= y for x, y in zip(a.values, b.values))
    lt = any(x < y for x, y in zip(a.values, b.values))
    return le and lt


def _dominance_matrix(population: Sequence[Individual]) -> np.ndarray:
    """dom[i, j] = individual i dominates individual j."""
    n = len(population)
    feas = np.array([ind.feasible for ind in population])
    dom = np.zeros((n, n), dtype=bool)
    dom[np.ix_(feas, ~feas)] = True
    f_idx = np.flatnonzero(feas)
    if f_idx.size:
        V = np.array([population[i].objectives.values for i in f_idx])
        le = (V[:, None, :] <= V[None, :, :]).all(axis=2)
        lt = (V[:, None, :] < V[None, :, :]).any(axis=2)
        dom[np.ix_(f_idx, f_idx)] = le & lt
    return dom


def fast_nondominated_sort(population: Sequence[Individual]) -> list[list[int]]:
    """Partition the population into successive non-domination fronts.

    Assigns .rank in place and returns fronts as lists of indices. All
    infeasible individuals land in a front below every feasible one.
    """
    n = len(population)
    if n == 0:
        return []
    lens = {
        len(ind.objectives.values)
        for ind in population
        if ind.objectives.feasible
    }
    if len(lens) > 1:
        raise ParamError(f"mixed objective vector lengths: {sorted(lens)}")
    dom = _dominance_matrix(population)
    counts = dom.sum(axis=0).astype(np.int64)
    fronts: list[list[int]] = []
    remaining = np.ones(n, dtype=bool)
    rank = 0
    while remaining.any():
        members = np.flatnonzero(remaining & (counts == 0))
        if members.size == 0:  # pragma: no cover - dominance is acyclic
            members = np.flatnonzero(remaining)
        for i in members:
            population[i].rank = rank
            remaining[i] = False
        counts -= dom[members].sum(axis=0)
        fronts.append([int(i) for i in members])
        rank += 1
    return fronts


def crowding_distance(front: Sequence[Individual]) -> list[float]:
    """Crowding distances within one front; boundaries get +inf.

    Per objective, interior individuals accumulate the normalized gap
    between their neighbors; zero-range objectives contribute nothing.
    Infeasible fronts carry no objective values and get all zeros.
    """
    n = len(front)
    if n == 0:
        return []
    if not front[0].feasible:
        for ind in front:
            ind.crowding = 0.0
        return [0.0] * n
    if n == 1:
        front[0].crowding = math.inf
        return [math.inf]
    V = np.array([ind.objectives.values for ind in front])
    dist = np.zeros(n)
    for m in range(V.shape[1]):
        order = np.argsort(V[:, m], kind="stable")
        lo, hi = V[order[0], m], V[order[-1], m]
        dist[order[0]] = math.inf
        dist[order[-1]] = math.inf
        if hi > lo:
            gaps = (V[order[2:], m] - V[order[:-2], m]) / (hi - lo)
            dist[order[1:-1]] += gaps
    for ind, d in zip(front, dist):
        ind.crowding = float(d)
    return [float(d) for d in dist]


def tournament_select(
    population: Sequence[Individual], rng: np.random.Generator
) -> Individual:
    """Crowded binary tournament: lower rank wins, ties by larger
    crowding, remaining ties by draw order."""
    i, j = rng.integers(0, len(population), size=2)
    a, b = population[int(i)], population[int(j)]
    if b.rank < a.rank:
        return b
    if b.rank == a.rank and b.crowding > a.crowding:
        return b
    return a


def sbx_crossover(
    p1: Sequence[float],
    p2: Sequence[float],
    eta_c: float,
    bounds: Sequence[tuple[float, float]],
    rng: np.random.Generator,
) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Simulated binary crossover; each gene recombines with prob 0.5.

    The spread factor beta follows the standard polynomial distribution
    with index eta_c, so children straddle the parents with the parents'
    midpoint preserved per recombined gene (before clamping to bounds).
    Which child receives which side swaps per gene with prob 0.5; this
    gene exchange is what makes the operator recombine rather than merely
    perturb, and it is essential to convergence on separable problems.
    """
    p1 = np.asarray(p1, dtype=np.float64)
    p2 = np.asarray(p2, dtype=np.float64)
    n = p1.size
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    gate = rng.random(n) < 0.5
    u = rng.random(n)
    swap = rng.random(n) < 0.5
    beta = np.where(
        u <= 0.5,
        (2.0 * u) ** (1.0 / (eta_c + 1.0)),
        (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (eta_c + 1.0)),
    )
    a = 0.5 * ((1 + beta) * p1 + (1 - beta) * p2)
    b = 0.5 * ((1 - beta) * p1 + (1 + beta) * p2)
    a, b = np.where(swap, b, a), np.where(swap, a, b)
    c1 = np.where(gate, a, p1)
    c2 = np.where(gate, b, p2)
    c1 = np.clip(c1, lo, hi)
    c2 = np.clip(c2, lo, hi)
    return tuple(float(v) for v in c1), tuple(float(v) for v in c2)


def polynomial_mutation(
    genome: Sequence[float],
    eta_m: float,
    bounds: Sequence[tuple[float, float]],
    prob: float,
    rng: np.random.Generator,
) -> tuple[float, ...]:
    """Bounded polynomial mutation; each gene perturbs with prob `prob`.

    Uses the boundary-aware form: the perturbation support shrinks toward
    a bound so mutants stay inside without relying on the final clamp.
    """
    x = np.asarray(genome, dtype=np.float64).copy()
    n = x.size
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    gate = rng.random(n) < prob
    u = rng.random(n)
    span = hi - lo
    with np.errstate(divide="ignore", invalid="ignore"):
        d1 = np.where(span > 0, (x - lo) / span, 0.0)
        d2 = np.where(span > 0, (hi - x) / span, 0.0)
        mut_pow = 1.0 / (eta_m + 1.0)
        val_lo = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1) ** (eta_m + 1.0)
        val_hi = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2) ** (eta_m + 1.0)
        deltaq = np.where(u <= 0.5, val_lo**mut_pow - 1.0, 1.0 - val_hi**mut_pow)
    active = gate & (span > 0)
    x = np.where(active, x + deltaq * span, x)
    x = np.clip(x, lo, hi)
    return tuple(float(v) for v in x)


EvaluateFn = Callable[[tuple[float, ...]], ObjectiveVector]


def _sort_and_crowd(population: list[Individual]) -> list[list[int]]:
    fronts = fast_nondominated_sort(population)
    for front in fronts:
        crowding_distance([population[i] for i in front])
    return fronts


def _hv_2d(points: np.ndarray, ref: np.ndarray) -> float:
    order = np.lexsort((points[:, 1], points[:, 0]))
    pts = points[order]
    hv = 0.0
    best_f1 = ref[1]
    for f0, f1 in pts:
        if f1 < best_f1:
            hv += (ref[0] - f0) * (best_f1 - f1)
            best_f1 = f1
    return hv


def hypervolume(points: Sequence[Sequence[float]], ref: Sequence[float]) -> float:
    """Dominated hypervolume of a point set w.r.t. a reference point.

    Points are clipped to the reference box; minimization sense. Exact
    staircase sweep in 2D, recursive slicing for higher dimensions.
    """
    ref = np.asarray(ref, dtype=np.float64)
    if len(points) == 0:
        return 0.0
    pts = np.minimum(np.asarray(points, dtype=np.float64), ref)
    pts = np.unique(pts, axis=0)
    pts = pts[(pts < ref).any(axis=1)]
    if pts.size == 0:
        return 0.0
    m = ref.size
    if m == 1:
        return float(ref[0] - pts[:, 0].min())
    if m == 2:
        return _hv_2d(pts, ref)
    order = np.argsort(pts[:, -1], kind="stable")
    pts = pts[order]
    zs = np.append(np.unique(pts[:, -1]), ref[-1])
    hv = 0.0
    for z0, z1 in zip(zs[:-1], zs[1:]):
        if z1 <= z0:
            continue
        slab = pts[pts[:, -1] <= z0][:, :-1]
        hv += hypervolume(slab, ref[:-1]) * (z1 - z0)
    return hv


def _snapshot(
    index: int,
    population: list[Individual],
    ref: np.ndarray | None,
) -> GenerationSnapshot:
    feas_vals = [ind.objectives.values for ind in population if ind.feasible]
    front = [
        ind for ind in population if ind.rank == 0 and ind.feasible
    ]
    if ref is not None and front:
        hv = hypervolume([ind.objectives.values for ind in front], ref)
    else:
        hv = 0.0
    if feas_vals:
        arr = np.asarray(feas_vals)
        best = tuple(float(v) for v in arr.min(axis=0))
    else:
        best = ()
    return GenerationSnapshot(
        index=index,
        genomes=tuple(ind.genome for ind in population),
        objectives=tuple(
            ind.objectives.values if ind.feasible else None for ind in population
        ),
        ranks=tuple(int(ind.rank) for ind in population),
        front_size=len(front),
        hypervolume=float(hv),
        best=best,
    )


def _dedup_front(front: list[Individual]) -> list[Individual]:
    kept: list[Individual] = []
    for ind in front:
        g = np.asarray(ind.genome)
        if any(
            np.abs(g - np.asarray(k.genome)).max() <= GENOME_DEDUP_TOL
            for k in kept
        ):
            continue
        kept.append(ind)
    return kept


ProgressFn = Callable[[GenerationSnapshot], None]


def run_nsga2(
    evaluate: EvaluateFn,
    bounds: Sequence[tuple[float, float]],
    config: OptConfig,
    progress: ProgressFn | None = None,
) -> tuple[ParetoFront, list[GenerationSnapshot]]:
    """Run the full NSGA-II loop over a bounded real-valued problem.

    Returns the final rank-0 feasible front (deduplicated by genome) and
    one population snapshot per generation, the seed generation included.
    """
    config.validate()
    if not bounds:
        raise ConfigError("problem has no decision variables")
    for lo, hi in bounds:
        if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
            raise ConfigError(f"invalid bound [{lo}, {hi}]")
    rng = np.random.default_rng(config.seed)
    N = config.population_size
    n_genes = len(bounds)
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    mut_prob = (
        config.mutation_prob if config.mutation_prob is not None else 1.0 / n_genes
    )

    population: list[Individual] = []
    for _ in range(10):
        genomes = rng.uniform(lo, hi, size=(N, n_genes))
        population = [
            Individual(
                genome=tuple(float(v) for v in genomes[i]),
                objectives=evaluate(tuple(float(v) for v in genomes[i])),
            )
            for i in range(N)
        ]
        if any(ind.feasible for ind in population):
            break
    else:
        raise InfeasibleProblemError(
            "all individuals infeasible after 10 initialization attempts"
        )

    _sort_and_crowd(population)
    feas0 = [ind.objectives.values for ind in population if ind.feasible]
    ref = np.asarray(feas0).max(axis=0) if feas0 else None
    history = [_snapshot(0, population, ref)]
    if progress is not None:
        progress(history[0])

    for gen in range(1, config.generations + 1):
        children: list[Individual] = []
        while len(children) < N:
            pa = tournament_select(population, rng)
            pb = tournament_select(population, rng)
            if rng.random() < config.crossover_prob:
                g1, g2 = sbx_crossover(pa.genome, pb.genome, config.eta_c, bounds, rng)
            else:
                g1, g2 = pa.genome, pb.genome
            g1 = polynomial_mutation(g1, config.eta_m, bounds, mut_prob, rng)
            g2 = polynomial_mutation(g2, config.eta_m, bounds, mut_prob, rng)
            children.append(Individual(genome=g1, objectives=evaluate(g1)))
            children.append(Individual(genome=g2, objectives=evaluate(g2)))
        merged = population + children
        fronts = _sort_and_crowd(merged)
        survivors: list[Individual] = []
        for front in fronts:
            if len(survivors) + len(front) <= N:
                survivors.extend(merged[i] for i in front)
            else:
                room = N - len(survivors)
                # Highest crowding first; stable index order breaks ties.
                ranked = sorted(
                    front, key=lambda i: (-merged[i].crowding, i)
                )
                survivors.extend(merged[i] for i in ranked[:room])
            if len(survivors) == N:
                break
        population = survivors
        _sort_and_crowd(population)
        history.append(_snapshot(gen, population, ref))
        if progress is not None:
            progress(history[-1])

    final_front = [ind for ind in population if ind.rank == 0 and ind.feasible]
    pareto = ParetoFront(
        members=tuple(_dedup_front(final_front)),
        hypervolume_history=tuple(s.hypervolume for s in history),
    )
    return pareto, history


def evolve(
    graph,
    variables: Sequence,
    registry: dict,
    config: OptConfig,
    progress: ProgressFn | None = None,
) -> tuple[ParetoFront, list[GenerationSnapshot]]:
    """Optimize a parametric floorplan's design variables.

    Wires evaluate_objectives over (graph, variables) into the generic
    NSGA-II core; genome order follows ascending variable id.
    """
    from .objective import evaluate_objectives

    ordered = sorted(variables, key=lambda v: v.id)
    if not ordered:
        raise ConfigError("nothing to optimize: model has no design variables")
    bounds = [(v.lo, v.hi) for v in ordered]

    def evaluate(genome: tuple[float, ...]) -> ObjectiveVector:
        assignment = {v.id: g for v, g in zip(ordered, genome)}
        return evaluate_objectives(graph, list(ordered), assignment, registry)

    return run_nsga2(evaluate, bounds, config, progress=progress)


class NSGA2(BaseEstimator):
    """NSGA-II as an estimator: ``fit(evaluate, bounds)`` populates
    ``front_`` and ``history_``."""

    def __init__(
        self,
        population_size=40,
        generations=60,
        crossover_prob=0.9,
        mutation_prob=None,
        eta_c=20.0,
        eta_m=20.0,
        seed=0,
    ):
        self.population_size = population_size
        self.generations = generations
        self.crossover_prob = crossover_prob
        self.mutation_prob = mutation_prob
        self.eta_c = eta_c
        self.eta_m = eta_m
        self.seed = seed

    def config(self, objectives=("stress", "torsion")) -> OptConfig:
        return OptConfig(
            population_size=self.population_size,
            generations=self.generations,
            crossover_prob=self.crossover_prob,
            mutation_prob=self.mutation_prob,
            eta_c=self.eta_c,
            eta_m=self.eta_m,
            seed=self.seed,
            objectives=tuple(objectives),
        )

    def fit(self, evaluate: EvaluateFn, bounds: Sequence[tuple[float, float]]):
        front, history = run_nsga2(evaluate, bounds, self.config())
        self.front_ = front
        self.history_ = history
        return self
