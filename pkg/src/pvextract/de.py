"""Classic DE/rand/1/bin differential evolution with bounce-back repair.

Each generation is synchronous: all donors are built from the current
population, and survivors form the next one. Operators accept a single vector
or a whole population (leading axis), and draw all their randomness from the
``rng`` argument through ``rng.random(shape)`` and ``rng.integers(lo, hi, size)``
only, so tests can substitute a stub stream.

Random draw order per generation: mutation indices, bounce-back uniforms,
crossover uniforms, crossover forced indices. Together with the PCG64
generator this makes a run a pure function of its seed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .data import IVDataset
from .objective import ModelKind, ParamBounds, rmse_from_sse, sse_batch


@dataclass(frozen=True)
class DEConfig:
    """DE control parameters.

    ``early_stop`` is the number of generations without improvement of the
    best SSE after which the run stops; ``None`` runs all ``g`` generations.
    """

    np: int = 50
    cr: float = 0.6
    f: float = 0.9
    g: int = 800
    seed: int = 0
    early_stop: int | None = None

    def __post_init__(self):
        if int(self.np) != self.np or self.np < 4:
            raise ValueError(f"population size np must be an integer >= 4, got {self.np!r}")
        if not 0.0 <= self.cr <= 1.0:
            raise ValueError(f"crossover rate cr must lie in [0, 1], got {self.cr!r}")
        if not self.f > 0:
            raise ValueError(f"scaling factor f must be > 0, got {self.f!r}")
        if int(self.g) != self.g or self.g < 1:
            raise ValueError(f"generation count g must be an integer >= 1, got {self.g!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.early_stop is not None and self.early_stop < 1:
            raise ValueError("early_stop must be None or >= 1")

    @classmethod
    def for_model(cls, model, **overrides) -> "DEConfig":
        from .benchmarks import DE_SETTINGS

        return cls(**{**DE_SETTINGS[ModelKind.parse(model)], **overrides})


@dataclass
class Population:
    vectors: np.ndarray
    fitness: np.ndarray
    generation: int = 0

    @property
    def best_index(self) -> int:
        return int(np.argmin(self.fitness))


@dataclass
class FitResult:
    model: ModelKind
    best_theta: np.ndarray
    best_sse: float
    best_rmse: float
    history: np.ndarray  # best RMSE after initialisation and after each generation
    n_evals: int
    runtime: float
    seed: int
    n_overflow: int = 0
    generations: int = 0
    final_population: Population | None = field(default=None, repr=False)

    def same_as(self, other: "FitResult") -> bool:
        """Bitwise equality of everything except the runtime."""
        return (
            self.model is other.model
            and np.array_equal(self.best_theta, other.best_theta)
            and self.best_sse == other.best_sse
            and np.array_equal(self.history, other.history)
            and self.n_evals == other.n_evals
            and self.seed == other.seed
            and self.n_overflow == other.n_overflow
        )


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 stream for ``seed``."""
    return np.random.Generator(np.random.PCG64(seed))


def init_population(bounds: ParamBounds, cfg: DEConfig, rng,
                    fitness: Callable[[np.ndarray], np.ndarray]) -> Population:
    """Uniform random population inside ``bounds``, with fitness evaluated."""
    u = rng.random((cfg.np, len(bounds)))
    x = bounds.lower + u * (bounds.upper - bounds.lower)
    # lower + u*(upper-lower) can round one ulp past upper
    x = np.clip(x, bounds.lower, bounds.upper)
    return Population(x, np.asarray(fitness(x), dtype=float), 0)


def _distinct_triples(rng, n_pop: int, targets: np.ndarray) -> np.ndarray:
    """Rejection-sample (a, b, c) per target, mutually distinct and != target."""
    abc = np.asarray(rng.integers(0, n_pop, size=(targets.size, 3)))
    while True:
        bad = (
            (abc[:, 0] == abc[:, 1]) | (abc[:, 0] == abc[:, 2]) | (abc[:, 1] == abc[:, 2])
            | (abc == targets[:, None]).any(axis=1)
        )
        if not bad.any():
            return abc
        abc[bad] = np.asarray(rng.integers(0, n_pop, size=(int(bad.sum()), 3)))


def mutate_rand1(pop, i, f: float, rng) -> np.ndarray:
    """Donor ``x_a + f (x_b - x_c)`` for target index (or index array) ``i``.

    ``pop`` is a :class:`Population` or an array of vectors. Donors may leave
    the bounds; see :func:`bounce_back`.
    """
    x = pop.vectors if isinstance(pop, Population) else np.asarray(pop, float)
    if x.shape[0] < 4:
        raise ValueError("DE/rand/1 needs a population of at least 4 vectors")
    targets = np.atleast_1d(np.asarray(i))
    abc = _distinct_triples(rng, x.shape[0], targets)
    donors = x[abc[:, 0]] + f * (x[abc[:, 1]] - x[abc[:, 2]])
    return donors[0] if np.ndim(i) == 0 else donors


def bounce_back(v, x_target, bounds: ParamBounds, rng) -> np.ndarray:
    """Move each out-of-range donor component between its violated bound and the target."""
    v = np.array(v, dtype=float)
    x_target = np.asarray(x_target, dtype=float)
    u = np.asarray(rng.random(v.shape))
    lo, hi = bounds.lower, bounds.upper
    below = v < lo
    above = v > hi
    v = np.where(below, lo + u * (x_target - lo), v)
    v = np.where(above, hi - u * (hi - x_target), v)
    return np.clip(v, lo, hi)


def crossover_binomial(v, x_target, cr: float, rng) -> np.ndarray:
    """Binomial crossover; one forced component per vector always comes from ``v``."""
    v = np.asarray(v, dtype=float)
    x_target = np.asarray(x_target, dtype=float)
    n = v.shape[-1]
    mask = np.asarray(rng.random(v.shape)) <= cr
    beta = np.asarray(rng.integers(0, n, size=v.shape[:-1]))
    if v.ndim == 1:
        mask[int(beta)] = True
    else:
        mask[np.arange(v.shape[0]), beta] = True
    return np.where(mask, v, x_target)


def select_survivor(trial, x_target, f_trial, f_target):
    """Trial survives iff its fitness is no worse than the target's (ties go to the trial)."""
    keep = np.asarray(f_trial) <= np.asarray(f_target)
    if np.ndim(trial) == 1:
        return np.array(trial if keep else x_target, dtype=float)
    return np.where(keep[:, None], trial, x_target)


def run_de(model, d: IVDataset, bounds: ParamBounds, cfg: DEConfig,
           callback: Callable[[Population], None] | None = None,
           compensated: bool = False) -> FitResult:
    """Fit ``model`` to ``d`` by minimising the SSE.

    A candidate whose evaluation overflows gets fitness ``+inf`` and so loses
    selection; such evaluations are counted in ``n_overflow``. ``callback`` is
    called with the population after initialisation and after every generation.
    """
    model = ModelKind.parse(model)
    bounds.check(model)
    t0 = time.perf_counter()
    rng = make_rng(cfg.seed)
    n_overflow = 0

    def fitness(x):
        nonlocal n_overflow
        s = sse_batch(x, model, d, compensated)
        n_overflow += int(np.count_nonzero(np.isinf(s)))
        return s

    n = len(d)
    pop = init_population(bounds, cfg, rng, fitness)
    n_evals = cfg.np
    best = float(pop.fitness.min())
    history = [rmse_from_sse(best, n) if np.isfinite(best) else np.inf]
    if callback is not None:
        callback(pop)

    targets = np.arange(cfg.np)
    stagnant = 0
    for gen in range(1, cfg.g + 1):
        donors = mutate_rand1(pop, targets, cfg.f, rng)
        donors = bounce_back(donors, pop.vectors, bounds, rng)
        trials = crossover_binomial(donors, pop.vectors, cfg.cr, rng)
        f_trials = fitness(trials)
        n_evals += cfg.np
        keep = f_trials <= pop.fitness
        pop = Population(
            np.where(keep[:, None], trials, pop.vectors),
            np.where(keep, f_trials, pop.fitness),
            gen,
        )
        new_best = float(pop.fitness.min())
        stagnant = stagnant + 1 if new_best >= best else 0
        best = new_best
        history.append(rmse_from_sse(best, n) if np.isfinite(best) else np.inf)
        if callback is not None:
            callback(pop)
        if cfg.early_stop is not None and stagnant >= cfg.early_stop:
            break

    k = pop.best_index
    return FitResult(
        model=model,
        best_theta=pop.vectors[k].copy(),
        best_sse=float(pop.fitness[k]),
        best_rmse=rmse_from_sse(float(pop.fitness[k]), n),
        history=np.array(history),
        n_evals=n_evals,
        runtime=time.perf_counter() - t0,
        seed=cfg.seed,
        n_overflow=n_overflow,
        generations=pop.generation,
        final_population=pop,
    )
