import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from unittest import mock

from pvextract.benchmarks import default_bounds
from pvextract.data import IVDataset
from pvextract.model import OperatingCondition
from pvextract.de import (DEConfig, Population, bounce_back, crossover_binomial, init_population,
                          make_rng, mutate_rand1, run_de, select_survivor)
from pvextract.objective import ParamBounds, sse


class StubRng:
    """Replays fixed uniforms and integers; mimics the Generator calls DE uses."""

    def __init__(self, uniforms=(), integers=()):
        self.u = list(uniforms)
        self.k = list(integers)

    def random(self, shape=None):
        n = int(np.prod(shape)) if shape is not None else 1
        out, self.u = self.u[:n], self.u[n:]
        return np.array(out).reshape(shape) if shape is not None else out[0]

    def integers(self, lo, hi, size=None):
        n = int(np.prod(size)) if size is not None else 1
        out, self.k = self.k[:n], self.k[n:]
        return np.array(out).reshape(size) if size is not None else out[0]


BOX = ParamBounds([0.0, -1.0], [1.0, 1.0])
TINY = IVDataset("tiny", np.array([0.0, 0.3, 0.5]), np.array([0.76, 0.74, 0.5]),
                 OperatingCondition.from_celsius(33.0))


def test_config_validation():
    for bad in (dict(np=3), dict(cr=1.5), dict(f=0.0), dict(g=0), dict(early_stop=0)):
        with pytest.raises(ValueError):
            DEConfig(**bad)
    assert DEConfig.for_model("ddm").g == 1600
    assert DEConfig.for_model("sdm", seed=4).seed == 4


def test_init_population_degenerate_bounds():
    b = ParamBounds([0.5, 0.2], [0.5, 0.2])
    pop = init_population(b, DEConfig(np=6), make_rng(0), lambda x: np.zeros(len(x)))
    assert np.all(pop.vectors == [0.5, 0.2])


def test_init_population_within_bounds_and_deterministic():
    b = default_bounds("sdm", "rtc_france")
    f = lambda x: np.zeros(len(x))  # noqa: E731
    p1 = init_population(b, DEConfig(), make_rng(9), f)
    p2 = init_population(b, DEConfig(), make_rng(9), f)
    assert p1.vectors.shape == (50, 5)
    assert np.all((p1.vectors >= b.lower) & (p1.vectors <= b.upper))
    assert np.array_equal(p1.vectors, p2.vectors)


def test_mutation_identical_vectors():
    x = np.tile([0.3, 0.4], (5, 1))
    assert np.array_equal(mutate_rand1(x, 0, 0.9, make_rng(1)), [0.3, 0.4])


def test_mutation_f_zero_returns_base_vector():
    x = np.arange(10.0).reshape(5, 2)
    donor = mutate_rand1(x, 0, 0.0, StubRng(integers=[3, 1, 2]))
    assert np.array_equal(donor, x[3])


def test_mutation_with_known_indices():
    x = np.array([[0.0, 0.0], [0.1, 0.9], [0.5, 0.2], [0.3, 0.7], [0.8, 0.4]])
    # the first draw (0, 2, 3) hits the target 0 and is redrawn
    donor = mutate_rand1(x, 0, 0.9, StubRng(integers=[0, 2, 3, 4, 1, 2]))
    assert donor == pytest.approx([0.8 + 0.9 * (0.1 - 0.5), 0.4 + 0.9 * (0.9 - 0.2)], abs=1e-15)


def test_mutation_indices_distinct():
    rng = make_rng(3)
    x = np.arange(12.0).reshape(4, 3)  # with np=4 the triple is forced
    for _ in range(100):
        donor = mutate_rand1(x, 2, 1.0, rng)
        a, b, c = 0, 1, 3
        options = {tuple(x[p] + (x[q] - x[r])) for p, q, r in
                   [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]}
        assert tuple(donor) in options


def test_mutation_needs_four_vectors():
    with pytest.raises(ValueError):
        mutate_rand1(np.zeros((3, 2)), 0, 0.5, make_rng(0))


def test_bounce_back_inside_unchanged():
    v = np.array([0.5, 0.0])
    assert np.array_equal(bounce_back(v, [0.2, 0.2], BOX, StubRng(uniforms=[0.3, 0.3])), v)


def test_bounce_back_lower_branch_u0():
    out = bounce_back([-0.5, 0.0], [0.2, 0.3], BOX, StubRng(uniforms=[0.0, 0.7]))
    assert np.array_equal(out, [0.0, 0.0])


def test_bounce_back_upper_branch_u1():
    out = bounce_back([0.5, 3.0], [0.2, 0.3], BOX, StubRng(uniforms=[0.9, 1.0]))
    assert out == pytest.approx([0.5, 0.3], abs=1e-15)


def test_bounce_back_formula():
    out = bounce_back([-2.0, 2.0], [0.6, -0.5], BOX, StubRng(uniforms=[0.25, 0.5]))
    assert out == pytest.approx([0.0 + 0.25 * 0.6, 1.0 - 0.5 * 1.5])


def test_crossover_cr_one_takes_donor():
    v, x = np.arange(5.0), -np.arange(5.0) - 1
    assert np.array_equal(crossover_binomial(v, x, 1.0, make_rng(2)), v)


def test_crossover_cr_zero_changes_one_component():
    v, x = np.arange(5.0), -np.arange(5.0) - 1
    for seed in range(20):
        t = crossover_binomial(v, x, 0.0, make_rng(seed))
        assert np.count_nonzero(t != x) == 1


def test_crossover_stubbed_mask():
    v, x = np.arange(5.0), -np.arange(5.0) - 1
    t = crossover_binomial(v, x, 0.6, StubRng(uniforms=[0.1, 0.9, 0.6, 0.95, 0.7], integers=[4]))
    # components 0 and 2 pass u <= cr (0.6 counts), 4 is forced
    assert np.array_equal(t, [0.0, -2.0, 2.0, -4.0, 4.0])


@pytest.mark.parametrize("ft, fx, want", [(1.0, 2.0, "trial"), (2.0, 2.0, "trial"), (3.0, 2.0, "target")])
def test_selection(ft, fx, want):
    trial, target = np.array([1.0, 1.0]), np.array([0.0, 0.0])
    out = select_survivor(trial, target, ft, fx)
    assert np.array_equal(out, trial if want == "trial" else target)


def test_point_bounds(tiny):
    theta = np.array([0.76, 0.3, 1.5, 0.03, 50.0])
    r = run_de("sdm", tiny, ParamBounds.point(theta), DEConfig(np=5, g=3))
    assert np.array_equal(r.best_theta, theta)
    assert r.best_sse == sse(theta, "sdm", tiny)


def test_bounds_dimension_checked(tiny):
    with pytest.raises(ValueError):
        run_de("ddm", tiny, default_bounds("sdm", "rtc_france"), DEConfig(np=5, g=2))


def test_early_stop(tiny):
    theta = np.array([0.76, 0.3, 1.5, 0.03, 50.0])
    r = run_de("sdm", tiny, ParamBounds.point(theta), DEConfig(np=5, g=100, early_stop=3))
    assert r.generations == 3 and r.n_evals == 5 * 4 and len(r.history) == 4


def test_overflowing_candidates_lose(tiny):
    d = IVDataset("hot", np.array([20.0, 30.0]), np.array([0.1, 0.2]), tiny.condition)
    r = run_de("sdm", d, default_bounds("sdm", "rtc_france"), DEConfig(np=8, g=5, seed=1))
    assert r.n_overflow > 0
    assert np.isfinite(r.best_sse) or r.best_sse == np.inf


# ---------------------------------------------------------------------------
# properties over random small instances
# ---------------------------------------------------------------------------

configs = st.builds(
    DEConfig,
    np=st.integers(4, 12), cr=st.floats(0, 1), f=st.floats(0.05, 2.0),
    g=st.integers(1, 15), seed=st.integers(0, 2**32),
)


@settings(max_examples=200)
@given(cfg=configs)
def test_elitism_feasibility_and_budget(cfg):
    bounds = default_bounds("sdm", "rtc_france")
    seen = []

    def check(pop: Population):
        assert np.all((pop.vectors >= bounds.lower) & (pop.vectors <= bounds.upper))
        seen.append(pop.fitness.min())

    r = run_de("sdm", TINY, bounds, cfg, callback=check)
    assert np.all(np.diff(seen) <= 0)
    assert np.all(np.diff(r.history) <= 0)
    assert r.n_evals == cfg.np * (cfg.g + 1)
    assert len(r.history) == cfg.g + 1


@settings(max_examples=100)
@given(cfg=configs)
def test_determinism(cfg):
    bounds = default_bounds("sdm", "rtc_france")
    assert run_de("sdm", TINY, bounds, cfg).same_as(run_de("sdm", TINY, bounds, cfg))


@settings(max_examples=100)
@given(cfg=configs)
def test_flat_objective_every_trial_survives(cfg):
    flat = lambda x, *a, **k: np.ones(np.atleast_2d(x).shape[0])  # noqa: E731
    cfg = DEConfig(np=cfg.np, cr=1.0, f=cfg.f, g=1, seed=cfg.seed)
    bounds = default_bounds("sdm", "rtc_france")
    populations = []
    with mock.patch("pvextract.de.sse_batch", flat):
        run_de("sdm", TINY, bounds, cfg, callback=lambda p: populations.append(p.vectors.copy()))
    before, after = populations
    # with cr = 1 every trial is its repaired donor; all of them replace their targets
    assert not np.any(np.all(before == after, axis=1))
