"""
Tests: equilibrium oracles, reference trajectory, shuffling variance, bounds, metrics
"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from core.analysis import (
    ERROR_FLOOR,
    NEMethod,
    affine_system,
    disagreement_norm,
    error_metric,
    reference_trajectory,
    shuffle_variance_bound,
    shuffling_variance_mc,
    solve_ne,
    solve_ne_affine,
    solve_ne_fixed_point,
    theory_bounds,
)
from core.errors import BoundsError, MetricError, OracleError
from core.game import game_constants, make_ev_game
from core.sampling import Schedule, ScheduleKind, fresh_permutation


class TestAffineOracle:
    """EV equilibrium through the linear system"""

    def test_scalar_game(self, ev_game_factory):
        """n=1, q̄=2, d̄=1, b̄=0: x⋆ = 1"""
        game = ev_game_factory(1, 2, q=2.0, d=1.0)
        ne = solve_ne_affine(game)
        assert ne.x_star[0] == pytest.approx(1.0)
        assert ne.interior
        assert ne.method is NEMethod.AFFINE

    def test_symmetric_game(self, symmetric_game):
        """(x - 1) + 0.5x = 0 for both players"""
        ne = solve_ne_affine(symmetric_game)
        assert ne.x_star == pytest.approx([2 / 3, 2 / 3], abs=1e-12)

    def test_affine_system_uses_component_means(self, ev_game_factory):
        """M holds mean curvatures, v the mean q·d minus mean b"""
        game = ev_game_factory(1, 2, q=[[1.0, 3.0]], d=[[2.0, 0.0]], b=[[0.5, -0.1]])
        M, v = affine_system(game)
        assert M[0, 0] == pytest.approx(2.0)
        assert v[0] == pytest.approx(1.0 - 0.2)

    @pytest.mark.parametrize("seed", range(5))
    def test_residual(self, seed):
        """Benchmark equilibria solve the linear system to 1e-10"""
        ne = solve_ne_affine(make_ev_game(5, 10, seed=seed))
        assert ne.residual <= 1e-10

    def test_outside_box_falls_back(self, ev_game_factory):
        """Equilibrium of the unconstrained system outside the box: projected solution"""
        game = ev_game_factory(1, 1, q=2.0, d=1.0, lower=-1.0, upper=0.5)
        ne = solve_ne_affine(game)
        assert ne.method is NEMethod.FIXED_POINT
        assert not ne.interior
        assert ne.x_star[0] == pytest.approx(0.5)
        assert ne.projected_residual <= 1e-9

    def test_edge_game_rejected(self, edge_game):
        """Edge games have no affine system"""
        with pytest.raises(OracleError):
            solve_ne_affine(edge_game)


class TestFixedPointOracle:
    """Projected pseudo-gradient iteration"""

    def test_agrees_with_affine(self, ev_game):
        """Both oracles agree on an interior EV equilibrium"""
        affine = solve_ne_affine(ev_game)
        fixed = solve_ne_fixed_point(ev_game)
        assert np.max(np.abs(affine.x_star - fixed.x_star)) <= 1e-8

    def test_edge_game(self, edge_game):
        """Edge equilibrium found in the box with a small projected residual"""
        ne = solve_ne(edge_game)
        assert ne.method is NEMethod.FIXED_POINT
        assert ne.projected_residual <= 1e-6
        assert edge_game.box.contains(ne.x_star)

    def test_iteration_budget(self, ev_game):
        """One iteration is not enough to converge"""
        with pytest.raises(OracleError):
            solve_ne_fixed_point(ev_game, max_iters=1)


class TestReferenceTrajectory:
    """Equilibrium path under one permutation per player"""

    def _perms(self, game, seed):
        rng = np.random.default_rng(seed)
        return [fresh_permutation(rng, game.m) for _ in range(game.n)]

    def test_starts_at_equilibrium(self, ev_game):
        """First point is x⋆ and the path has m steps"""
        ne = solve_ne_affine(ev_game)
        trajectory = reference_trajectory(ev_game, ne, 0.01, self._perms(ev_game, 0))
        assert np.array_equal(trajectory.points[0], ne.x_star)
        assert trajectory.m == ev_game.m

    def test_returns_to_equilibrium(self, ev_game):
        """Interior equilibrium: a full pass sums to m∇F(x⋆) = 0"""
        ne = solve_ne_affine(ev_game)
        for seed in range(20):
            trajectory = reference_trajectory(ev_game, ne, 0.01, self._perms(ev_game, seed))
            assert trajectory.endpoint_gap() <= 1e-12

    def test_single_component(self, ev_game_factory):
        """m=1 at an interior equilibrium: the path never leaves x⋆"""
        game = ev_game_factory(2, 1, q=[[1.0], [2.0]], d=[[0.3], [0.6]])
        ne = solve_ne_affine(game)
        trajectory = reference_trajectory(game, ne, 0.1, np.zeros((2, 1), dtype=int))
        assert np.allclose(trajectory.points, ne.x_star[None, :], atol=1e-13)

    def test_accepts_order_array(self, ev_game):
        """An (n, m) index array works as the permutation set"""
        ne = solve_ne_affine(ev_game)
        orders = np.tile(np.arange(ev_game.m), (ev_game.n, 1))
        trajectory = reference_trajectory(ev_game, ne, 0.01, orders)
        assert trajectory.points.shape == (ev_game.m + 1, ev_game.n)

    def test_wrong_player_count(self, ev_game):
        """One permutation per player is required"""
        ne = solve_ne_affine(ev_game)
        with pytest.raises(ValueError):
            reference_trajectory(ev_game, ne, 0.01, np.zeros((ev_game.n + 1, ev_game.m), dtype=int))


class TestShufflingVariance:
    """Monte Carlo shuffling variance"""

    def test_single_component_is_zero(self, ev_game_factory):
        """m=1 has nothing to shuffle"""
        game = ev_game_factory(2, 1, q=[[1.0], [2.0]], d=[[0.3], [0.6]])
        ne = solve_ne_affine(game)
        estimate = shuffling_variance_mc(game, ne, 0.1, num_perms=16)
        assert np.all(estimate.sigma_shuffle_sq == 0.0)

    def test_dominated_by_bound(self, ev_game):
        """Estimate within three standard errors of its bound"""
        ne = solve_ne_affine(ev_game)
        constants = game_constants(ev_game, ne.x_star)
        alpha = 0.01
        estimate = shuffling_variance_mc(ev_game, ne, alpha, num_perms=256, rng=np.random.default_rng(0))
        bound = shuffle_variance_bound(alpha, constants, ev_game.m, ev_game.n)
        assert np.all(estimate.sigma_shuffle_sq <= bound + 3 * estimate.std_error)
        assert not estimate.approximate

    def test_quadratic_scaling_in_step(self, ev_game):
        """EV divergences are q/2 (α c)²: halving α quarters the estimate"""
        ne = solve_ne_affine(ev_game)
        big = shuffling_variance_mc(ev_game, ne, 0.02, num_perms=64, rng=np.random.default_rng(1))
        small = shuffling_variance_mc(ev_game, ne, 0.01, num_perms=64, rng=np.random.default_rng(1))
        assert small.sigma_shuffle_sq == pytest.approx(big.sigma_shuffle_sq / 4, rel=1e-6)

    def test_boundary_equilibrium_flagged(self, ev_game_factory):
        """Equilibrium on the box boundary marks the estimate approximate"""
        game = ev_game_factory(1, 3, q=2.0, d=[[1.0, 0.5, 1.5]], lower=-1.0, upper=0.5)
        ne = solve_ne_affine(game)
        assert shuffling_variance_mc(game, ne, 0.01, num_perms=8).approximate

    def test_needs_two_permutations(self, ev_game):
        """A standard error needs at least two samples"""
        ne = solve_ne_affine(ev_game)
        with pytest.raises(ValueError):
            shuffling_variance_mc(ev_game, ne, 0.01, num_perms=1)


class TestTheoryBounds:
    """Closed-form bounds for constant schedules"""

    def _bounds(self, constants, h, alpha, w=None, K=100):
        w = 0.5 * h.max_consensus_step() if w is None else w
        schedule = Schedule(kind=ScheduleKind.CONSTANT, alpha0=alpha, w0=w)
        return theory_bounds(constants, h, schedule, m=10, n=4, K=K, A0=2.0, ybar0_sq=0.0)

    def test_shuffle_variance_bound_formula(self, unit_constants):
        """α²Lmnσ⋆²/4 with unit constants"""
        value = shuffle_variance_bound(0.1, unit_constants, m=10, n=4)
        assert value == pytest.approx(0.01 * 4.0 * 10 * 4 * 0.1 / 4)

    def test_small_step_residuals_vanish(self, unit_constants, ring4_H):
        """Residuals shrink with the step size"""
        coarse = self._bounds(unit_constants, ring4_H, 1e-2)
        fine = self._bounds(unit_constants, ring4_H, 1e-6)
        assert fine.full_info_residual() < coarse.full_info_residual()
        assert fine.full_info_residual() < 1e-15
        assert fine.partial_info_residual() < coarse.partial_info_residual()

    def test_long_horizon_leaves_residual(self, unit_constants, ring4_H):
        """Long horizons leave only the residual terms"""
        bounds = self._bounds(unit_constants, ring4_H, 0.1)
        assert bounds.full_info_rhs(100_000) == pytest.approx(bounds.full_info_residual())
        assert bounds.partial_info_rhs(100_000) == pytest.approx(bounds.partial_info_residual())
        assert bounds.consensus_rhs(100_000) == pytest.approx(bounds.consensus_steady())

    def test_tracking_term_vanishes_for_exact_estimates(self, unit_constants, ring4_H):
        """ȳ0 = 0 removes the tracking transient"""
        bounds = self._bounds(unit_constants, ring4_H, 0.1)
        assert bounds.tracking_transient(50) == 0.0
        assert bounds.rho == max(bounds.r, bounds.s)

    def test_horizon_tuned_terms(self, unit_constants, ring4_H):
        """Horizon-tuned total is the sum of its terms"""
        terms = self._bounds(unit_constants, ring4_H, 0.1).horizon_tuned_rhs(100)
        assert terms["alpha_K"] == pytest.approx(4.0 * np.log(1000) / 1000)
        assert terms["total"] == pytest.approx(
            sum(value for key, value in terms.items() if key not in ("alpha_K", "total"))
        )

    def test_format_text(self, unit_constants, ring4_H):
        """Labeled text carries the bound values"""
        text = self._bounds(unit_constants, ring4_H, 0.1).format_text(100)
        assert "partial_info_rhs = " in text
        assert "horizon_tuned.alpha_K = " in text

    def test_diminishing_rejected(self, unit_constants, ring4_H):
        """Closed-form bounds exist for constant schedules only"""
        schedule = Schedule(kind=ScheduleKind.DIMINISHING, alpha0=0.1, w0=0.01)
        with pytest.raises(BoundsError):
            theory_bounds(unit_constants, ring4_H, schedule, 10, 4, 100, 1.0)

    def test_contraction_outside_unit_interval(self, unit_constants, ring4_H):
        """αμ = 2 gives r = 3"""
        with pytest.raises(BoundsError):
            self._bounds(unit_constants, ring4_H, 2.0)


class TestMetrics:
    """Error metric and disagreement"""

    def test_start_point_is_zero(self):
        """x = x0 gives e = 0"""
        assert error_metric([1.0, 2.0], [1.0, 2.0], [0.0, 0.0]) == 0.0

    def test_tenfold_reduction(self):
        """One tenth of the start distance gives e = -1"""
        assert error_metric([0.1, 0.0], [1.0, 0.0], [0.0, 0.0]) == pytest.approx(-1.0)

    def test_floor(self):
        """Exact hit is floored"""
        assert error_metric([0.0], [1.0], [0.0]) == ERROR_FLOOR

    def test_degenerate_normalization(self):
        """x0 = x⋆ cannot be normalized"""
        with pytest.raises(MetricError):
            error_metric([1.0], [0.0], [0.0])

    def test_disagreement(self):
        """Squared distance of every estimate row from x"""
        x = np.array([1.0, -2.0, 0.5])
        assert disagreement_norm(np.tile(x, (3, 1)), x) == 0.0
        y = np.tile(x, (3, 1))
        y[1, 2] += 0.5
        assert disagreement_norm(y, x) == pytest.approx(0.25)
