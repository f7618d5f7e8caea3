import itertools
import unittest

import numpy as np

import mmtsuite
from mmtsuite.costs import L1
from mmtsuite.norm import (NormBall, all_sigmas, check_sigma, eqn_main_vector, good_directions, good_pairs,
                           identity_sigma, pair_cost, polytope_gauge, sample_sigmas, search_sigmas, sigma_count)
from tests import cases


class LayoutTests(unittest.TestCase):
    def test_y_layout(self):
        layout = mmtsuite.label_layout(cases.y_boundary())
        self.assertEqual(layout.counts, (1, 1))
        self.assertEqual(layout.offsets, (0, 1))
        self.assertEqual(layout.material, (0, 1))
        self.assertEqual(layout.sources, (0, 0))
        self.assertEqual(layout.sinks, (1, 2))
        self.assertEqual(layout.total, 2)

    def test_irrigation_layout(self):
        layout = mmtsuite.label_layout(cases.irrigation_boundary())
        self.assertEqual(layout.counts, (2,))
        self.assertEqual(layout.sources, (0, 0))
        self.assertEqual(layout.sinks, (1, 2))
        self.assertEqual(list(layout.group(0)), [0, 1])

    def test_boundary_sigma(self):
        layout = mmtsuite.label_layout(cases.irrigation_boundary())
        identity = mmtsuite.boundary_sigma(layout, identity_sigma(layout))
        self.assertEqual(identity.atoms[1].weight, (1, 0))
        swapped = mmtsuite.boundary_sigma(layout, ((1, 0),))
        self.assertEqual(swapped.atoms[0].weight, (-1, -1))
        self.assertEqual(swapped.atoms[1].weight, (0, 1))
        self.assertEqual(swapped.atoms[2].weight, (1, 0))
        with self.assertRaisesRegex(mmtsuite.ValidationError, "not a permutation"):
            mmtsuite.boundary_sigma(layout, ((0, 0),))
        with self.assertRaisesRegex(mmtsuite.ValidationError, "permutations for"):
            check_sigma(layout, ((0, 1), (0,)))

    def test_sigma_enumeration(self):
        layout = mmtsuite.label_layout(cases.gs_mailing_boundary())
        self.assertEqual(layout.counts, (2, 1))
        self.assertEqual(sigma_count(layout), 2)
        self.assertEqual(list(all_sigmas(layout)), [((0, 1), (0,)), ((1, 0), (0,))])

    def test_sampled_sigmas(self):
        layout = mmtsuite.label_layout(cases.star_boundary(4))
        self.assertEqual(sigma_count(layout), 24)
        sample = sample_sigmas(layout, 5, seed=7)
        self.assertEqual(sample[0], identity_sigma(layout))
        self.assertLessEqual(len(sample), 5)
        self.assertEqual(len(set(sample)), len(sample))
        self.assertEqual(sample, sample_sigmas(layout, 5, seed=7))

        sigmas, mode = search_sigmas(layout, max_perms=10, seed=7)
        self.assertEqual(mode, "sampled")
        self.assertLessEqual(len(sigmas), 10)
        sigmas, mode = search_sigmas(layout, max_perms=100)
        self.assertEqual(mode, "exhaustive")
        self.assertEqual(len(sigmas), 24)

    def test_eqn_main_vector(self):
        layout = mmtsuite.label_layout(cases.gs_mailing_boundary())
        self.assertEqual(eqn_main_vector(layout, (-1, 1), ((1, 0), (0,))), (0, -1, 1))
        self.assertEqual(eqn_main_vector(layout, (2, 0), identity_sigma(layout)), (1, 1, 0))
        with self.assertRaisesRegex(mmtsuite.DomainError, "exceeds"):
            eqn_main_vector(layout, (3, 0), identity_sigma(layout))

    def test_good_directions_and_pairs(self):
        y = mmtsuite.label_layout(cases.y_boundary())
        irrigation = mmtsuite.label_layout(cases.irrigation_boundary())
        self.assertEqual(len(list(good_directions(y))), 8)
        self.assertEqual(len(list(good_directions(irrigation))), 6)
        pairs = list(good_pairs(y))
        self.assertEqual(len(pairs), 8)
        self.assertIn((frozenset({0}), frozenset({1})), pairs)
        self.assertNotIn((frozenset({0}), frozenset({1})), list(good_pairs(irrigation)))

    def test_pair_cost(self):
        y = mmtsuite.label_layout(cases.y_boundary())
        self.assertEqual(pair_cost(cases.mailing_steiner(), y, [0], [1]), 2.0)
        self.assertEqual(pair_cost(cases.mailing_steiner(), y, [0, 1], []), 1.0)
        irrigation = mmtsuite.label_layout(cases.irrigation_boundary())
        with self.assertRaisesRegex(mmtsuite.ValidationError, "not a good pair"):
            pair_cost(cases.affine_cost(0.5), irrigation, [0], [1])


class BallTests(unittest.TestCase):
    def test_polytope_gauge(self):
        diamond = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
        self.assertAlmostEqual(polytope_gauge(diamond, (1.0, 1.0)), 2.0)
        self.assertEqual(polytope_gauge(diamond, (0.0, 0.0)), 0.0)
        self.assertEqual(polytope_gauge(np.array([[1.0, 0.0]]), (0.0, 1.0)), float("inf"))

    def test_mailing_hexagon(self):
        layout = mmtsuite.label_layout(cases.y_boundary())
        ball = mmtsuite.build_ball(cases.mailing_steiner(), layout)
        self.assertFalse(ball.supersymmetric)
        self.assertEqual(len(ball.pieces), 4)
        np.testing.assert_allclose(ball.extreme_points(),
                                   [[-1, -1], [-1, 0], [0, -1], [0, 1], [1, 0], [1, 1]], atol=1e-9)
        self.assertAlmostEqual(ball.gauge((1, 1)), 1.0)
        self.assertAlmostEqual(ball.gauge((1, -1)), 2.0)
        self.assertAlmostEqual(mmtsuite.gauge(ball, (0.5, 0.25)), 0.5)
        self.assertTrue(ball.contains((0.5, 0.5)))
        self.assertFalse(ball.contains((1, -1)))
        self.assertEqual(len(ball.orthant_gauges((1, 1))), 4)
        self.assertEqual(len(ball.describe()["pieces"]), 4)
        with self.assertRaisesRegex(mmtsuite.ValidationError, "length"):
            ball.gauge((1, 1, 1))

    def test_eqn_main_holds(self):
        for boundary, cost in ((cases.y_boundary(), cases.mailing_steiner()),
                               (cases.gs_mailing_boundary(), cases.euclidean_cost()),
                               (cases.irrigation_boundary(), cases.affine_cost(0.25))):
            layout = mmtsuite.label_layout(boundary)
            for hull in ("full", "good_pairs"):
                with self.subTest(cost=cost.kind, hull=hull):
                    ball = mmtsuite.build_ball(cost, layout, hull=hull)
                    report = mmtsuite.verify_eqn_main(cost, ball, layout)
                    self.assertTrue(report.passed)
                    self.assertEqual(report.mode, "exhaustive")
                    self.assertIsNone(report.witness)

    def test_good_pairs_lie_on_the_sphere(self):
        for boundary, cost in ((cases.y_boundary(), cases.mailing_steiner()),
                               (cases.gs_mailing_boundary(), cases.euclidean_cost()),
                               (cases.irrigation_boundary(), cases.affine_cost(0.25))):
            layout = mmtsuite.label_layout(boundary)
            for hull in ("full", "good_pairs"):
                ball = mmtsuite.build_ball(cost, layout, hull=hull)
                for a, b in good_pairs(layout):
                    with self.subTest(cost=cost.kind, hull=hull, a=sorted(a), b=sorted(b)):
                        d = [(j in a) - (j in b) for j in range(layout.total)]
                        self.assertAlmostEqual(ball.gauge(d), pair_cost(cost, layout, a, b), places=9)

    def test_eqn_main_checked_count(self):
        layout = mmtsuite.label_layout(cases.gs_mailing_boundary())
        ball = mmtsuite.build_ball(cases.euclidean_cost(), layout)
        self.assertTrue(ball.supersymmetric)
        self.assertEqual(len(ball.pieces), 1)
        report = mmtsuite.verify_eqn_main(cases.euclidean_cost(), ball, layout)
        self.assertEqual(report.checked, 5 * 3 * 2)
        self.assertAlmostEqual(ball.gauge((1, 1, 1)), cases.SQRT5)

    def test_good_pairs_ball_is_smaller(self):
        layout = mmtsuite.label_layout(cases.irrigation_boundary())
        cost = cases.affine_cost(0.25)
        full = mmtsuite.build_ball(cost, layout)
        pairs = mmtsuite.build_ball(cost, layout, hull="good_pairs")
        self.assertAlmostEqual(full.gauge((1, 1)), 1.25)
        self.assertAlmostEqual(pairs.gauge((1, 1)), 1.25)
        self.assertAlmostEqual(full.gauge((1, -1)), 1.25)
        self.assertAlmostEqual(pairs.gauge((1, -1)), 2.0)

    def test_superlinear_cost_is_refused(self):
        layout = mmtsuite.label_layout(cases.irrigation_boundary())
        cost = mmtsuite.table({(1,): 1.0, (2,): 3.0}, 1)
        with self.assertRaises(mmtsuite.PreconditionError) as ctx:
            mmtsuite.build_ball(cost, layout)
        message = str(ctx.exception)
        self.assertIn("not sublinear", message)
        self.assertIn("axiom='sublinear'", message)
        self.assertNotIn("axiom='subadditive'", message)
        ball = mmtsuite.build_ball(cost, layout, enforce_axioms=False)
        report = mmtsuite.verify_eqn_main(cost, ball, layout)
        self.assertFalse(report.passed)
        self.assertAlmostEqual(report.max_residual, 1.0)
        self.assertEqual(abs(report.witness.theta[0]), 2)
        self.assertAlmostEqual(report.witness.gauge, 2.0)

    def test_refusal_lists_only_the_failing_axiom(self):
        layout = mmtsuite.label_layout(cases.gs_mailing_boundary())
        cost = mmtsuite.from_function(2, mmtsuite.mailing(0.0), star_norm=L1)
        with self.assertRaises(mmtsuite.PreconditionError) as ctx:
            mmtsuite.build_ball(cost, layout)
        message = str(ctx.exception)
        self.assertIn("axiom='sublinear'", message)
        self.assertIn("((-2, 0), (-2, 1))", message)
        self.assertNotIn("supersymmetric", message)

    def test_build_ball_limits(self):
        layout = mmtsuite.label_layout(cases.irrigation_boundary())
        cost = cases.affine_cost(0.5)
        with self.assertRaisesRegex(mmtsuite.ResourceLimitError, "exceed the limit"):
            mmtsuite.build_ball(cost, layout, n_max=1)
        with self.assertRaisesRegex(mmtsuite.DomainError, "does not contain"):
            mmtsuite.build_ball(mmtsuite.table({(1,): 1.0}, 1), layout)
        with self.assertRaisesRegex(mmtsuite.ValidationError, "hull must be"):
            mmtsuite.build_ball(cost, layout, hull="convex")
        with self.assertRaisesRegex(mmtsuite.ValidationError, "materials"):
            mmtsuite.build_ball(cases.mailing_steiner(), layout)
        with self.assertRaisesRegex(mmtsuite.PreconditionError, "dimension"):
            mmtsuite.verify_eqn_main(cost, mmtsuite.build_ball(cases.mailing_steiner(),
                                                               mmtsuite.label_layout(cases.gs_mailing_boundary())),
                                     layout)

    def test_declared_ball(self):
        ball = NormBall.from_vertices([[1.0, 0.0], [0.0, 1.0]])
        self.assertAlmostEqual(ball.gauge((1.0, 1.0)), 2.0)
        self.assertAlmostEqual(ball.gauge((-0.5, 0.0)), 0.5)
        self.assertEqual(ball.hull, "declared")
        self.assertEqual(len(ball.extreme_points()), 4)
        with self.assertRaisesRegex(mmtsuite.ValidationError, "full-dimensional"):
            NormBall.from_vertices([[1.0, 0.0]])

    def test_monotone_absolute(self):
        hexagon = mmtsuite.build_ball(cases.mailing_steiner(), mmtsuite.label_layout(cases.y_boundary()))
        report = mmtsuite.check_monotone_absolute(hexagon, sample_count=0, points=[(1.0, -1.0)])
        self.assertFalse(report.absolute)
        self.assertTrue(report.monotone)
        self.assertAlmostEqual(report.max_absolute_gap, 1.0)
        self.assertEqual(report.absolute_witness, (1.0, -1.0))
        self.assertTrue(mmtsuite.check_monotone_absolute(hexagon, sample_count=20, seed=0).monotone)

        euclid = mmtsuite.build_ball(cases.euclidean_cost(), mmtsuite.label_layout(cases.gs_mailing_boundary()))
        report = mmtsuite.check_monotone_absolute(euclid, sample_count=20, seed=0)
        self.assertTrue(report.absolute)
        self.assertTrue(report.monotone)


def _builtin_matrix():
    """(name, cost, boundary) for every builtin on boundaries with at most four labels."""
    single = [("steiner", mmtsuite.steiner()),
              ("gilbert_steiner_1/2", mmtsuite.gilbert_steiner(0.5)),
              ("gilbert_steiner_1/3", mmtsuite.gilbert_steiner(1.0 / 3.0)),
              ("linear_combination", cases.affine_cost(0.5)),
              ("urban", mmtsuite.urban(2.0, 1.0)),
              ("max_of", mmtsuite.max_of([mmtsuite.gilbert_steiner(0.5), mmtsuite.urban(2.0, 1.0)]))]
    double = [("plc", mmtsuite.plc(1.0, 1.0, 0.5, 0.5)),
              ("plc_steiner", mmtsuite.plc(1.0, 2.0, 1.0, 0.0)),
              ("composite", cases.euclidean_cost()),
              ("max_of_2", mmtsuite.max_of([mmtsuite.plc(1.0, 1.0, 0.5, 0.5), cases.euclidean_cost()]))]
    for k in range(1, 5):
        for name, cost in single:
            yield name, cost, cases.star_boundary(k)
    for n1, n2 in ((1, 1), (2, 1), (2, 2)):
        for name, cost in double:
            yield name, cost, cases.y_boundary_with(n1, n2)
    yield "mailing_0", mmtsuite.mailing(0.0), cases.y_boundary()
    yield "mailing_0", mmtsuite.mailing(0.0), cases.y_boundary_with(2, 2)
    yield "mailing_1/2", mmtsuite.mailing(0.5), cases.y_boundary_with(2, 1)


def _pair_value(a, b, alpha):
    return (len(a) ** alpha if a else 0.0) + (len(b) ** alpha if b else 0.0)


class KnownBallTests(unittest.TestCase):
    def test_eqn_main_for_every_builtin(self):
        for name, cost, boundary in _builtin_matrix():
            layout = mmtsuite.label_layout(boundary)
            with self.subTest(cost=name, counts=layout.counts):
                ball = mmtsuite.build_ball(cost, layout)
                report = mmtsuite.verify_eqn_main(cost, ball, layout)
                self.assertTrue(report.passed, report.witness)
                self.assertEqual(report.mode, "exhaustive")

    def test_mailing_with_repeated_labels(self):
        for alpha, counts in ((0.5, (2, 1)), (0.0, (2, 2))):
            layout = mmtsuite.label_layout(cases.y_boundary_with(*counts))
            cost = mmtsuite.mailing(alpha)
            ball = mmtsuite.build_ball(cost, layout)
            self.assertFalse(ball.supersymmetric)
            self.assertEqual(len(ball.pieces), 4)
            self.assertTrue(mmtsuite.verify_eqn_main(cost, ball, layout).passed)
            for a, b in good_pairs(layout):
                with self.subTest(alpha=alpha, counts=counts, a=sorted(a), b=sorted(b)):
                    d = [(j in a) - (j in b) for j in range(layout.total)]
                    self.assertAlmostEqual(ball.gauge(d), _pair_value(a, b, alpha), places=9)

    def test_steiner_is_the_sup_norm(self):
        ball = mmtsuite.build_ball(mmtsuite.steiner(), mmtsuite.label_layout(cases.star_boundary(3)))
        for x in np.random.default_rng(3).uniform(-2.0, 2.0, size=(100, 3)):
            self.assertAlmostEqual(ball.gauge(x), np.abs(x).max(), places=9)

    def test_gilbert_steiner_matches_lp_norm_on_the_cube(self):
        rng = np.random.default_rng(5)
        cube = [d for d in itertools.product((-1, 0, 1), repeat=3) if any(d)]
        for alpha in (0.5, 1.0 / 3.0):
            ball = mmtsuite.build_ball(mmtsuite.gilbert_steiner(alpha), mmtsuite.label_layout(cases.star_boundary(3)))
            p = 1.0 / alpha
            for d in cube:
                with self.subTest(alpha=alpha, d=d):
                    self.assertAlmostEqual(ball.gauge(d), np.linalg.norm(d, p), places=9)
            # the ball lies inside the l^p unit ball
            for x in rng.uniform(-2.0, 2.0, size=(50, 3)):
                self.assertGreaterEqual(ball.gauge(x), np.linalg.norm(x, p) - 1e-9)

    def test_mailing_gauge_splits_by_sign(self):
        ball = mmtsuite.build_ball(mmtsuite.mailing(0.0), mmtsuite.label_layout(cases.y_boundary()))
        self.assertEqual([p.signs for p in ball.pieces], [(1, 1), (1, -1), (-1, 1), (-1, -1)])
        np.testing.assert_allclose(ball.orthant_gauges((0.5, -0.25)), (0.5, 0.75, 0.0, 0.25), atol=1e-9)
        for x in np.random.default_rng(11).uniform(-2.0, 2.0, size=(100, 2)):
            expected = np.maximum(x, 0.0).max() + np.maximum(-x, 0.0).max()
            self.assertAlmostEqual(ball.gauge(x), expected, places=9)
            self.assertAlmostEqual(ball.gauge(x), max(ball.orthant_gauges(x)), places=12)
            # inside its own orthant the ball is the hull of that orthant's piece
            own = next(p for p in ball.pieces if p.signs == tuple(np.where(x > 0, 1, -1)))
            self.assertAlmostEqual(own.hull_gauge(x), expected, places=9)

    def test_good_pairs_on_the_sphere_with_five_labels(self):
        layout = mmtsuite.label_layout(cases.star_boundary(5))
        for cost in (mmtsuite.steiner(), mmtsuite.gilbert_steiner(0.5)):
            for hull in ("full", "good_pairs"):
                ball = mmtsuite.build_ball(cost, layout, hull=hull)
                for a, b in good_pairs(layout):
                    with self.subTest(cost=cost.kind, hull=hull, a=sorted(a), b=sorted(b)):
                        d = np.array([(j in a) - (j in b) for j in range(layout.total)], dtype=float)
                        self.assertAlmostEqual(ball.gauge(d / pair_cost(cost, layout, a, b)), 1.0, places=9)

    def test_euclidean_irrigation_ball(self):
        layout = mmtsuite.label_layout(cases.irrigation_boundary())
        s = 1.0 / np.sqrt(2.0)
        pairs = mmtsuite.build_ball(mmtsuite.gilbert_steiner(0.5), layout, hull="good_pairs")
        np.testing.assert_allclose(pairs.extreme_points(),
                                   [[-1, 0], [-s, -s], [0, -1], [0, 1], [s, s], [1, 0]], atol=1e-9)
        full = mmtsuite.build_ball(mmtsuite.gilbert_steiner(0.5), layout)
        np.testing.assert_allclose(full.extreme_points(),
                                   [[-1, 0], [-s, -s], [-s, s], [0, -1], [0, 1], [s, -s], [s, s], [1, 0]],
                                   atol=1e-9)

    def test_affine_irrigation_ball(self):
        layout = mmtsuite.label_layout(cases.irrigation_boundary())
        ball = mmtsuite.build_ball(cases.affine_cost(0.5), layout, hull="good_pairs")
        t = 2.0 / 3.0
        np.testing.assert_allclose(ball.extreme_points(),
                                   [[-1, 0], [-t, -t], [0, -1], [0, 1], [t, t], [1, 0]], atol=1e-9)


if __name__ == "__main__":
    unittest.main()
