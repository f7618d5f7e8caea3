import math
import unittest

import numpy as np

import mmtsuite
from mmtsuite.solver import GridSpec, geometry_objective, irrigation_dominant
from mmtsuite.topology import Topology
from tests import cases

GRID = GridSpec((0.0, 0.0), 1.0, (3, 3))


def _steiner_vertices(network, boundary):
    return [v for v in network.vertices
            if min(math.dist(v, p) for p in boundary.points) > 1e-6]


def _translated(boundary, dx, dy):
    return mmtsuite.Boundary(tuple(mmtsuite.Atom((a.point[0] + dx, a.point[1] + dy), a.weight)
                                   for a in boundary.atoms), boundary.materials)


class GeometryTests(unittest.TestCase):
    star = Topology(3, 1, ((0, 3), (1, 3), (2, 3)))
    flows = {(0, 3): (1, 1), (1, 3): (-1, 0), (2, 3): (0, -1)}

    def _ball(self):
        return mmtsuite.build_ball(cases.mailing_steiner(), mmtsuite.label_layout(cases.y_boundary()))

    def test_y_junction(self):
        result = mmtsuite.optimize_geometry(self.star, self.flows, self._ball(), [cases.P3, cases.P1, cases.P2])
        self.assertTrue(result.converged)
        self.assertEqual(result.contractions, 0)
        self.assertAlmostEqual(result.objective, 2 + cases.SQRT3, places=7)
        np.testing.assert_allclose(result.network.vertices[3], cases.Y_JUNCTION, atol=1e-5)
        self.assertEqual(result.network.vertices[:3], (cases.P3, cases.P1, cases.P2))

    def test_objective(self):
        positions = [cases.P3, cases.P1, cases.P2, cases.Y_JUNCTION]
        self.assertAlmostEqual(geometry_objective(self.star, self.flows, self._ball(), positions), 2 + cases.SQRT3)

    def test_terminal_count(self):
        with self.assertRaisesRegex(mmtsuite.ValidationError, "coordinates for"):
            mmtsuite.optimize_geometry(self.star, self.flows, self._ball(), [cases.P3, cases.P1])


class SolveTests(unittest.TestCase):
    def test_y(self):
        boundary = cases.y_boundary()
        result = mmtsuite.solve_mmtp(boundary, cases.mailing_steiner())
        self.assertAlmostEqual(result.energy, 2 + cases.SQRT3, places=6)
        self.assertAlmostEqual(result.mass, 2 + cases.SQRT3, places=6)
        self.assertLess(abs(result.equivalence_gap), 1e-6)
        self.assertEqual(result.sigma, ((0,), (0,)))
        self.assertEqual(result.stats.topologies, 4)
        self.assertEqual(result.stats.sigmas, 1)
        self.assertEqual(result.stats.mode, "exhaustive")
        self.assertIsNone(result.stats.irrigation_agrees)
        junctions = _steiner_vertices(result.network, boundary)
        self.assertEqual(len(junctions), 1)
        np.testing.assert_allclose(junctions[0], cases.Y_JUNCTION, atol=1e-5)
        self.assertTrue(mmtsuite.boundary_of(result.network).same_as(boundary, tol=1e-6))

    def test_v_through_source(self):
        boundary = cases.b_prime_boundary()
        result = mmtsuite.solve_mmtp(boundary, cases.mailing_steiner())
        self.assertAlmostEqual(result.energy, 2 * cases.SQRT5, places=6)
        self.assertEqual(len(result.network.vertices), 3)
        self.assertEqual(len(result.network.edges), 2)
        self.assertTrue(mmtsuite.boundary_of(result.network).same_as(boundary))

    def test_euclidean_mailing(self):
        boundary = cases.gs_mailing_boundary()
        result = mmtsuite.solve_mmtp(boundary, cases.euclidean_cost())
        self.assertAlmostEqual(result.energy, cases.SQRT5 + 3, places=6)
        self.assertEqual(result.stats.sigmas, 1)
        junctions = _steiner_vertices(result.network, boundary)
        self.assertEqual(len(junctions), 1)
        np.testing.assert_allclose(junctions[0], (0.0, 0.0), atol=1e-5)

    def test_affine_irrigation(self):
        boundary = cases.irrigation_boundary()
        cost = cases.affine_cost(0.5)
        full = mmtsuite.solve_mmtp(boundary, cost)
        self.assertEqual(full.stats.sigmas, 2)
        self.assertEqual(full.stats.candidates, 8)
        self.assertAlmostEqual(full.energy, 3 + math.sqrt(7) / 2, places=6)
        _, _, junction = cases.affine_geometry(0.5)
        np.testing.assert_allclose(_steiner_vertices(full.network, boundary)[0], junction, atol=1e-5)

        options = mmtsuite.SolveOptions(irrigation=True, verify_irrigation=True)
        fast = mmtsuite.solve_mmtp(boundary, cost, options)
        self.assertEqual(fast.stats.mode, "irrigation")
        self.assertEqual(fast.stats.sigmas, 1)
        self.assertTrue(fast.stats.irrigation_agrees)
        self.assertAlmostEqual(fast.energy, full.energy, places=6)

    def test_irrigation_needs_dominant_atom(self):
        self.assertTrue(irrigation_dominant(cases.irrigation_boundary()))
        self.assertTrue(irrigation_dominant(cases.y_boundary()))
        self.assertFalse(irrigation_dominant(cases.square_boundary()))
        with self.assertLogs("mmtsuite.log", level="WARNING") as logs:
            result = mmtsuite.solve_mmtp(cases.square_boundary(), cases.mailing_steiner(),
                                         mmtsuite.SolveOptions(irrigation=True))
        self.assertIn("not irrigation-dominant", logs.output[0])
        self.assertEqual(result.stats.mode, "exhaustive")
        self.assertEqual(result.stats.topologies, 32)
        self.assertAlmostEqual(result.energy, 1 + cases.SQRT3, places=6)

    def test_empty_boundary(self):
        result = mmtsuite.solve_mmtp(mmtsuite.Boundary((), 2), cases.mailing_steiner())
        self.assertEqual(result.stats.mode, "empty")
        self.assertEqual(result.energy, 0.0)
        self.assertEqual(result.network.edges, ())
        self.assertIsNone(result.labeled_network)

    def test_superlinear_cost_is_refused(self):
        cost = mmtsuite.table({(1,): 1.0, (2,): 3.0}, 1)
        with self.assertRaisesRegex(mmtsuite.PreconditionError, "sublinear"):
            mmtsuite.solve_mmtp(cases.irrigation_boundary(), cost)

def _angle(u, v):
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    return math.degrees(math.acos(float(np.clip(u @ v / (np.linalg.norm(u) * np.linalg.norm(v)), -1.0, 1.0))))


class JunctionAngleTests(unittest.TestCase):
    def test_y_branches_meet_at_120_degrees(self):
        boundary = cases.y_boundary()
        result = mmtsuite.solve_mmtp(boundary, cases.mailing_steiner())
        j = np.asarray(_steiner_vertices(result.network, boundary)[0])
        arms = [np.subtract(p, j) for p in (cases.P3, cases.P1, cases.P2)]
        for a, b in ((0, 1), (0, 2), (1, 2)):
            self.assertAlmostEqual(_angle(arms[a], arms[b]), 120.0, delta=0.5)

    def test_affine_branches_leave_the_trunk_at_arccos_three_quarters(self):
        boundary = cases.irrigation_boundary()
        result = mmtsuite.solve_mmtp(boundary, cases.affine_cost(0.5))
        j = np.asarray(_steiner_vertices(result.network, boundary)[0])
        trunk = j - np.asarray(cases.P3)
        expected = math.degrees(math.acos(0.75))
        for sink in (cases.P1, cases.P2):
            self.assertAlmostEqual(_angle(trunk, np.subtract(sink, j)), expected, delta=0.5)

    def test_euclidean_mailing_branches(self):
        boundary = cases.gs_mailing_boundary()
        result = mmtsuite.solve_mmtp(boundary, cases.euclidean_cost())
        j = np.asarray(_steiner_vertices(result.network, boundary)[0])
        trunk = j - np.asarray(cases.R3)
        self.assertAlmostEqual(_angle(trunk, np.subtract(cases.R2, j)),
                               math.degrees(math.acos(1 / cases.SQRT5)), delta=0.5)
        self.assertAlmostEqual(_angle(trunk, np.subtract(cases.R1, j)),
                               math.degrees(math.acos(2 / cases.SQRT5)), delta=0.5)


class ObjectiveShapeTests(unittest.TestCase):
    star = GeometryTests.star
    flows = GeometryTests.flows

    def test_objective_is_midpoint_convex(self):
        ball = mmtsuite.build_ball(cases.mailing_steiner(), mmtsuite.label_layout(cases.y_boundary()))
        terminals = [cases.P3, cases.P1, cases.P2]
        rng = np.random.default_rng(2)
        for p, q in rng.uniform(-1.0, 3.0, size=(30, 2, 2)):
            mid = (p + q) / 2
            f = [geometry_objective(self.star, self.flows, ball, terminals + [tuple(x)]) for x in (p, q, mid)]
            self.assertLessEqual(f[2], (f[0] + f[1]) / 2 + 1e-9)

    def test_scaling_the_boundary_scales_the_solution(self):
        boundary = cases.y_boundary()
        base = mmtsuite.solve_mmtp(boundary, cases.mailing_steiner())
        scaled = mmtsuite.solve_mmtp(boundary.scaled(2.0), cases.mailing_steiner())
        self.assertAlmostEqual(scaled.energy, 2 * base.energy, places=5)
        np.testing.assert_allclose(_steiner_vertices(scaled.network, boundary.scaled(2.0))[0],
                                   2 * np.asarray(cases.Y_JUNCTION), atol=1e-4)



class GridTests(unittest.TestCase):
    def test_split_source(self):
        boundary = mmtsuite.Boundary((mmtsuite.Atom((0.0, 0.0), (-2,)), mmtsuite.Atom((2.0, 0.0), (1,)),
                                      mmtsuite.Atom((0.0, 2.0), (1,))), 1)
        cost = mmtsuite.gilbert_steiner(0.5)
        oracle = mmtsuite.grid_oracle(boundary, cost, GRID)
        self.assertAlmostEqual(oracle.value, 4.0)
        self.assertAlmostEqual(mmtsuite.energy(oracle.network, cost), 4.0)
        self.assertIsNone(oracle.labeled_network)
        on_grid = mmtsuite.solve_on_grid(boundary, cost, GRID)
        self.assertAlmostEqual(on_grid.value, oracle.value)
        self.assertIsNotNone(on_grid.labeled_network)

    def test_shared_trunk(self):
        boundary = _translated(cases.y_boundary(), 0.0, 1.0)
        oracle = mmtsuite.grid_oracle(boundary, cases.mailing_steiner(), GRID)
        self.assertAlmostEqual(oracle.value, 4.0)
        self.assertTrue(mmtsuite.boundary_of(oracle.network).same_as(boundary))
        self.assertAlmostEqual(mmtsuite.solve_on_grid(boundary, cases.mailing_steiner(), GRID).value, 4.0)
        free = mmtsuite.solve_mmtp(boundary, cases.mailing_steiner())
        self.assertAlmostEqual(free.energy, 2 + cases.SQRT3, places=6)
        self.assertLess(free.energy, oracle.value)

    def test_diagonal(self):
        boundary = mmtsuite.Boundary((mmtsuite.Atom((0.0, 0.0), (-2,)), mmtsuite.Atom((2.0, 2.0), (2,))), 1)
        cost = mmtsuite.gilbert_steiner(0.5)
        oracle = mmtsuite.grid_oracle(boundary, cost, GRID)
        self.assertAlmostEqual(oracle.value, 4 * math.sqrt(2))
        self.assertAlmostEqual(mmtsuite.solve_on_grid(boundary, cost, GRID).value, 4 * math.sqrt(2))
        self.assertAlmostEqual(mmtsuite.solve_mmtp(boundary, cost).energy, 4.0, places=6)

    def test_triangle(self):
        oracle = mmtsuite.grid_oracle(cases.triangle_boundary(), cases.triangle_cost(), GRID)
        self.assertAlmostEqual(oracle.value, 8.0)
        self.assertAlmostEqual(mmtsuite.energy(oracle.network, cases.triangle_cost()), 8.0)

    def test_spacing_scales_value(self):
        boundary = mmtsuite.Boundary((mmtsuite.Atom((0.0, 0.0), (-1,)), mmtsuite.Atom((1.0, 0.0), (1,))), 1)
        grid = GridSpec((0.0, 0.0), 0.5, (3, 3))
        self.assertAlmostEqual(mmtsuite.grid_oracle(boundary, mmtsuite.steiner(), grid).value, 1.0)

    def test_limits(self):
        cost = mmtsuite.gilbert_steiner(0.5)
        with self.assertRaisesRegex(mmtsuite.ValidationError, "is not a grid node"):
            mmtsuite.grid_oracle(cases.irrigation_boundary(), cost, GRID)
        with self.assertRaisesRegex(mmtsuite.ResourceLimitError, "exceeds"):
            mmtsuite.grid_oracle(cases.irrigation_boundary(), cost, GridSpec((0.0, 0.0), 1.0, (6, 6)))
        many = mmtsuite.Boundary((mmtsuite.Atom((0.0, 0.0), (-5,)), mmtsuite.Atom((1.0, 0.0), (5,))), 1)
        with self.assertRaisesRegex(mmtsuite.ResourceLimitError, "labels exceed"):
            mmtsuite.grid_oracle(many, cost, GRID)
        spatial = mmtsuite.Boundary((mmtsuite.Atom((0.0, 0.0, 0.0), (-1,)), mmtsuite.Atom((1.0, 0.0, 0.0), (1,))), 1)
        with self.assertRaisesRegex(mmtsuite.ValidationError, "must be planar"):
            mmtsuite.grid_oracle(spatial, cost, GRID)


if __name__ == "__main__":
    unittest.main()
