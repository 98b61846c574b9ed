from __future__ import annotations

from itertools import combinations

import pytest

from cblab.algebra import GF, QQ, Matrix, rank
from cblab.cb import propagation
from cblab.polyring import Form, Parametrization, compose, evaluate
from cblab.scenarios import (ScenarioSpec, build_det_eleven_points, build_line_grid,
                             build_twisted_cubic, twisted_cubic_counterexample)
from cblab.vanishing import SubvarietyJet, h0

from oracles import rank_fractions


class TestLineGrid:
    def test_sizes(self):
        assert len(build_line_grid(2, 3).points) == 6
        assert len(build_line_grid(1, 1).points) == 1

    def test_no_three_collinear(self):
        pts = build_line_grid(2, 2, seed=4).points
        for trio in combinations(pts, 3):
            assert rank_fractions(trio) == 3

    def test_trivial_grid_vacuous(self):
        sc = build_line_grid(1, 1)
        assert sc.canonical_degree() == -1
        assert propagation(sc, [], sc.canonical_degree(), 0).vacuous

    def test_seed_reproducible(self):
        a, b = build_line_grid(3, 3, seed=11), build_line_grid(3, 3, seed=11)
        assert a.sections == b.sections and a.points == b.points
        assert build_line_grid(3, 3, seed=12).sections != a.sections

    def test_bad_degrees(self):
        with pytest.raises(ValueError):
            build_line_grid(0, 2)


class TestTwistedCubic:
    def test_point_count(self):
        assert len(build_twisted_cubic(5, [1, 2, 3]).points) == 3

    def test_restriction_to_secant_line(self):
        sc = build_twisted_cubic(5, [1, 2, 3])
        u, v = Form.variable(2, 0), Form.variable(2, 1)
        zero = Form.zero(2, 1)
        line = Parametrization([u, zero, zero, v], "secant")
        expected = u * v
        for k in (1, 2, 3):
            expected = expected * (u - v.scale(k))
        assert compose(sc.sections[2], line) == expected
        for q in sc.sections[:2]:
            assert not compose(q, line)

    def test_counterexample_form(self):
        sc = build_twisted_cubic(5, [1, 2, 3])
        for omit in range(3):
            h = twisted_cubic_counterexample(sc, omit)
            assert h.degree == 5
            assert not compose(h, sc.excess[0])
            assert evaluate(h, sc.points[omit]) != 0
            assert all(evaluate(h, z) == 0 for j, z in enumerate(sc.points) if j != omit)

    def test_root_validation(self):
        with pytest.raises(ValueError):
            build_twisted_cubic(5, [1, 2])
        with pytest.raises(ValueError):
            build_twisted_cubic(5, [0, 1, 2])
        with pytest.raises(ValueError):
            build_twisted_cubic(5, [1, 1, 2])
        with pytest.raises(ValueError):
            build_twisted_cubic(2)

    def test_default_roots(self):
        assert [z[0] for z in build_twisted_cubic(6).points] == [1, 2, 3, 4]

    def test_prime_field(self):
        sc = build_twisted_cubic(5, field=GF(2147483647))
        assert sc.field == GF(2147483647)
        assert h0(3, 5, [SubvarietyJet(sc.excess[0], 2)]) == \
            h0(3, 5, [SubvarietyJet(build_twisted_cubic(5).excess[0], 2)])


class TestElevenPoints:
    def test_structure(self):
        sc = build_det_eleven_points()
        assert len(sc.points) == 11 and sc.matrix.row_degrees == (1, 2, 3)
        assert rank(sc.matrix.at(sc.origin)) == 2

    def test_collinear_default_split(self):
        sc = build_det_eleven_points()
        p, q = sc.subset(sc.split.z1)
        assert rank(Matrix([sc.origin, p, q], QQ)) < 3

    def test_non_collinear_default_split(self):
        sc = build_det_eleven_points(collinear_flag=False)
        p, q = sc.subset(sc.split.z1)
        assert rank(Matrix([sc.origin, p, q], QQ)) == 3

    def test_reproducible(self):
        a, b = build_det_eleven_points(seed=5), build_det_eleven_points(seed=5)
        assert a.matrix.rows == b.matrix.rows and a.points == b.points


class TestSpec:
    def test_build_and_describe(self):
        spec = ScenarioSpec("grid", "line_grid", {"d1": 2, "d2": 2}, QQ, 3)
        assert spec.build().points == build_line_grid(2, 2, seed=3).points
        assert spec.to_dict() == {"name": "grid", "kind": "line_grid",
                                  "params": {"d1": 2, "d2": 2}, "field": {"kind": "Q"},
                                  "seed": 3}

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            ScenarioSpec("x", "conic", {}).build()
