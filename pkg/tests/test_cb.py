from __future__ import annotations

import pytest

from cblab.algebra import QQ
from cblab.cb import (CIScenario, Split, ValidationError, all_splits, cb_propagates, li_degree,
                      mi_exponent, propagation, tv_check, tv_sweep, v1, v2)
from cblab.polyring import Form, evaluate
from cblab.scenarios import build_line_grid, build_twisted_cubic, points_scaled
from cblab.vanishing import SubvarietyJet


@pytest.fixture(scope="module")
def grid():
    return build_line_grid(2, 3)


@pytest.fixture(scope="module")
def cubic():
    return build_twisted_cubic(5, [1, 2, 3])


class TestFormulas:
    @pytest.mark.parametrize("args,k", [((3, 1, 3), 2), ((3, 1, 1), 0), ((2, 0, 2), 1)])
    def test_mi_exponent(self, args, k):
        assert mi_exponent(*args) == k

    def test_mi_exponent_full_power(self):
        for n in range(1, 11):
            for w in range(n):
                assert mi_exponent(n, w, n) == w + 1

    def test_mi_exponent_domain(self):
        with pytest.raises(ValueError):
            mi_exponent(3, 3, 1)
        with pytest.raises(ValueError):
            mi_exponent(3, 1, -1)

    def test_li_degree(self):
        for d3 in range(3, 8):
            assert li_degree((2, 2, d3), 3, 1, 2) == d3 - 2
        assert li_degree((2, 3), 2, 0, None) == 2
        assert li_degree((2, 2, 3), 3, 1, 2) == 1
        with pytest.raises(ValueError):
            li_degree((2, 2, 3), 3, 1, None)


class TestValidation:
    def test_wrong_point_rejected(self, grid):
        with pytest.raises(ValidationError) as err:
            CIScenario(2, grid.sections, grid.points[:5] + ((1, 1, 1),))
        assert any("does not vanish" in p for p in err.value.problems)

    def test_bezout_count(self, grid):
        with pytest.raises(ValidationError) as err:
            CIScenario(2, grid.sections, grid.points[:5])
        assert any("meet in 6" in p for p in err.value.problems)

    def test_duplicate_points(self, grid):
        pts = grid.points[:5] + (tuple(2 * c for c in grid.points[0]),)
        with pytest.raises(ValidationError) as err:
            CIScenario(2, grid.sections, pts)
        assert any("coincide" in p for p in err.value.problems)

    def test_singular_point(self):
        x = [Form.variable(3, i) for i in range(3)]
        with pytest.raises(ValidationError) as err:
            CIScenario(2, (x[0] * x[0], x[1]), ((0, 0, 1), (0, 0, 1)))
        assert any("Jacobian" in p for p in err.value.problems)

    def test_point_on_excess_locus(self, cubic):
        with pytest.raises(ValidationError) as err:
            CIScenario(3, cubic.sections, cubic.points + ((1, 1, 1, 1),), cubic.excess)
        assert any("lies on" in p for p in err.value.problems)

    def test_no_sections(self):
        with pytest.raises(ValidationError):
            CIScenario(2, (), ((1, 0, 0),))

    def test_checks_recorded(self, cubic):
        assert "Z disjoint from W" in cubic.checks


class TestPropagation:
    def test_grid_classical(self, grid):
        for omit in range(6):
            assert cb_propagates(grid, [], 2, omit)

    def test_naive_fails_with_witness(self, cubic):
        jets = [SubvarietyJet(cubic.excess[0], 1)]
        results = [propagation(cubic, jets, 5, i) for i in range(3)]
        assert not all(r.holds for r in results)
        for r in results:
            if not r.holds:
                assert r.witness is not None and evaluate(r.witness, cubic.points[r.omit])

    def test_order_two_holds(self, cubic):
        jets = [SubvarietyJet(cubic.excess[0], 2)]
        assert all(cb_propagates(cubic, jets, 5, i) for i in range(3))

    def test_li_degree_holds(self, cubic):
        jets = [SubvarietyJet(cubic.excess[0], 1)]
        r = [propagation(cubic, jets, 3, i) for i in range(3)]
        assert all(x.holds and not x.vacuous for x in r)

    def test_negative_degree_is_vacuous(self):
        sc = build_line_grid(1, 1)
        r = propagation(sc, [], -1, 0)
        assert r.holds and r.vacuous

    def test_omit_out_of_range(self, grid):
        with pytest.raises(IndexError):
            propagation(grid, [], 2, 6)

    def test_scaling_invariance(self, cubic):
        scaled = CIScenario(3, cubic.sections, points_scaled(cubic.points, (2, -3, 5)),
                            cubic.excess)
        jets = [SubvarietyJet(cubic.excess[0], 1)]
        for i in range(3):
            assert cb_propagates(cubic, jets, 5, i) == cb_propagates(scaled, jets, 5, i)
            for a in (0, 1):
                s = Split.from_z1([i], 3)
                assert tv_check(cubic, a, s) == tv_check(scaled, a, s)


class TestSplits:
    def test_counts(self):
        assert len(all_splits(6)) == 62
        assert len(all_splits(3)) == 6

    def test_empty_part_rejected(self):
        with pytest.raises(ValueError):
            Split((), (0, 1))
        with pytest.raises(ValueError):
            Split.from_z1(range(3), 3)

    def test_overlap_rejected(self):
        with pytest.raises(ValueError):
            Split((0, 1), (1, 2))

    def test_partition_check(self, grid):
        with pytest.raises(ValueError):
            v2(grid, 0, Split((0,), (1,)))


class TestTanViehweg:
    def test_v1_examples(self):
        assert v1(2, 0, [(1, 0, 0)], QQ) == 0
        assert v1(2, 0, [(1, 0, 0), (0, 1, 0)], QQ) == 1
        assert v1(2, 1, [(1, 0, 0), (0, 1, 0), (1, 1, 0)], QQ) == 1

    def test_grid_singletons(self, grid):
        for i in range(6):
            value = v2(grid, 0, Split.from_z1([i], 6))
            assert value in (0, 1)
            assert (value == 0) == cb_propagates(grid, [], 2, i)

    def test_grid_exhaustive(self, grid):
        reports = tv_sweep(grid, [0, 1, 2])
        assert len(reports) == 186 and all(r.passed for r in reports)

    def test_cubic_with_multiplier(self, cubic):
        reports = tv_sweep(cubic, [0, 1])
        assert len(reports) == 12 and all(r.passed for r in reports)
        for i in range(3):
            assert v2(cubic, 0, Split.from_z1([i], 3)) == 0

    def test_cubic_without_multiplier_breaks(self, cubic):
        reports = tv_sweep(cubic, [0], use_multiplier=False)
        assert not all(r.passed for r in reports)

    def test_report_shape(self, cubic):
        r = tv_check(cubic, 0, Split.from_z1([0, 1], 3))
        d = r.to_dict()
        assert d["z1"] == [0, 1] and d["z2"] == [2] and d["a"] == 0
        assert set(d) == {"z1", "z2", "a", "v1", "v2", "pass", "vacuous", "use_multiplier"}
