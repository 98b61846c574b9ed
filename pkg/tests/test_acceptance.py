"""End-to-end acceptance checks, one group per criterion (all exact, zero tolerance).

Run ``pytest tests/test_acceptance.py -v``; the terminal summary prints one
PASS/FAIL line per criterion.
"""

from __future__ import annotations

import pytest

import cblab.algebra as algebra
from cblab import cb, detloci, koszul, polyring, scenarios, vanishing
from cblab.algebra import GF, QQ, Matrix, rank
from cblab.cb import Split, cb_propagates, mi_exponent, propagation, tv_sweep, v2
from cblab.cli import main
from cblab.detloci import det_cb_check, det_sweep
from cblab.koszul import GradedComplex, composes_to_zero, koszul_report
from cblab.polyring import compose, evaluate
from cblab.scenarios import (build_det_eleven_points, build_line_grid, build_twisted_cubic,
                             twisted_cubic_counterexample)
from cblab.vanishing import SubvarietyJet, basis_h0

from fixture_constants import BIG_PRIME, SKODA_T0

GRIDS = [(2, 2), (2, 3), (3, 3)]
CUBIC_DEGREES = [4, 5, 6]
WINDOW = list(range(SKODA_T0, SKODA_T0 + 4))


def jets(sc, order):
    return [SubvarietyJet(p, order) for p in sc.excess]


@pytest.fixture(scope="module")
def cubic5():
    return build_twisted_cubic(5, [1, 2, 3])


@pytest.fixture(scope="module")
def eleven():
    return build_det_eleven_points(collinear_flag=True)


# 1 ------------------------------------------------------------------------


@pytest.mark.criterion(1)
@pytest.mark.parametrize("d1,d2", GRIDS)
def test_classical_cb(d1, d2):
    sc = build_line_grid(d1, d2)
    degree = d1 + d2 - 3
    for omit in range(d1 * d2):
        assert cb_propagates(sc, [], degree, omit)


# 2 ------------------------------------------------------------------------


@pytest.mark.criterion(2)
def test_naive_excess_cb_fails(cubic5):
    results = [propagation(cubic5, jets(cubic5, 1), 5, i) for i in range(3)]
    failing = [r for r in results if not r.holds]
    assert failing
    for r in failing:
        z = cubic5.points[r.omit]
        base = jets(cubic5, 1) + cubic5.point_conditions(j for j in range(3) if j != r.omit)
        assert r.witness in basis_h0(3, 5, base)
        assert r.witness.degree == 5 and evaluate(r.witness, z) != 0


@pytest.mark.criterion(2)
def test_cubic_union_planes_witness(cubic5):
    for omit in range(3):
        h = twisted_cubic_counterexample(cubic5, omit)
        assert h.degree == 5 and not compose(h, cubic5.excess[0])
        assert evaluate(h, cubic5.points[omit]) != 0
        assert all(evaluate(h, z) == 0 for j, z in enumerate(cubic5.points) if j != omit)


# 3 ------------------------------------------------------------------------


@pytest.mark.criterion(3)
@pytest.mark.parametrize("d", CUBIC_DEGREES)
def test_order_w_plus_one(d):
    sc = build_twisted_cubic(d)
    order = sc.excess_dim + 1
    for omit in range(len(sc.points)):
        assert cb_propagates(sc, jets(sc, order), d, omit)


# 4 ------------------------------------------------------------------------


@pytest.mark.criterion(4)
@pytest.mark.parametrize("d", CUBIC_DEGREES)
def test_li_degree(d):
    sc = build_twisted_cubic(d)
    degree = cb.li_degree(sc.degrees, 3, 1, sc.equation_degree)
    assert degree == d - 2
    for omit in range(len(sc.points)):
        r = propagation(sc, jets(sc, 1), degree, omit)
        assert r.holds and not r.vacuous


# 5 ------------------------------------------------------------------------


@pytest.mark.criterion(5)
def test_tan_viehweg_grid():
    reports = tv_sweep(build_line_grid(2, 3), [0, 1, 2])
    assert len(reports) == 62 * 3
    assert all(r.passed for r in reports)


@pytest.mark.criterion(5)
def test_tan_viehweg_cubic(cubic5):
    reports = tv_sweep(cubic5, [0, 1], use_multiplier=True)
    assert len(reports) == 6 * 2
    assert all(r.passed for r in reports)


# 6 ------------------------------------------------------------------------


@pytest.mark.criterion(6)
def test_mi_exponent_grid():
    for n in range(1, 11):
        for w in range(n):
            for m in range(2 * n + 1):
                assert mi_exponent(n, w, m) == max(0, w + 1 + (m - n))
            assert mi_exponent(n, w, n) == w + 1


# 7 ------------------------------------------------------------------------


def _collinear(o, p, q) -> bool:
    return rank(Matrix([o, p, q], QQ)) < 3


@pytest.mark.criterion(7)
def test_det_cb_pairs_and_singletons(eleven):
    reports = det_sweep(eleven, sizes=[1, 2])
    assert len(reports) == 11 + 55
    assert all(r.passed for r in reports)
    for r in reports:
        if len(r.split.z1) == 2:
            p, q = eleven.subset(r.split.z1)
            expected = (1, 1) if _collinear(eleven.origin, p, q) else (0, 0)
            assert (r.c1, r.c2) == expected


@pytest.mark.criterion(7)
def test_det_cb_collinear_pair(eleven):
    p, q = eleven.subset(eleven.split.z1)
    assert _collinear(eleven.origin, p, q)
    r = det_cb_check(eleven)
    assert (r.c1, r.c2) == (1, 1)


# 8 ------------------------------------------------------------------------


@pytest.mark.criterion(8)
def test_koszul_composition(cubic5):
    grid = build_line_grid(2, 3)
    for t in range(0, 9):
        assert composes_to_zero(GradedComplex.from_scenario(grid, t))
    for t in WINDOW:
        for variant in ("koszul", "skoda"):
            assert composes_to_zero(GradedComplex.from_scenario(cubic5, t, variant))


@pytest.mark.criterion(8)
def test_koszul_excess_detection(cubic5):
    for t in WINDOW:
        assert any(koszul_report(cubic5, t).homology[:-1])


@pytest.mark.criterion(8)
def test_skoda_exact_window(cubic5):
    for t in WINDOW:
        r = koszul_report(cubic5, t, "skoda")
        assert r.interior_exact
        assert r.tail_image == r.tail_target


# 9 ------------------------------------------------------------------------


def _consistency_scenarios(field=QQ):
    out = [build_line_grid(d1, d2, field=field) for d1, d2 in GRIDS]
    out += [build_twisted_cubic(d, field=field) for d in CUBIC_DEGREES]
    return out


@pytest.mark.criterion(9)
def test_v2_singletons_match_propagation():
    for sc in _consistency_scenarios():
        size = len(sc.points)
        for omit in range(size):
            singleton = v2(sc, 0, Split.from_z1([omit], size), use_multiplier=True)
            holds = cb_propagates(sc, sc.multiplier_conditions(), sc.canonical_degree(), omit)
            assert (singleton == 0) == holds


# 10 -----------------------------------------------------------------------


def _battery(field) -> list:
    """Every computation behind criteria 1-9, returning the quantities produced."""
    out: list = []
    for d1, d2 in GRIDS:
        sc = build_line_grid(d1, d2, field=field)
        out += [cb_propagates(sc, [], d1 + d2 - 3, i) for i in range(d1 * d2)]
    for d in CUBIC_DEGREES:
        sc = build_twisted_cubic(d, field=field)
        for order, degree in ((1, d), (2, d), (1, d - 2)):
            out += [propagation(sc, jets(sc, order), degree, i).to_dict()["h0_without_point"]
                    for i in range(len(sc.points))]
    grid = build_line_grid(2, 3, field=field)
    cubic = build_twisted_cubic(5, [1, 2, 3], field=field)
    out += [(r.v1, r.v2) for r in tv_sweep(grid, [0, 1, 2])]
    out += [(r.v1, r.v2) for r in tv_sweep(cubic, [0, 1])]
    det = build_det_eleven_points(field=field)
    out += [(r.c1, r.c2) for r in det_sweep(det, sizes=[1, 2])]
    for t in WINDOW:
        for variant in ("koszul", "skoda"):
            r = koszul_report(cubic, t, variant)
            out.append((r.term_dims, r.ranks, r.homology, r.tail_target))
    for sc in _consistency_scenarios(field):
        out += [v2(sc, 0, Split.from_z1([i], len(sc.points))) for i in range(len(sc.points))]
    return out


@pytest.fixture
def rank_log(monkeypatch):
    log: list = []

    def logged_rank(m, **kw):
        r = algebra.rank(m, **kw)
        log.append(("rank", m.shape, r))
        return r

    def logged_kernel(m, **kw):
        k = algebra.kernel_basis(m, **kw)
        log.append(("kernel", m.shape, len(k)))
        return k

    for mod in (cb, detloci, koszul, polyring, scenarios, vanishing):
        monkeypatch.setattr(mod, "rank", logged_rank)
        if hasattr(mod, "kernel_basis"):
            monkeypatch.setattr(mod, "kernel_basis", logged_kernel)
    return log


@pytest.mark.criterion(10)
def test_rationals_and_prime_field_agree(rank_log):
    over_q = _battery(QQ)
    q_log = list(rank_log)
    rank_log.clear()
    over_p = _battery(GF(BIG_PRIME))
    assert over_q == over_p
    assert len(q_log) > 1000
    assert q_log == rank_log


@pytest.mark.criterion(10)
@pytest.mark.parametrize("name", ["twisted-cubic", "line-grid", "det-eleven-points"])
def test_reports_byte_identical(name, capsys):
    argv = ["builtin", name, "--seed", "17", "--report", "json"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    assert capsys.readouterr().out == first


@pytest.mark.criterion(10)
def test_rebuilt_scenarios_identical():
    for make in (lambda: build_line_grid(3, 3, seed=5), lambda: build_twisted_cubic(6, seed=5),
                 lambda: build_det_eleven_points(seed=5)):
        a, b = make(), make()
        assert a.points == b.points
        assert getattr(a, "sections", None) == getattr(b, "sections", None)
