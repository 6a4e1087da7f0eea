import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mixedplate.benchmarks import get_benchmark
from mixedplate.pipeline import PlateSolution, solve_plate
from mixedplate.verification import (ConvergenceReport, ErrorNorms, LevelResult, StudyError, convergence_study,
                                     error_norms, orders)

pos = st.floats(1e-12, 1e3)


@given(st.lists(pos, min_size=2, max_size=6))
def test_order_formula(errs):
    o = orders(errs)
    assert math.isnan(o[0])
    for k in range(1, len(errs)):
        assert o[k] == pytest.approx(math.log2(errs[k - 1] / errs[k]))


def test_error_norms_of_interpolated_exact():
    # self-comparison: the interpolant of the exact fields at high degree
    b = get_benchmark("square")
    ex = b.exact_solution()
    sol = solve_plate(b.problem(5, 4))
    fake = PlateSolution(sol.disc, sol.p, sol.phi, sol.lam, sol.rt_multipliers, sol.space.interpolate(ex.w))
    e = error_norms(fake, ex)
    # far below the cubic errors at the same level (5.5e-5, 2.8e-3)
    assert e.w_l2 < 1e-6 and e.w_h1 < 1e-4
    assert all(v >= 0 for v in e.as_tuple())


def test_error_norm_zero_only_for_identical(square_geo):
    b = get_benchmark("square")
    sol = solve_plate(b.problem(1, 2))
    e = error_norms(sol, b.exact_solution())
    assert min(e.as_tuple()) > 0
    assert e.w_h1 >= e.w_l2


@pytest.mark.parametrize("bench,p,L,col,ref", [
    ("square", 1, 4, 2, 2.83),
    ("square", 1, 5, 1, 3.42e-1),
    ("disk", 1, 4, 2, 8.79e-3),
])
def test_reference_values(bench, p, L, col, ref):
    b = get_benchmark(bench)
    e = error_norms(solve_plate(b.problem(p, L)), b.exact_solution()).as_tuple()[col]
    assert e == pytest.approx(ref, rel=0.02)


def test_report_formats():
    rep = ConvergenceReport("square", 1)
    for L, s in [(2, 1.0), (3, 0.25)]:
        rep.rows.append(LevelResult(L, ErrorNorms(s, 2 * s, 4 * s), 9, 0.1))
    csv = rep.to_csv().splitlines()
    assert csv[0] == "L,e0,order0,e1,order1,eM,orderM"
    cells = csv[2].split(",")
    assert cells[0] == "3" and float(cells[1]) == 0.25 and "e" in cells[1]
    assert float(cells[2]) == pytest.approx(2.0)
    assert csv[1].split(",")[2] == ""
    table = rep.to_table()
    assert "2.000" in table and "2.50e-01" in table


def test_study_small():
    rep = convergence_study("square", 1, [2, 3])
    assert rep.levels == [2, 3]
    e = rep.column(0)
    assert rep.orders(0)[1] == pytest.approx(math.log2(e[0] / e[1]))


def test_study_rejects_unsorted():
    with pytest.raises(ValueError):
        convergence_study("square", 1, [3, 2])


def test_study_failure_identifies_level():
    with pytest.raises(StudyError) as err:
        convergence_study("square", 0, [2])
    assert err.value.level == 2 and err.value.stage == "setup"
