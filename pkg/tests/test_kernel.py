from fractions import Fraction

import pytest

from chamberwalk.exactnum import QSqrt
from chamberwalk.kernel import (
    InconsistentCountsError,
    StepCounts,
    StepDistribution,
    assemble_kernel,
    interior_count,
    simple_rw_params,
    spectral_gap,
    step_orbits,
)
from chamberwalk.qcount import n_lambda, qt_exponent
from chamberwalk.rootsys import RankConfig, cone_window, fundamental_weight, root_system
from chamberwalk import tree


def test_simple_rw_params_r1():
    sd = simple_rw_params(RankConfig(1, 2))
    assert sd.p[0].as_fraction() == Fraction(1, 3)


def test_simple_rw_params_r2():
    sd = simple_rw_params(RankConfig(2, 2))
    assert [p.as_fraction() for p in sd.p] == [Fraction(1, 14), Fraction(1, 14)]


def test_simple_rw_params_r3_irrational_but_normalized():
    cfg = RankConfig(3, 2)
    sd = simple_rw_params(cfg)
    assert not sd.p[0].is_rational
    total = QSqrt(0)
    for i, pi in enumerate(sd.p, start=1):
        total = total + pi * n_lambda(cfg, fundamental_weight(3, i))
    assert total == QSqrt(1)
    assert sd.p[0] == sd.p[2]


def test_step_distribution_validation():
    cfg = RankConfig(2, 2)
    with pytest.raises(ValueError):
        StepDistribution(cfg, [Fraction(1, 7), Fraction(0)])
    with pytest.raises(ValueError):
        StepDistribution(cfg, [Fraction(1, 7), Fraction(1, 7)])  # sums to 2
    with pytest.raises(ValueError):
        StepDistribution(cfg, [Fraction(1, 14), Fraction(1, 28)])  # not normalized
    # an asymmetric but normalized distribution is rejected unless allowed
    p_asym = [Fraction(1, 21), Fraction(2, 21)]
    with pytest.raises(ValueError):
        StepDistribution(cfg, p_asym)
    StepDistribution(cfg, p_asym, require_symmetric=False)


def test_spectral_gap_r1():
    sd = simple_rw_params(RankConfig(1, 2))
    rho = spectral_gap(sd)
    assert float(rho) == pytest.approx(2 * 2**0.5 / 3, abs=1e-15)


def test_spectral_gap_r2():
    sd = simple_rw_params(RankConfig(2, 2))
    assert spectral_gap(sd).as_fraction() == Fraction(6, 7)


def test_spectral_gap_degenerate_q1_formula():
    # flat case: the formula collapses to sum of orbit sizes over h(0), i.e. 1
    r = 2
    rs = root_system(r)
    h0 = rs.h0()
    rho = sum(Fraction(1, h0) * rs.orbit_size(i) for i in range(1, r + 1))
    assert rho == 1


def test_interior_counts_r1():
    cfg = RankConfig(1, 2)
    assert interior_count(cfg, 1, (1,)) == 2
    assert interior_count(cfg, 1, (-1,)) == 1


def test_interior_counts_r2():
    cfg = RankConfig(2, 2)
    assert interior_count(cfg, 1, (-1, 1)) == 2  # q^((2+0)/2)
    assert interior_count(cfg, 1, (1, 0)) == 4
    assert interior_count(cfg, 1, (0, -1)) == 1


def test_interior_counts_sum_to_sphere_size():
    for r in (1, 2, 3, 4):
        for q in (2, 3, 5):
            cfg = RankConfig(r, q)
            orbits = step_orbits(r)
            for i in range(1, r + 1):
                total = sum(interior_count(cfg, i, nu) for nu, _ in orbits[i])
                assert total == n_lambda(cfg, fundamental_weight(r, i))


def test_boundary_solver_r1_matches_tree():
    for q in (2, 3, 5):
        cfg = RankConfig(1, q)
        counts = StepCounts(cfg, window=12)
        oracle = tree.word_step_counts(q, 12)
        for k in range(0, 13):
            row = counts.row((k,), 1)
            got = {mu[0]: v for mu, v in row.items()}
            assert got == oracle[k]


def test_tree_word_counts_match_bfs_ball():
    for q, depth in ((2, 10), (3, 7), (5, 4)):
        assert tree.word_step_counts(q, depth) == tree.ball_step_counts(q, depth)


def test_boundary_solver_r2_wall_row():
    cfg = RankConfig(2, 2)
    counts = StepCounts(cfg, window=8)
    # lam = k lam_1 on the wall, type 1: two targets, counts q^2 and q+1
    for k in (2, 3, 5):
        row = counts.row((k, 0), 1)
        assert row == {(k + 1, 0): 4, (k - 1, 1): 3}
        assert counts.provenance_of((k, 0), 1, (k + 1, 0)) == "solved"


def test_boundary_solver_origin_row():
    for r in (1, 2, 3):
        cfg = RankConfig(r, 2)
        counts = StepCounts(cfg, window=4)
        zero = (0,) * r
        for i in range(1, r + 1):
            row = counts.row(zero, i)
            assert row == {fundamental_weight(r, i): n_lambda(cfg, fundamental_weight(r, i))}


def test_boundary_rows_satisfy_reversibility():
    for r, q in ((2, 2), (2, 3), (3, 2)):
        cfg = RankConfig(r, q)
        window = 6
        counts = StepCounts(cfg, window)
        n_cache = {}

        def n_of(m):
            if m not in n_cache:
                n_cache[m] = n_lambda(cfg, m)
            return n_cache[m]

        for lam in cone_window(r, window - 1):
            for i in range(1, r + 1):
                i_star = r + 1 - i
                for mu, k in counts.row(lam, i).items():
                    if sum(mu) > window:
                        continue
                    back = counts.row(mu, i_star).get(lam, 0)
                    assert n_of(lam) * k == n_of(mu) * back, (lam, i, mu)


def test_constraint_closure_agrees_with_folding_low_rank():
    # the pure (row-sum, reversibility, base case) system is determined for
    # r <= 2 and must reproduce the folded rows exactly
    from chamberwalk.kernel import solve_boundary_by_constraints

    for r, q in ((1, 2), (1, 5), (2, 2), (2, 3)):
        cfg = RankConfig(r, q)
        counts = StepCounts(cfg, window=7)
        solved = solve_boundary_by_constraints(cfg, window=7)
        for key, row in solved.items():
            assert counts.boundary[key] == row, key


def test_constraint_closure_underdetermined_rank3():
    from chamberwalk.kernel import UnsolvedRowError, solve_boundary_by_constraints

    with pytest.raises(UnsolvedRowError):
        solve_boundary_by_constraints(RankConfig(3, 2), window=3)


def test_assemble_kernel_r1_rows():
    cfg = RankConfig(1, 2)
    kern = assemble_kernel(simple_rw_params(cfg), window=10)
    for k in range(1, 9):
        row = kern.row((k,))
        assert row[(k + 1,)].as_fraction() == Fraction(2, 3)
        assert row[(k - 1,)].as_fraction() == Fraction(1, 3)
    assert kern.row((0,))[(1,)].as_fraction() == 1


def test_assemble_kernel_r2_interior_subrow():
    cfg = RankConfig(2, 2)
    kern = assemble_kernel(simple_rw_params(cfg), window=8)
    lam = (2, 2)
    row = kern.row(lam)
    # type-1 contributions: 4/14, 2/14, 1/14 toward lam + orbit(lam_1)
    assert row[(3, 2)].as_fraction() == Fraction(2, 7)
    assert row[(1, 3)].as_fraction() == Fraction(1, 7)
    assert row[(2, 1)].as_fraction() == Fraction(1, 14)


def test_assemble_kernel_rows_stochastic_exact():
    for r, q in ((1, 3), (2, 2), (3, 2)):
        cfg = RankConfig(r, q)
        kern = assemble_kernel(simple_rw_params(cfg), window=5)
        for lam in kern.states:
            if sum(lam) >= kern.window:
                continue
            total = QSqrt(0)
            for v in kern.row(lam).values():
                total = total + v
            assert total == QSqrt(1)


def test_tree_vertex_dp_two_steps():
    law = tree.vertex_dp_radial_law(2, 2)
    assert law == {0: Fraction(1, 3), 2: Fraction(2, 3)}


def test_tree_spherical_closed_form():
    for q in (2, 3, 5):
        vals = tree.spherical_values(q, 10)
        for k, v in enumerate(vals):
            closed = ((q - 1) * k + q + 1) / (q + 1) * q ** Fraction(-k, 2)
            assert float(v) == pytest.approx(float(closed), rel=1e-13)


def test_kernel_csr_row_sums():
    cfg = RankConfig(2, 2)
    kern = assemble_kernel(simple_rw_params(cfg), window=6)
    mat = kern.to_csr()
    sums = mat.sum(axis=1).A1
    for lam, s in zip(kern.states, sums):
        if sum(lam) < kern.window:
            assert s == pytest.approx(1.0, abs=1e-14)
