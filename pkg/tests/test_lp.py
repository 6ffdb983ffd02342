import itertools

import numpy as np
import pytest

from qcopt.errors import LPStructureError
from qcopt.lp import EQ, GE, INFEASIBLE, LE, UNBOUNDED, LinearProgram, certify_dual, check_feasible, solve


def test_single_variable_bound():
    sol = solve(LinearProgram([1.0], [([1.0], LE, 1.0)], [(0.0, 10.0)]))
    assert sol.optimal and sol.values[0] == pytest.approx(1.0) and sol.objective_value == pytest.approx(1.0)


def test_tight_face():
    sol = solve(LinearProgram([1.0, 1.0], [([1.0, 1.0], LE, 1.0)], [(0, 1), (0, 1)]))
    assert sol.objective_value == pytest.approx(1.0)


def test_textbook_vertex():
    sol = solve(LinearProgram([3.0, 2.0], [([1, 1], LE, 4), ([1, 3], LE, 6)]))
    np.testing.assert_allclose(sol.values, [4.0, 0.0], atol=1e-9)
    assert sol.objective_value == pytest.approx(12.0)


def test_infeasible_and_unbounded():
    assert solve(LinearProgram([1.0], [([1.0], GE, 2.0)], [(0.0, 1.0)])).status == INFEASIBLE
    assert solve(LinearProgram([1.0, 0.0], [([1.0, -1.0], LE, 1.0)])).status == UNBOUNDED


def test_structure_errors():
    with pytest.raises(LPStructureError):
        LinearProgram([1.0, 2.0], [([1.0], LE, 1.0)]).arrays()
    with pytest.raises(LPStructureError):
        LinearProgram([1.0], [([1.0], "<", 1.0)]).arrays()
    with pytest.raises(LPStructureError):
        LinearProgram([1.0], bounds=[(2.0, 1.0)]).arrays()
    with pytest.raises(LPStructureError):
        LinearProgram([np.nan]).arrays()


def vertex_oracle(lp):
    """Best objective over all basic points of a tiny LP, or None if infeasible."""
    c, A, rels, b, lo, hi = lp.arrays()
    n = c.size
    planes = [(A[r], b[r]) for r in range(A.shape[0])]
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1.0
        planes.append((e, lo[k]))
        if np.isfinite(hi[k]):
            planes.append((e, hi[k]))
    best = None
    for combo in itertools.combinations(planes, n):
        M = np.array([p[0] for p in combo])
        if abs(np.linalg.det(M)) < 1e-10:
            continue
        x = np.linalg.solve(M, np.array([p[1] for p in combo]))
        if check_feasible(lp, x, tol=1e-7):
            v = float(c @ x)
            best = v if best is None else max(best, v)
    return best


def random_lp(rng, n):
    m = int(rng.integers(1, 4))
    cons = []
    for _ in range(m):
        rel = [LE, LE, GE, EQ][int(rng.integers(0, 4))]
        cons.append((rng.integers(-3, 4, size=n).astype(float), rel, float(rng.integers(-2, 6))))
    bounds = [(float(rng.integers(-2, 1)), float(rng.integers(1, 4))) for _ in range(n)]
    return LinearProgram(rng.integers(-5, 6, size=n).astype(float), cons, bounds)


def test_matches_vertex_enumeration_small():
    rng = np.random.default_rng(11)
    checked = 0
    for _ in range(400):
        lp = random_lp(rng, int(rng.integers(1, 4)))
        sol = solve(lp)
        ref = vertex_oracle(lp)
        if ref is None:
            assert sol.status == INFEASIBLE
            continue
        assert sol.optimal
        assert sol.objective_value == pytest.approx(ref, abs=1e-7)
        assert check_feasible(lp, sol.values)
        checked += 1
    assert checked > 150


def test_dual_certificate_and_bounds():
    rng = np.random.default_rng(5)
    for _ in range(200):
        n = int(rng.integers(1, 7))
        lp = random_lp(rng, n)
        sol = solve(lp)
        if not sol.optimal:
            continue
        assert certify_dual(lp, sol)
        assert abs(sol.dual_objective - sol.objective_value) < 1e-6
        _, _, _, _, lo, hi = lp.arrays()
        assert np.all(sol.values >= lo - 1e-9) and np.all(sol.values <= hi + 1e-9)


def test_objective_scaling_keeps_vertex():
    rng = np.random.default_rng(3)
    for _ in range(50):
        lp = random_lp(rng, 4)
        sol = solve(lp)
        if not sol.optimal:
            continue
        scaled = LinearProgram([7.0 * v for v in lp.objective], lp.constraints, lp.bounds)
        sol2 = solve(scaled)
        np.testing.assert_array_equal(sol.values, sol2.values)
        assert sol2.objective_value == pytest.approx(7.0 * sol.objective_value)


def test_deterministic():
    rng = np.random.default_rng(9)
    lp = random_lp(rng, 5)
    a, b = solve(lp), solve(lp)
    assert a.status == b.status
    if a.optimal:
        np.testing.assert_array_equal(a.values, b.values)


def test_degenerate_cycling_example():
    # Beale's example cycles under the textbook largest-coefficient rule.
    c = [0.75, -150.0, 0.02, -6.0]
    cons = [
        ([0.25, -60.0, -0.04, 9.0], LE, 0.0),
        ([0.5, -90.0, -0.02, 3.0], LE, 0.0),
        ([0.0, 0.0, 1.0, 0.0], LE, 1.0),
    ]
    sol = solve(LinearProgram(c, cons))
    assert sol.optimal and sol.objective_value == pytest.approx(0.05)


def test_agrees_with_scipy_on_medium_lps():
    optimize = pytest.importorskip("scipy.optimize")
    rng = np.random.default_rng(21)
    for _ in range(60):
        n, m = int(rng.integers(3, 12)), int(rng.integers(1, 8))
        A = rng.normal(size=(m, n))
        b = np.abs(rng.normal(size=m)) + 0.1
        c = rng.normal(size=n)
        lp = LinearProgram(c, [(A[r], LE, b[r]) for r in range(m)], [(0.0, 2.0)] * n)
        sol = solve(lp)
        ref = optimize.linprog(-c, A_ub=A, b_ub=b, bounds=[(0, 2)] * n, method="highs")
        assert sol.optimal and ref.status == 0
        assert sol.objective_value == pytest.approx(-ref.fun, abs=1e-7)
