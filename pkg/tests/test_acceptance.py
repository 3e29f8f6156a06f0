"""Acceptance criteria, one test each. Outcomes are summarized by
``conftest.py`` as one pass/fail line per criterion."""

import csv
import itertools
import json
import math
import time

import numpy as np
import pytest

from bcscgds.bench import (
    RunRecord,
    convergence_test,
    performance_profile,
)
from bcscgds.cli import main
from bcscgds.geometry import equiangular_basis, householder_matrix
from bcscgds.models import SampleSet, basis_size, fit_quadratic, simplex_gradient
from bcscgds.poll import BoxDomain
from bcscgds.problems import CATALOG, NoisyVariant, evaluate, make_problem, psi, random_start
from bcscgds.solver import SolverParams, Termination, bcscg_ds


def monomials(y):
    n = len(y)
    return (
        [1.0]
        + list(y)
        + [y[i] ** 2 / 2.0 for i in range(n)]
        + [y[i] * y[j] for i, j in itertools.combinations(range(n), 2)]
    )


def kkt_mfn(points, values):
    """Independent minimum-norm oracle from the full KKT system."""
    n = len(points[0])
    rows = np.array([monomials(p) for p in points])
    ML, MQ = rows[:, : n + 1], rows[:, n + 1 :]
    nl, nq, m = ML.shape[1], MQ.shape[1], len(points)
    K = np.zeros((nl + nq + m, nl + nq + m))
    K[nl : nl + nq, nl : nl + nq] = np.eye(nq)
    K[:nl, nl + nq :] = ML.T
    K[nl : nl + nq, nl + nq :] = MQ.T
    K[nl + nq :, :nl] = ML
    K[nl + nq :, nl : nl + nq] = MQ
    sol = np.linalg.solve(K, np.concatenate([np.zeros(nl + nq), values]))
    return sol[nl : nl + nq]


@pytest.mark.criterion(1, "equiangular basis and Householder reflections (<5 s)")
def test_criterion_1_geometry():
    start = time.perf_counter()
    for n in (1, 2, 3, 5, 10, 50):
        D = equiangular_basis(n).directions
        assert D.shape == (n + 1, n)
        np.testing.assert_allclose(np.linalg.norm(D, axis=1), 1.0, atol=1e-12)
        G = D @ D.T
        off = G[~np.eye(n + 1, dtype=bool)]
        np.testing.assert_allclose(off, -1.0 / n, atol=1e-10)
        np.testing.assert_allclose(D.sum(axis=0), 0.0, atol=1e-10)
    rng = np.random.default_rng(0)
    for _ in range(1000):
        n = int(rng.integers(2, 20))
        d, u = rng.standard_normal((2, n))
        d /= np.linalg.norm(d)
        u /= np.linalg.norm(u)
        H = householder_matrix(d, u)
        np.testing.assert_allclose(H, H.T, atol=1e-10)
        np.testing.assert_allclose(H @ H.T, np.eye(n), atol=1e-10)
        np.testing.assert_allclose(H @ d, u, atol=1e-10)
    assert time.perf_counter() - start < 5.0


@pytest.mark.criterion(2, "quadratic recovery and MFN against a KKT oracle (<10 s)")
def test_criterion_2_models():
    start = time.perf_counter()
    rng = np.random.default_rng(1)
    for trial in range(100):
        n = 1 + trial % 4
        A = rng.standard_normal((n, n))
        H, g, c = A + A.T, rng.standard_normal(n), rng.standard_normal()
        f = lambda x: c + g @ x + 0.5 * x @ H @ x
        pts = rng.uniform(-3, 3, size=(basis_size(n), n))
        model = fit_quadratic(SampleSet(pts[0], pts[1:], [f(p) for p in pts]))
        np.testing.assert_allclose(model.hessian, H, rtol=1e-8, atol=1e-8 * np.abs(H).max())
        for p in rng.uniform(-5, 5, size=(20, n)):
            assert model(p) == pytest.approx(f(p), rel=1e-8, abs=1e-8)
    for _ in range(50):
        # n = 2 with the center plus p = 3 points.
        pts = rng.uniform(-2, 2, size=(4, 2))
        vals = rng.standard_normal(4)
        model = fit_quadratic(SampleSet(pts[0], pts[1:], vals))
        assert np.max(np.abs(model(pts) - vals)) <= 1e-8
        np.testing.assert_allclose(model.alpha_Q, kkt_mfn(pts, vals), atol=1e-6)
    assert time.perf_counter() - start < 10.0


@pytest.mark.criterion(3, "simplex gradient error ratio under halving in [0.3, 0.7]")
def test_criterion_3_simplex_gradient_order():
    rng = np.random.default_rng(2)
    ratios = []
    for _ in range(100):
        n = int(rng.integers(2, 6))
        x = rng.uniform(-5, 5, n)
        D = rng.standard_normal((n, n))
        while abs(np.linalg.det(D)) < 1e-2:
            D = rng.standard_normal((n, n))
        errs = []
        for delta in (1.0, 0.5):
            Y = x + delta * D
            vals = np.array([x @ x] + [y @ y for y in Y])
            errs.append(np.linalg.norm(simplex_gradient(x, Y, vals) - 2 * x))
        ratios.append(errs[1] / errs[0])
    assert 0.3 <= float(np.median(ratios)) <= 0.7


@pytest.mark.criterion(4, "sphere n=20, 10 seeds: median final <= 1e-2 median initial (<10 s)")
def test_criterion_4_sphere():
    start = time.perf_counter()
    n = 20
    box = BoxDomain.uniform(n)
    initial, final = [], []
    for seed in range(10):
        x0 = random_start(box, seed)
        trace = bcscg_ds(lambda x: float(x @ x), x0, box, SolverParams(budget=40 * 21))
        values = [v for _, v in trace.best_history]
        assert all(b <= a for a, b in zip(values, values[1:]))
        initial.append(values[0])
        final.append(trace.final_value)
    assert np.median(final) <= 1e-2 * np.median(initial)
    assert time.perf_counter() - start < 10.0


@pytest.mark.criterion(5, "stationary start: 24 rotations and (n+1)*24 poll evaluations")
def test_criterion_5_stationarity():
    n = 5
    rng = np.random.default_rng(3)
    A = rng.standard_normal((n, n))
    H = A @ A.T + n * np.eye(n)
    c = rng.uniform(-10, 10, n)
    f = lambda x: float((x - c) @ H @ (x - c))
    params = SolverParams(eps=1e-6, tau_l=2.0, initial_radius=10.0, budget=10_000)
    trace = bcscg_ds(f, c, BoxDomain.uniform(n), params)
    assert math.ceil(math.log2(10 / 1e-6)) == 24
    assert trace.termination is Termination.STATIONARY
    assert trace.rotations == 24
    # One extra evaluation establishes f(x0) before the first poll.
    assert trace.evaluations_used - 1 == (n + 1) * 24


@pytest.mark.slow
@pytest.mark.criterion(6, "noisy smooth generalized Broyden tridiagonal n=200 band (<10 min)")
def test_criterion_6_gbt_reproduction():
    start = time.perf_counter()
    objective = NoisyVariant(make_problem("gen_broyden_tridiagonal", 200), "smooth", 1e-3)
    initial, final = [], []
    for seed in range(10):
        x0 = random_start(objective.box, seed)
        trace = bcscg_ds(objective, x0, objective.box, SolverParams())
        initial.append(trace.best_history[0][1])
        final.append(trace.final_value)
    mi, mf = float(np.median(initial)), float(np.median(final))
    print(f"median initial {mi:.4g}, median final {mf:.4g}, ratio {mf / mi:.3g}")
    assert 3e8 <= mi <= 3e9
    assert mf <= 0.6 * mi
    assert time.perf_counter() - start < 600.0


def _synthetic_records(rng, n_solvers, n_instances):
    records = []
    for s in range(n_solvers):
        for p in range(n_instances):
            k = int(rng.integers(1, 10))
            counts = np.cumsum(rng.integers(1, 6, k))
            values = np.sort(rng.uniform(0, 100, k))[::-1]
            hist = list(zip(counts.tolist(), values.tolist()))
            records.append(RunRecord("p", 2, "smooth", 1e-3, p, f"s{s}", hist[0][1], hist, 120))
    return records


@pytest.mark.criterion(7, "profile invariants and the convergence test examples (<1 s)")
def test_criterion_7_profiles():
    start = time.perf_counter()
    assert convergence_test(100, 0.5, 0, 1e-2) is True
    assert convergence_test(100, 99.5, 0, 1e-2) is False
    assert all(convergence_test(10.0, 2.0, 2.0, t) for t in (1e-6, 1e-2, 0.5, 1.0))
    rng = np.random.default_rng(4)
    for _ in range(40):
        table = performance_profile(
            _synthetic_records(rng, int(rng.integers(1, 4)), int(rng.integers(1, 6))), 1e-2
        )
        for s in table.solvers:
            curve = table.curves[s]
            assert np.all(np.diff(curve) >= 0)
            assert np.all((curve >= 0) & (curve <= 1))
        for p in table.instances:
            finite = [table.ratios[s, p] for s in table.solvers if math.isfinite(table.ratios[s, p])]
            if finite:
                assert min(finite) == 1.0
    assert time.perf_counter() - start < 1.0


@pytest.mark.criterion(8, "noise bound, psi(0) = -0.296, noiseless variants exact")
def test_criterion_8_noise():
    rng = np.random.default_rng(5)
    worst = 0.0
    for n, count in ((2, 40_000), (10, 40_000), (200, 20_000)):
        for x in rng.uniform(-50, 50, size=(count, n)):
            worst = max(worst, abs(psi(x)))
    assert worst <= 1.0
    assert abs(psi(np.zeros(7)) + 0.296) <= 1e-15
    for name in CATALOG:
        n = 6
        prob = make_problem(name, n)
        for x in rng.uniform(-50, 50, size=(20, n)):
            terms = prob.terms(x)
            for kind, ref in (("smooth", math.fsum(terms**2)), ("piecewise", math.fsum(abs(terms)))):
                got = evaluate(NoisyVariant(prob, kind, 0.0), x)
                assert abs(got - ref) <= 1e-15 * abs(ref)


RECORD_TYPES = {
    "problem": str, "dimension": int, "variant": str, "eps_f": float, "seed": int,
    "solver": str, "initial_value": float, "best_history": list, "budget": int,
}


def _cli_grid(out):
    for problem, dim in (("broyden_tridiagonal", 4), ("chained_rosenbrock", 4)):
        for seed in (0, 1):
            rc = main([
                "run", "--problem", problem, "--dim", str(dim), "--variant", "smooth",
                "--eps-f", "1e-3", "--seed", str(seed), "--budget-mult", "40", "--out", str(out),
            ])
            assert rc == 0


@pytest.mark.criterion(9, "CLI run, curve, profile: schema, CSV headers, reproducibility")
def test_criterion_9_cli(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    _cli_grid(first)
    files = sorted(first.glob("*.json"))
    assert len(files) == 4
    for path in files:
        data = json.loads(path.read_text())
        assert list(data) == list(RECORD_TYPES)
        for key, typ in RECORD_TYPES.items():
            assert isinstance(data[key], typ), key
        assert all(
            len(p) == 2 and isinstance(p[0], int) and isinstance(p[1], float)
            for p in data["best_history"]
        )
        assert data["initial_value"] == data["best_history"][0][1]

    curve = tmp_path / "curve.csv"
    assert main(["curve", "--in", str(first), "--problem", "broyden_tridiagonal",
                 "--dim", "4", "--variant", "smooth", "--out", str(curve)]) == 0
    profile = tmp_path / "profile.csv"
    assert main(["profile", "--in", str(first), "--tau", "1e-2", "--out", str(profile)]) == 0
    with open(curve) as fh:
        assert next(csv.reader(fh)) == ["solver", "normalized_evals", "median_best"]
    with open(profile) as fh:
        assert next(csv.reader(fh)) == ["solver", "alpha", "rho"]

    _cli_grid(second)
    for path in files:
        a = json.dumps(json.loads(path.read_text())["best_history"])
        b = json.dumps(json.loads((second / path.name).read_text())["best_history"])
        assert a == b
