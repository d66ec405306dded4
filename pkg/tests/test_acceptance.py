"""Acceptance checks. Each test prints one ``[PASS]``/``[FAIL]`` line.

Reference values are computed here from first principles (full SVDs, dense
projectors, explicit triangular solves) rather than taken from the library.
"""
import hashlib
import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest
import scipy.linalg as sla

from conftest import kahan, random_orthonormal, random_tucker, rng_for
from hoid import bench
from hoid.decomp import convert_to_hoid, hoid, hosvd, matrix_cur, relative_error, st_hoid
from hoid.dten import read_tensor, write_tensor
from hoid.generators import gen_heat3, gen_heat5, gen_hilbert, gen_sparse_cp
from hoid.linalg import strong_rrqr
from hoid.select import deim_select, error_constant, interpolatory_projector, pqr_select, rrqr_select
from hoid.tensor import frobenius_norm, mode_multiply, multi_mode_multiply, unfold


@pytest.fixture
def verdict(capsys):
    def emit(number, title, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title}" + (f" ({detail})" if detail else ""))
        assert ok, f"criterion {number}: {title} {detail}"

    return emit


def _q(dims, ranks, f=1.0):
    total = math.prod(dims)
    return [1.0 + f * f * r * (total // I - r) for I, r in zip(dims, ranks)]


def _tails(X, ranks):
    out = []
    for n, r in enumerate(ranks):
        s = np.linalg.svd(unfold(X, n), compute_uv=False)
        out.append(float(np.sum(s[r:] ** 2)))
    return out


HILBERT_CASES = [(N, r) for N in (6, 10, 20) for r in range(1, 6)]


def test_exact_rank_recovery(verdict):
    t0 = time.perf_counter()
    X, _ = random_tucker((10, 10, 10), (3, 3, 3), 2024)
    ranks = (3, 3, 3)
    errs = {"hosvd": relative_error(X, hosvd(X, ranks))}
    errs["hoid-rrqr"] = hoid(X, ranks, "rrqr", f=1.0)[1].rel_error
    errs["st-hoid"] = st_hoid(X, ranks)[1].rel_error
    T = hosvd(X, ranks)
    for sel in ("rrqr", "pqr", "deim", "simple-leverage"):
        errs[f"convert-{sel}"] = convert_to_hoid(X, T, sel, seed=7)[1].rel_error
    wall = time.perf_counter() - t0
    worst = max(errs.values())
    verdict(1, "exact multilinear rank recovery", worst <= 1e-9 and wall < 5,
            f"max rel_error {worst:.2e}, {wall:.2f} s")


def test_hoid_bound(verdict):
    t0 = time.perf_counter()
    worst = 0.0
    for N, r in HILBERT_CASES:
        X = gen_hilbert(N, 3)
        ranks = (r, r, r)
        _, rep = hoid(X, ranks, "rrqr", f=1.0)
        bound2 = float(np.dot(_q(X.shape, ranks), _tails(X, ranks)))
        worst = max(worst, rep.abs_error**2 / bound2)
    wall = time.perf_counter() - t0
    verdict(2, "direct selection error bound", worst <= 1 + 1e-6 and wall < 30,
            f"max error^2/bound {worst:.3e}, {wall:.2f} s")


def test_conversion_bound(verdict):
    worst = 0.0
    for N, r in HILBERT_CASES:
        X = gen_hilbert(N, 3)
        ranks = (r, r, r)
        T = hosvd(X, ranks)
        approx = multi_mode_multiply(T.core, T.factors)
        eps2 = [np.linalg.norm(unfold(X, n) - unfold(approx, n)) ** 2 for n in range(3)]
        _, rep = convert_to_hoid(X, T, "rrqr", f=1.0)
        bound2 = float(np.dot(_q(X.shape, ranks), eps2))
        worst = max(worst, rep.abs_error**2 / bound2)
    verdict(3, "conversion error bound", worst <= 1 + 1e-6, f"max error^2/bound {worst:.3e}")


def test_sequential_bound(verdict):
    worst = 0.0
    for N, r in HILBERT_CASES:
        X = gen_hilbert(N, 3)
        ranks = (r, r, r)
        _, rep = st_hoid(X, ranks)
        # X^(t): X projected onto the leading subspaces of the shrinking tensor
        S, Y, sq = X, X, [frobenius_norm(X) ** 2]
        for n in range(3):
            U = np.linalg.svd(unfold(S, n), full_matrices=False)[0][:, :r]
            S = mode_multiply(S, n, U.T)
            Y = mode_multiply(Y, n, U @ U.T)
            sq.append(frobenius_norm(Y) ** 2)
        drops = np.maximum(np.asarray(sq[:-1]) - np.asarray(sq[1:]), 0.0)
        bound2 = float(np.dot(_q(X.shape, ranks), np.cumsum(drops)))
        worst = max(worst, rep.abs_error**2 / bound2)
    verdict(4, "sequential truncation error bound", worst <= 1 + 1e-6, f"max error^2/bound {worst:.3e}")


def test_cur_bound(verdict):
    worst = 0.0
    m, n, f = 20, 15, 1.0
    for seed in range(30):
        A = rng_for(1000 + seed).standard_normal((m, n))
        s = np.linalg.svd(A, compute_uv=False)
        for r in (2, 4, 8):
            C, U, R, _ = matrix_cur(A, r, f)
            bound2 = (2 + f * f * r * (m + n - 2 * r)) * np.sum(s[r:] ** 2)
            worst = max(worst, np.linalg.norm(A - C @ U @ R) ** 2 / bound2)
    verdict(5, "CUR error bound", worst <= 1 + 1e-6, f"max error^2/bound {worst:.3e}")


def _rrqr_violation(A, k, f):
    res = strong_rrqr(A, k, f)
    n = A.shape[1]
    R11, R12 = res.R[:k, :k], res.R[:k, k:]
    sA = np.linalg.svd(A, compute_uv=False)[:k]
    s11 = np.linalg.svd(R11, compute_uv=False)
    ratio_sv = float(np.max(sA / np.sqrt(1 + f * f * k * (n - k)) / s11))
    T = sla.solve_triangular(R11, R12)
    ratio_t = float(np.abs(T).max() / f) if T.size else 0.0
    return ratio_sv, ratio_t


def test_strong_rrqr_bounds(verdict):
    worst_sv = worst_t = 0.0
    mats = [rng_for(5000 + s).standard_normal((30, 60)) for s in range(100)]
    mats.append(kahan(96))
    for A in mats:
        for k in (2, 5, 10):
            for f in (1.0, 1.05, 2.0):
                sv, t = _rrqr_violation(A, k, f)
                worst_sv, worst_t = max(worst_sv, sv), max(worst_t, t)
    sv, _ = _rrqr_violation(kahan(96), 95, 1.05)
    worst_sv = max(worst_sv, sv)
    ok = worst_sv <= 1 + 1e-10 and worst_t <= 1 + 1e-10
    verdict(6, "strong RRQR singular value and interpolation bounds", ok,
            f"max sigma ratio {worst_sv:.6f}, max |R11^-1 R12|/f {worst_t:.12f}")


def _selector_cases():
    cases = []
    for k in range(2, 7):
        for s in range(50):
            cases.append((random_orthonormal(40, k, 100 * k + s), k))
    return cases


SELECTOR_CASES = _selector_cases()


def test_selector_constants(verdict):
    n, f = 40, 1.0
    worst = {"deim": 0.0, "pqr": 0.0, "rrqr": 0.0}
    for V, k in SELECTOR_CASES:
        limits = {
            "deim": math.sqrt(n * k / 3) * 2**k,
            "pqr": math.sqrt(n - k + 1) * math.sqrt(4**k + 6 * n - 1) / 3,
            "rrqr": math.sqrt(1 + f * f * k * (n - k)),
        }
        chosen = {"deim": deim_select(V), "pqr": pqr_select(V), "rrqr": rrqr_select(V, f)}
        for name, p in chosen.items():
            const = 1.0 / np.linalg.svd(V[p, :], compute_uv=False)[-1]
            worst[name] = max(worst[name], const / limits[name])
    ok = all(v <= 1 + 1e-8 for v in worst.values())
    verdict(7, "selector error-constant bounds", ok, ", ".join(f"{k} {v:.3f}" for k, v in worst.items()))


def test_projector_identities(verdict):
    worst_idem = worst_interp = worst_const = 0.0
    for i, (V, k) in enumerate(SELECTOR_CASES):
        rng = rng_for(9000 + i)
        for p in (deim_select(V), pqr_select(V), rrqr_select(V)):
            P = np.zeros((40, k))
            P[p, np.arange(k)] = 1.0
            Pi = P @ np.linalg.solve(V.T @ P, V.T)
            worst_idem = max(worst_idem, np.abs(Pi @ Pi - Pi).max())
            x = rng.standard_normal((40, 100))
            worst_interp = max(worst_interp, np.abs((Pi.T @ x)[p] - x[p]).max())
            dense = np.linalg.norm(np.eye(40) - Pi, 2)
            worst_const = max(worst_const, abs(error_constant(V, p) - dense) / dense)
            assert np.allclose(interpolatory_projector(V, p), Pi, atol=1e-12)
    ok = worst_idem <= 1e-10 and worst_interp <= 1e-12 and worst_const <= 1e-8
    verdict(8, "interpolatory projector identities", ok,
            f"idempotence {worst_idem:.1e}, interpolation {worst_interp:.1e}, constant {worst_const:.1e}")


def test_symmetric_unfolding_determinism(verdict):
    X = gen_hilbert(20, 3)
    same = []
    for r in range(1, 11):
        H, _ = hoid(X, (r, r, r), "rrqr")
        same.append(all(np.array_equal(H.indices[0], p) for p in H.indices[1:]))
    verdict(9, "identical index sets on symmetric unfoldings", all(same), f"{sum(same)}/10 ranks")


def test_structure_preservation(verdict):
    t0 = time.perf_counter()
    X, _ = gen_sparse_cp(50, seed=2)
    H12, rep12 = hoid(X, (12, 12, 12), "rrqr")
    _, rep5 = hoid(X, (5, 5, 5), "rrqr")
    ok_cols = all(
        np.all(C >= 0) and np.array_equal(C, unfold(X, n)[:, p]) for n, (C, p) in enumerate(zip(H12.columns, H12.indices))
    )
    ref = relative_error(X, hosvd(X, (12, 12, 12)))
    wall = time.perf_counter() - t0
    ok = ok_cols and rep12.rel_error <= rep5.rel_error and rep12.rel_error <= 10 * ref and wall < 60
    verdict(10, "nonnegative verbatim columns on sparse CP data", ok,
            f"rel_error r=5 {rep5.rel_error:.2e}, r=12 {rep12.rel_error:.2e}, hosvd r=12 {ref:.2e}, {wall:.2f} s")


def test_randomized_stability(verdict):
    X = gen_hilbert(20, 3)
    det = hoid(X, (5, 5, 5), "rrqr")[1].rel_error
    errs = [hoid(X, (5, 5, 5), "randomized", p=10, seed=s)[1].rel_error for s in range(10)]
    med = float(np.median(errs))
    verdict(11, "sketched selection stability", med <= 2 * det, f"median {med:.3e} vs deterministic {det:.3e}")


def test_method_ordering(verdict):
    X = gen_hilbert(20, 3)
    pairs = bench.expand_methods(bench.ALL_METHODS)
    ok, worst_ratio, best_ratio = True, 0.0, np.inf
    for r in range(1, 11):
        ref = relative_error(X, hosvd(X, (r, r, r)))
        for method, sel in pairs:
            if method == "hosvd":
                continue
            err = bench.run_one(X, method, sel, r, seed=0)[0]
            ratio = err / ref
            worst_ratio, best_ratio = max(worst_ratio, ratio), min(best_ratio, ratio)
            ok &= ref <= err * (1 + 1e-12) and err <= 10 * ref
    verdict(12, "HOSVD lowest, every variant within 10x", ok,
            f"error/HOSVD ratios in [{best_ratio:.3f}, {worst_ratio:.3f}]")


def test_heat_kernel(verdict):
    t0 = time.perf_counter()
    X3 = gen_heat3(6, 6, 10)
    e3 = hoid(X3, (3, 3, 3), "rrqr")[1].rel_error
    e10 = hoid(X3, (10, 10, 10), "rrqr")[1].rel_error
    X5 = gen_heat5(6, 6, 10)
    reshape_ok = X3.shape == (36, 36, 10) and np.array_equal(X5.reshape(X3.shape, order="F"), X3)
    wall = time.perf_counter() - t0
    verdict(13, "heat-kernel compressibility and reshape consistency", e10 <= e3 and reshape_ok and wall < 60,
            f"rel_error r=3 {e3:.2e}, r=10 {e10:.2e}, {wall:.2f} s")


def test_order_two_consistency(verdict):
    A = rng_for(77).standard_normal((25, 18))
    ok, worst = True, 0.0
    for sel, f in (("rrqr", 1.0), ("rrqr", 2.0), ("pqr", 1.0), ("randomized", 1.0)):
        for r in (3, 7):
            H, rep = hoid(A, (r, r), sel, f, seed=5)
            C, U, R, crep = matrix_cur(A, r, f, sel, seed=5)
            ok &= np.array_equal(H.columns[0], C) and np.array_equal(H.columns[1].T, R)
            ok &= all(np.array_equal(a, b) for a, b in zip(H.indices, crep.indices))
            diff = abs(rep.rel_error - np.linalg.norm(A - C @ U @ R) / np.linalg.norm(A))
            worst = max(worst, diff)
    verdict(14, "order-2 decomposition equals CUR", ok and worst <= 1e-12, f"max error difference {worst:.1e}")


_HASH_SCRIPT = """
import hashlib, json
from hoid.generators import gen_heat3, gen_heat5, gen_hilbert, gen_sparse_cp
out = {
    "hilbert": gen_hilbert(12, 3),
    "hilbert4": gen_hilbert(5, 4),
    "sparse-cp": gen_sparse_cp(30, seed=11)[0],
    "heat3": gen_heat3(5, 4, 6),
    "heat5": gen_heat5(5, 4, 6),
}
print(json.dumps({k: hashlib.sha256(v.tobytes(order="F")).hexdigest() for k, v in out.items()}))
"""


def test_io_roundtrips(verdict, tmp_path):
    X = rng_for(15).standard_normal((3, 4, 5))
    write_tensor(tmp_path / "x.dten", X)
    Y = read_tensor(tmp_path / "x.dten")
    dten_ok = Y.shape == X.shape and X.tobytes() == Y.tobytes()

    cfg = bench.ExperimentConfig(bench.TensorSpec("hilbert", {"N": 6}), methods=("hosvd", "hoid-rrqr"), r_max=2)
    bench.write_csv(bench.run_sweep(cfg), tmp_path / "r.csv")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    csv_ok = lines[0] == "tensor,method,selector,rank,rel_error,bound,max_error_constant,wall_time_s,seed"
    csv_ok &= len(lines) == 5 and all(len(line.split(",")) == 9 for line in lines[1:])

    runs = [
        json.loads(subprocess.run([sys.executable, "-c", _HASH_SCRIPT], capture_output=True, text=True, check=True).stdout)
        for _ in range(2)
    ]
    here = {
        "hilbert": gen_hilbert(12, 3),
        "hilbert4": gen_hilbert(5, 4),
        "sparse-cp": gen_sparse_cp(30, seed=11)[0],
        "heat3": gen_heat3(5, 4, 6),
        "heat5": gen_heat5(5, 4, 6),
    }
    local = {k: hashlib.sha256(v.tobytes(order="F")).hexdigest() for k, v in here.items()}
    regen_ok = runs[0] == runs[1] == local
    verdict(15, ".dten, CSV schema and regeneration round trips", dten_ok and csv_ok and regen_ok,
            f"dten {dten_ok}, csv {csv_ok}, regeneration {regen_ok}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
