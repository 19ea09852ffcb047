"""Acceptance checks, one ``criterion`` marker per item.

The terminal summary prints one PASS/FAIL line per criterion.
"""

import itertools
import json
import time
from collections import Counter

import numpy as np
import pytest

from bipath import ff
from bipath.cli import fixture_text, main
from bipath.diagram import position, quadrants, shares_full_edge
from bipath.direct import decompose_direct
from bipath.filtration import (
    bipath_pd,
    check_square,
    homology_module,
    lambda_gamma,
    parse_filtration,
    random_filtration,
    reduce_path,
    run_degree,
)
from bipath.matrix_method import audit_one_way, decompose_bipath, normalize, one_way_reduce, run_matrix_method
from bipath.module import dumps, random_instances
from bipath.poset import LOWER, UPPER, BipathInterval, BipathShape, PathInterval, enumerate_intervals

from helpers import dims_of, equal_up_to_label_perm

B = BipathInterval.full()
L, R, Up, Dn = BipathInterval.left, BipathInterval.right, BipathInterval.up, BipathInterval.down
CORPUS_SIZE = 1000


@pytest.fixture(scope="session")
def corpus(base_seed):
    return random_instances(CORPUS_SIZE, seed=base_seed, max_shape=(5, 5), max_summands=20, fields=(2, 5))


@pytest.fixture(scope="session")
def matrix_runs(corpus):
    start = time.perf_counter()
    runs = [run_matrix_method(inst.module) for inst in corpus]
    return runs, time.perf_counter() - start


@pytest.mark.criterion(1, "worked example diagrams through the CLI")
def test_criterion_1_worked_example_cli(tmp_path, capsys):
    path = tmp_path / "sec5.bft"
    path.write_text(fixture_text())
    start = time.perf_counter()
    code = main(["pd", "--input", str(path), "--degree", "all", "--field", "2"])
    elapsed = time.perf_counter() - start
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    got = {}
    for d in data["diagrams"]:
        got[d["degree"]] = Counter({(p["region"], p["s"], p["t"]): p["multiplicity"] for p in d["points"]})
    assert got[0] == Counter({("B", "", ""): 1, ("L", "0", "0"): 1, ("L", "l1", "0"): 1})
    assert got[1] == Counter({("R", "u1", "l1"): 1, ("R", "u1", "l2"): 1, ("R", "u2", "1"): 1,
                              ("U", "u3", "u3"): 1, ("D", "l1", "l1"): 1})
    assert all(not pts for q, pts in got.items() if q >= 2)
    f = parse_filtration(fixture_text())
    for q in range(2, f.max_dim() + 3):
        assert bipath_pd(f, q) == Counter()
    assert elapsed < 1.0


@pytest.mark.criterion(2, "worked example path barcodes and block matrices")
def test_criterion_2_intermediate_steps(worked_example):
    f = worked_example
    PU = lambda b, d: PathInterval(UPPER, b, d)  # noqa: E731
    PL = lambda b, d: PathInterval(LOWER, b, d)  # noqa: E731
    assert reduce_path(f, UPPER, 0).barcode() == Counter({PU(0, 0): 2, PU(0, 4): 1})
    assert reduce_path(f, LOWER, 0).barcode() == Counter([PL(0, 0), PL(0, 1), PL(0, 3)])
    assert reduce_path(f, UPPER, 1).barcode() == Counter({PU(1, 4): 2, PU(2, 4): 1, PU(3, 3): 1})
    assert reduce_path(f, LOWER, 1).barcode() == Counter([PL(1, 1), PL(1, 3), PL(2, 3), PL(3, 3)])

    # degree 0: the block matrix at 0̂ is the identity once equal labels may be permuted
    m0, _, rows0, cols0 = run_degree(f, 0).problem.merged()
    assert equal_up_to_label_perm(m0, rows0, cols0, ff.identity(3))

    # degree 1: with the triangle boundaries a-c-d and c-d-e as representatives
    up, low = reduce_path(f, UPPER, 1), reduce_path(f, LOWER, 1)
    ids = [s.id for s in f.of_dim(1)]

    def chain(names):
        return np.array([1 if i in names else 0 for i in ids], dtype=ff.DTYPE)

    overrides = {
        (UPPER, up.intervals.index(PU(2, 4))): chain({"ac", "cd", "ad"}),
        (LOWER, low.intervals.index(PL(3, 3))): chain({"cd", "de", "ce"}),
    }
    fm = lambda_gamma(up, low, f, 1, overrides)
    target = [[1, 0, 0], [0, 1, 1], [0, 0, 1]]
    assert equal_up_to_label_perm(fm.gam, fm.gam_rows, fm.gam_cols, target)
    assert check_square(fm, 2)

    # other representatives change the matrix but not its normal form
    default = run_degree(f, 1)
    drawn = normalize(type(default.problem)(
        shape=f.shape, p=2, lam=fm.lam, gam=fm.gam, lam_cols=fm.lam_cols, lam_rows=fm.lam_rows,
        gam_cols=fm.gam_cols, gam_rows=fm.gam_rows,
    ))
    ref = normalize(default.problem)
    assert np.array_equal(drawn.p_right, ref.p_right) and np.array_equal(drawn.p_left, ref.p_left)
    assert drawn.central_size == ref.central_size


@pytest.mark.criterion(3, "scrambled round trip on 1000 instances")
def test_criterion_3_round_trip(corpus, matrix_runs):
    runs, elapsed = matrix_runs
    assert len(corpus) == CORPUS_SIZE
    assert {inst.module.p for inst in corpus} == {2, 5}
    assert max(max(inst.module.shape.n, inst.module.shape.m) for inst in corpus) <= 5
    assert max(sum(inst.truth.values()) for inst in corpus) <= 20
    failures = [inst.seed for inst, run in zip(corpus, runs) if run.intervals != inst.truth]
    assert failures == []
    assert elapsed < 60.0


@pytest.mark.criterion(4, "matrix and direct methods agree")
def test_criterion_4_method_agreement(corpus, matrix_runs, tmp_path, capsys):
    runs, _ = matrix_runs
    assert [inst.seed for inst, run in zip(corpus, runs) if decompose_direct(inst.module) != run.intervals] == []
    path = tmp_path / "module.json"
    codes = Counter()
    for inst in corpus:
        path.write_text(dumps(inst.module))
        codes[main(["decompose", "--input", str(path), "--method", "both"])] += 1
        capsys.readouterr()
    assert codes == Counter({0: CORPUS_SIZE})


@pytest.mark.criterion(5, "multiplicity of B equals the rank of the total composite")
def test_criterion_5_rank_law(corpus, matrix_runs):
    runs, _ = matrix_runs
    for inst, run in zip(corpus, runs):
        v = inst.module
        assert run.intervals[B] == ff.rank(v.total_composite(), v.p)


@pytest.mark.criterion(6, "dimension vectors are conserved")
def test_criterion_6_conservation(corpus, matrix_runs):
    runs, _ = matrix_runs
    for inst, run in zip(corpus, runs):
        v = inst.module
        got = dims_of(run.intervals, v.shape)
        assert all(got[u] == v.dims[u] for u in v.shape.vertices())


@pytest.mark.criterion(7, "every recorded operation is permissible")
def test_criterion_7_audit(matrix_runs, base_seed):
    runs, _ = matrix_runs
    for run in runs:
        nf = run.normal_form
        assert nf.audit() == []
        assert nf.transcript.verify()
    rng = np.random.default_rng(base_seed + 7)
    for p in (2, 5):
        for _ in range(200):
            a = ff.random_invertible(int(rng.integers(1, 9)), p, rng)
            perm, tr = one_way_reduce(a, p)
            assert ff.is_permutation(perm)
            assert audit_one_way(tr) == []
            assert tr.verify()


@pytest.mark.criterion(8, "filtration pipeline agrees with brute-force homology")
def test_criterion_8_homology_cross_check(base_seed):
    rng = np.random.default_rng(base_seed + 8)
    for k in range(50):
        shape = BipathShape(int(rng.integers(1, 5)), int(rng.integers(1, 4)))
        f = random_filtration(shape, rng, max_simplices=40)
        assert len(f.simplices) <= 40
        for q in range(f.max_dim() + 1):
            res = run_degree(f, q, 2)
            assert check_square(res.faces, 2)
            assert res.intervals == decompose_bipath(homology_module(f, q, 2))


@pytest.mark.criterion(9, "layout is monotone and quadrants are adjacent")
@pytest.mark.parametrize("shape,count", [(BipathShape(3, 2), 34), (BipathShape(5, 5), None)])
def test_criterion_9_layout(shape, count):
    ivs = enumerate_intervals(shape)
    if count is not None:
        assert len(ivs) == count
    pos = {iv: position(iv, shape) for iv in ivs}
    assert len(set(pos.values())) == len(ivs)
    quads = quadrants(shape)
    for iv in ivs:
        if iv.kind != "B":
            assert quads[iv.kind].contains(*pos[iv])
    for a, b in itertools.permutations(ivs, 2):
        if a.kind == b.kind and a.members(shape) > b.members(shape):
            (xa, ya), (xb, yb) = pos[a], pos[b]
            assert xa <= xb and ya >= yb and (xa, ya) != (xb, yb)
    for a, b in (("L", "U"), ("L", "D"), ("U", "R"), ("R", "D")):
        assert shares_full_edge(quads[a], quads[b])
    bx, by = pos[B]
    assert all(bx < x and by > y for iv, (x, y) in pos.items() if iv != B)
