from collections import Counter

import numpy as np
import pytest

from bipath import ff
from bipath.ff import Op, OpTranscript
from bipath.filtration import run_degree
from bipath.matrix_method import (
    BlockProblem,
    StructuralError,
    audit_one_way,
    audit_transcript,
    build_problem,
    decompose_bipath,
    glue,
    normalize,
    one_way_reduce,
    run_matrix_method,
)
from bipath.module import interval_module, random_instances, restrict, scrambled_sum
from bipath.paths import decompose_path
from bipath.poset import LOWER, UPPER, BipathInterval, BipathShape, PathInterval, enumerate_intervals, trace

from helpers import dims_of, equal_up_to_label_perm

SH = BipathShape(3, 2)


def U(b, d):
    return PathInterval(UPPER, b, d)


def D(b, d):
    return PathInterval(LOWER, b, d)


def test_full_only_problem():
    v, _ = scrambled_sum([BipathInterval.full()], SH, 5, 1)
    up, low = decompose_path(restrict(v, UPPER)), decompose_path(restrict(v, LOWER))
    bp = build_problem(v, up, low)
    assert bp.lam.shape == bp.gam.shape == (1, 1)
    assert bp.lam[0, 0] != 0
    assert bp.lam_cols == bp.gam_cols == [U(0, 4)]
    assert bp.lam_rows == bp.gam_rows == [D(0, 3)]


def test_worked_example_q0_problem(worked_example):
    bp = run_degree(worked_example, 0).problem
    m, _, rows, cols = bp.merged()
    assert rows == [D(0, 0), D(0, 1), D(0, 3)]
    assert cols == [U(0, 0), U(0, 0), U(0, 4)]
    assert equal_up_to_label_perm(m, rows, cols, ff.identity(3))
    nf = normalize(bp)
    assert nf.central_size == 1
    assert np.array_equal(nf.p_left, ff.identity(2)) or ff.is_permutation(nf.p_left)
    assert nf.p_right.shape == (0, 0)


def test_worked_example_q1_normal_form(worked_example):
    bp = run_degree(worked_example, 1).problem
    m, _, rows, cols = bp.merged()
    assert cols == [U(1, 4), U(1, 4), U(2, 4)]
    assert rows == [D(1, 3), D(2, 3), D(3, 3)]
    nf = normalize(bp)
    assert nf.central_size == 0
    assert nf.p_left.shape == (0, 0)
    assert np.array_equal(nf.p_right, ff.identity(3))


def test_one_way_reduce_identity():
    perm, tr = one_way_reduce(ff.identity(3), 2)
    assert np.array_equal(perm, ff.identity(3))
    assert all(op.kind == "scale" for op in tr.ops)


def test_one_way_reduce_worked_matrix():
    a = ff.as_matrix([[1, 0, 0], [0, 1, 1], [0, 0, 1]], 2)
    perm, tr = one_way_reduce(a, 2)
    assert np.array_equal(perm, ff.identity(3))
    # the lone off-diagonal entry goes with one rightward column addition
    assert tr.ops == [Op("add", "col", 1, 2, 1)]
    assert audit_one_way(tr) == []
    assert tr.verify()


def test_one_way_reduce_rejects_singular():
    with pytest.raises(ff.SingularMatrixError):
        one_way_reduce(ff.as_matrix([[1, 1], [1, 1]], 2), 2)


@pytest.mark.parametrize("p", [2, 5])
def test_one_way_reduce_random(p, rng):
    for _ in range(50):
        n = int(rng.integers(1, 7))
        a = ff.random_invertible(n, p, rng)
        perm, tr = one_way_reduce(a, p)
        assert ff.is_permutation(perm)
        assert tr.verify() and audit_one_way(tr) == []


def test_audit_flags_forbidden_operations():
    rows = [D(0, 0), D(0, 3)]
    cols = [U(0, 0), U(0, 4)]
    tr = OpTranscript(2, ops=[Op("add", "col", 1, 0), Op("add", "row", 0, 1), Op("swap", "col", 0, 1)])
    bad = audit_transcript(tr, rows, cols)
    assert len(bad) == 3
    ok = OpTranscript(2, ops=[Op("add", "col", 0, 1), Op("add", "row", 1, 0)])
    assert audit_transcript(ok, rows, cols) == []


def test_structural_violation_is_detected():
    bp = BlockProblem(
        shape=SH,
        p=2,
        lam=ff.as_matrix([[1, 0], [1, 1]], 2),
        gam=ff.as_matrix([[1]], 2),
        lam_cols=[U(0, 0), U(0, 4)],
        lam_rows=[D(0, 0), D(0, 3)],
        gam_cols=[U(0, 4)],
        gam_rows=[D(0, 3)],
    )
    with pytest.raises(StructuralError):
        bp.check_structure()


def test_glue_empty():
    bp = BlockProblem(SH, 2, ff.zeros(0, 0), ff.zeros(0, 0), [], [], [], [])
    nf = normalize(bp)
    empty = decompose_path(restrict(interval_module(BipathInterval.left(0, 0), SH), UPPER))
    empty.intervals = []
    assert glue(nf, empty, empty) == Counter()


def test_every_interval_module_decomposes_to_itself():
    for iv in enumerate_intervals(SH):
        for p in (2, 5):
            assert decompose_bipath(interval_module(iv, SH, p)) == Counter([iv])


def test_scrambled_round_trip_and_invariants():
    for inst in random_instances(150, seed=11):
        v = inst.module
        run = run_matrix_method(v)
        assert run.intervals == inst.truth
        assert run.normal_form.audit() == []
        assert run.normal_form.transcript.verify()
        assert run.intervals[BipathInterval.full()] == ff.rank(v.total_composite(), v.p)
        assert dims_of(run.intervals, v.shape) == Counter({u: d for u, d in v.dims.items() if d})
        for path, dec in ((UPPER, run.upper), (LOWER, run.lower)):
            traced = Counter()
            for iv, c in run.intervals.items():
                t = trace(iv, v.shape, path)
                if t is not None:
                    traced[t] += c
            assert traced == dec.barcode()


def test_independent_of_scrambling_seed():
    ms = Counter({BipathInterval.full(): 2, BipathInterval.left(1, 0): 1, BipathInterval.right(2, 2): 2,
                  BipathInterval.up(1, 3): 1, BipathInterval.down(2, 2): 1})
    outs = {frozenset(decompose_bipath(scrambled_sum(ms, SH, p, seed)[0]).items()) for seed in range(8) for p in (2, 3)}
    assert outs == {frozenset(ms.items())}
