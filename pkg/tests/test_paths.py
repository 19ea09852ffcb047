from collections import Counter

import numpy as np

from bipath import ff
from bipath.module import PathModule, random_instances, restrict
from bipath.paths import barcode_by_ranks, check_bases, decompose_path
from bipath.poset import LOWER, UPPER, BipathShape, PathInterval, canonical_key, trace


def traced_truth(inst, path):
    out = Counter()
    for iv, c in inst.truth.items():
        t = trace(iv, inst.module.shape, path)
        if t is not None:
            out[t] += c
    return out


def test_identity_chain():
    pm = PathModule(UPPER, 3, [2, 2, 2, 2], [ff.identity(2)] * 3)
    dec = decompose_path(pm)
    assert dec.barcode() == Counter({PathInterval(UPPER, 0, 3): 2})
    assert check_bases(pm, dec)
    assert barcode_by_ranks(pm) == dec.barcode()


def test_zero_maps_give_singletons():
    pm = PathModule(LOWER, 2, [1, 1, 1, 1, 1], [ff.zeros(1, 1)] * 4)
    dec = decompose_path(pm)
    assert dec.barcode() == Counter(PathInterval(LOWER, k, k) for k in range(5))
    assert check_bases(pm, dec)


def test_empty_vertices():
    pm = PathModule(UPPER, 2, [0, 1, 0], [ff.zeros(1, 0), ff.zeros(0, 1)])
    dec = decompose_path(pm)
    assert dec.intervals == [PathInterval(UPPER, 1, 1)]
    assert check_bases(pm, dec)


def test_agrees_with_ranks_and_truth_on_scrambled_modules():
    checked = 0
    for inst in random_instances(250, seed=77):
        for path in (UPPER, LOWER):
            pm = restrict(inst.module, path)
            dec = decompose_path(pm)
            assert check_bases(pm, dec)
            assert dec.barcode() == barcode_by_ranks(pm) == traced_truth(inst, path)
            for k in range(len(pm)):
                assert len(dec.alive[k]) == pm.dims[k]
            checked += 1
    assert checked == 500


def test_canonical_order_groups_equal_labels():
    for inst in random_instances(40, seed=5):
        pm = restrict(inst.module, UPPER)
        dec = decompose_path(pm)
        shape = BipathShape(len(pm) - 2, len(pm) - 2)
        keys = [canonical_key(iv, shape) for iv in dec.intervals]
        assert keys == sorted(keys)


def test_staircase_is_zero_one():
    pm = PathModule(UPPER, 2, [2, 1, 2], [ff.as_matrix([[1, 1]], 2), ff.as_matrix([[1], [0]], 2)])
    dec = decompose_path(pm)
    for k in range(2):
        s = dec.staircase(k)
        assert np.isin(s, (0, 1)).all()
    assert check_bases(pm, dec)
