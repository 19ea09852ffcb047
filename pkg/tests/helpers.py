import itertools
from collections import Counter

import numpy as np


def label_perms(labels):
    """All orderings that only permute positions carrying equal labels."""
    groups: dict = {}
    for k, lab in enumerate(labels):
        groups.setdefault(lab, []).append(k)
    per_group = [list(itertools.permutations(g)) for g in groups.values()]
    for combo in itertools.product(*per_group):
        order = list(range(len(labels)))
        for g, perm in zip(groups.values(), combo):
            for src, dst in zip(g, perm):
                order[src] = dst
        yield order


def equal_up_to_label_perm(m, rows, cols, target):
    target = np.asarray(target)
    if m.shape != target.shape:
        return False
    for r in label_perms(rows):
        for c in label_perms(cols):
            if np.array_equal(m[np.ix_(r, c)], target):
                return True
    return False


def dims_of(ms, shape):
    out = Counter()
    for iv, c in ms.items():
        for v in iv.members(shape):
            out[v] += c
    return out
