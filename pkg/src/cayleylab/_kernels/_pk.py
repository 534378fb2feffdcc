"""Pure-Python (numpy) twins of the compiled kernels in ``_ck``."""

import numpy as np


def conv_step(f, perms, w):
    """out[x] = sum_i w[i] * f[perms[i, x]]."""
    out = np.zeros(f.shape[0], dtype=np.float64)
    for i in range(perms.shape[0]):
        out += w[i] * f[perms[i]]
    return out


def sl2_word_entries(letters, gens, mul, add):
    """Row-wise 2x2 word products through dense field-code tables."""
    nw = letters.shape[0]
    a = np.ones(nw, dtype=np.int64)
    b = np.zeros(nw, dtype=np.int64)
    c = np.zeros(nw, dtype=np.int64)
    d = np.ones(nw, dtype=np.int64)
    for j in range(letters.shape[1]):
        lj = letters[:, j]
        act = lj != 255
        if not act.any():
            continue
        g = gens[lj[act].astype(np.int64)]
        aa, bb, cc, dd = a[act], b[act], c[act], d[act]
        na = add[mul[aa, g[:, 0]], mul[bb, g[:, 2]]]
        nb = add[mul[aa, g[:, 1]], mul[bb, g[:, 3]]]
        nc = add[mul[cc, g[:, 0]], mul[dd, g[:, 2]]]
        nd = add[mul[cc, g[:, 1]], mul[dd, g[:, 3]]]
        a[act], b[act], c[act], d[act] = na, nb, nc, nd
    return np.stack([a, b, c, d], axis=1)
