# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.

Two loops dominate everything the package does at scale:

* the convolution/transfer step  out[x] = sum_i w_i * f[perm_i[x]]  used by
  walk powers and by every spectral matvec, and
* bulk evaluation of letter-word batches in SL_2 over a small field with
  dense multiplication/addition tables.

Both have a numpy twin in ``_pk`` with identical semantics.
"""

import numpy as np


def conv_step(double[::1] f, int[:, ::1] perms, double[::1] w):
    """out[x] = sum_i w[i] * f[perms[i, x]]."""
    cdef Py_ssize_t n = f.shape[0]
    cdef Py_ssize_t k = perms.shape[0]
    out_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, x
    cdef double wi
    for i in range(k):
        wi = w[i]
        for x in range(n):
            out[x] += wi * f[perms[i, x]]
    return out_arr


def sl2_word_entries(unsigned char[:, ::1] letters,
                     long long[:, ::1] gens,
                     long long[:, ::1] mul,
                     long long[:, ::1] add):
    """Evaluate each row of ``letters`` as a product of 2x2 matrices.

    letters[i, j] indexes a row of ``gens`` (entry codes a, b, c, d row-major);
    the sentinel 255 is skipped. Field arithmetic goes through the dense
    code tables. Returns an (n_words, 4) array of entry codes.
    """
    cdef Py_ssize_t nw = letters.shape[0]
    cdef Py_ssize_t L = letters.shape[1]
    out_arr = np.empty((nw, 4), dtype=np.int64)
    cdef long long[:, ::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef unsigned char let
    cdef long long a, b, c, d, g0, g1, g2, g3, na, nb, nc, nd
    for i in range(nw):
        a = 1
        b = 0
        c = 0
        d = 1
        for j in range(L):
            let = letters[i, j]
            if let == 255:
                continue
            g0 = gens[let, 0]
            g1 = gens[let, 1]
            g2 = gens[let, 2]
            g3 = gens[let, 3]
            na = add[mul[a, g0], mul[b, g2]]
            nb = add[mul[a, g1], mul[b, g3]]
            nc = add[mul[c, g0], mul[d, g2]]
            nd = add[mul[c, g1], mul[d, g3]]
            a = na
            b = nb
            c = nc
            d = nd
        out[i, 0] = a
        out[i, 1] = b
        out[i, 2] = c
        out[i, 3] = d
    return out_arr
