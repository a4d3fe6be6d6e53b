"""Numpy implementation of the MDL search kernels; used when the compiled
extension is unavailable."""

import numpy as np


def pair_clogc(labels, card, ia, ib, clogc, out, workspace=None):
    """See ``_mdl_kernel.pair_clogc``."""
    labels = np.asarray(labels)
    for p in range(len(ia)):
        a, b = ia[p], ib[p]
        key = labels[a].astype(np.int64) * int(card[b]) + labels[b]
        counts = np.bincount(key)
        out[p] = clogc[counts[counts > 0]].sum()
