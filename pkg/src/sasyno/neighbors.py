"""Exact brute-force nearest-neighbour search.

All searches break distance ties by the lower reference index so that
every sampler and the classifier are deterministic.
"""

import numpy as np
from scipy.spatial.distance import cdist

_CHUNK = 512


def kneighbors(reference, queries, k, exclude_self=False):
    """Indices of the ``k`` nearest reference rows for each query row.

    Parameters
    ----------
    reference : ndarray of shape (n_ref, M)
    queries : ndarray of shape (n_query, M)
    k : int
        Number of neighbours to return per query.
    exclude_self : bool, default=False
        When True, ``queries`` must be ``reference`` itself and row ``i``
        never lists ``i`` among its neighbours (duplicates at other
        indices are still eligible).

    Returns
    -------
    ndarray of shape (n_query, k), dtype int
        Neighbour indices sorted by increasing distance, ties by index.
    """
    reference = np.asarray(reference, dtype=np.float64)
    queries = np.asarray(queries, dtype=np.float64)
    n_ref = reference.shape[0]
    limit = n_ref - 1 if exclude_self else n_ref
    if not 1 <= k <= limit:
        raise ValueError(f"k must be in [1, {limit}], got {k}")

    out = np.empty((queries.shape[0], k), dtype=np.intp)
    for start in range(0, queries.shape[0], _CHUNK):
        stop = min(start + _CHUNK, queries.shape[0])
        dist = cdist(queries[start:stop], reference)
        if exclude_self:
            rows = np.arange(stop - start)
            dist[rows, rows + start] = np.inf
        order = np.argsort(dist, axis=1, kind="stable")
        out[start:stop] = order[:, :k]
    return out
