"""Pure-numpy implementations of the hot kernels.

These are the fallback twins of the compiled kernels in ``_cykernels``. Both
backends must produce bit-identical results: every random draw happens in the
caller (numpy Generator), kernels only do deterministic float64 arithmetic,
and the arithmetic is written so both backends perform the same IEEE
operations in the same order.
"""

import numpy as np

BACKEND = "python"


def argmax_counts(samples, rng):
    """Count per-column argmax frequencies over the rows of ``samples``.

    Parameters
    ----------
    samples : (n, k) float64 array
        One row per joint posterior draw.
    rng : numpy.random.Generator
        Consulted only when a row has an exact tie for its maximum, in which
        case the winner is chosen uniformly at random. Ties are detected by
        exact float equality, so the stream is consumed identically by both
        backends.

    Returns
    -------
    (k,) int64 array of counts; the counts sum to n.
    """
    samples = np.ascontiguousarray(samples, dtype=np.float64)
    n, k = samples.shape
    row_max = samples.max(axis=1)
    is_max = samples == row_max[:, None]
    n_ties = is_max.sum(axis=1)
    winners = np.argmax(samples, axis=1)
    tie_rows = np.nonzero(n_ties > 1)[0]
    for i in tie_rows:
        tied = np.nonzero(is_max[i])[0]
        j = int(rng.random() * tied.shape[0])
        if j >= tied.shape[0]:  # guard rng.random() returning values -> 1.0
            j = tied.shape[0] - 1
        winners[i] = tied[j]
    return np.bincount(winners, minlength=k).astype(np.int64)


def shifted_argmax_counts(loc, scale, z, rng):
    """``argmax_counts`` of ``loc[k] + scale[k] * z[i, k]`` without the caller
    materializing the shifted matrix.

    ``z`` is an (n, k) float64 array of standard-normal draws; ``loc`` and
    ``scale`` are (k,) float64 arrays.
    """
    samples = loc[None, :] + scale[None, :] * z
    return argmax_counts(samples, rng)


def pair_accumulate(arm, y, mu, probs, sum_tau, sum_sig2):
    """Accumulate the pairwise effect and variance estimates for one unit.

    Every treatment arm k >= 1 is paired against control (arm 0). Slot k of
    ``sum_tau`` / ``sum_sig2`` accumulates pair (k, 0); slot 0 is unused.
    Units assigned to neither pair member contribute the model-contrast term
    alone (and zero variance).

    Parameters
    ----------
    arm : int
        Assigned arm for this unit.
    y : float
        Realized outcome.
    mu : (k,) float64 array
        Capped fitted values for every arm at this unit's covariates.
    probs : (k,) float64 array
        Logged assignment probabilities for this unit.
    sum_tau, sum_sig2 : (k,) float64 arrays, modified in place.
    """
    base = mu[1:] - mu[0]
    if arm == 0:
        q = (y - mu[0]) / probs[0]
        sum_tau[1:] += base - q
        sum_sig2[1:] += q * q
    else:
        sum_tau[1:] += base
        q = (y - mu[arm]) / probs[arm]
        sum_tau[arm] += q
        sum_sig2[arm] += q * q
