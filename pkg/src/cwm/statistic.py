"""Closed-form evaluation of the weighted rank statistic.

For pseudo-observations ``U`` (rows ``U_i`` in the unit cube) and a weight
family with moment maps ``mu1``, ``mu2``, ``mu3`` the statistic is

    W = sum_i [ (1/n) sum_l mu1(U_i v U_l) - 2 mu2(U_i) ] + n * mu3

where ``v`` is the coordinate-wise maximum.  The double sum costs O(n^2 d)
arithmetic; all per-pair quantities factor per coordinate, which is what
:class:`PermutedStatistics` exploits to re-evaluate the statistic cheaply
under many independent column permutations (the workhorse of the permutation
test, the null tabulation and the power study).
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, DimensionError
from .ranks import PseudoObservations
from .weights import WeightFamily

__all__ = ["StatisticValue", "compute_statistic", "PermutedStatistics", "NEGATIVE_TOLERANCE"]

# Values in [-NEGATIVE_TOLERANCE, 0) are rounding noise and clamp to 0;
# anything lower indicates broken moment maps and raises.
NEGATIVE_TOLERANCE = 1e-12

# Cap on temporary memory used when evaluating permutations in bulk.
_CHUNK_BYTES = 64 * 2**20


@dataclass(frozen=True)
class StatisticValue:
    """A computed statistic together with the context that produced it."""

    value: float
    n: int
    d: int
    family: WeightFamily


def _finalize(values: np.ndarray) -> np.ndarray:
    """Clamp tiny negative rounding noise to zero; reject real negatives."""
    values = np.atleast_1d(values)
    low = values.min()
    if low < -NEGATIVE_TOLERANCE:
        raise ConsistencyError(
            f"statistic evaluated to {low}, far below zero; moment maps inconsistent"
        )
    return np.maximum(values, 0.0)


class PermutedStatistics:
    """Statistic evaluator for a fixed sample under column permutations.

    Precomputes, per coordinate and per family, the ``mu1`` factor on the
    n x n matrix of pairwise maxima and the ``mu2`` factor on the column
    itself.  Reordering the rows of any single column only permutes these
    tables, so each permuted statistic costs one gather and one reduction
    instead of a fresh O(n^2) factor evaluation.

    Parameters
    ----------
    u : ndarray, shape (n, d)
        Pseudo-observations (entries in (0, 1]).
    families : sequence of WeightFamily
        All families are evaluated on every call, against the same
        permutations, which is exactly the common-random-numbers scheme the
        power study wants.
    """

    def __init__(self, u: np.ndarray, families):
        u = np.asarray(u, dtype=float)
        if u.ndim != 2:
            raise DimensionError("pseudo-observation matrix must be 2-D")
        self.n, self.d = u.shape
        self.families = list(families)
        if not self.families:
            raise ValueError("need at least one weight family")
        for fam in self.families:
            if fam.d != self.d:
                raise DimensionError(
                    f"family {fam!r} has d={fam.d}, sample has d={self.d}"
                )
        self._u = u
        # Per coordinate: matrix of pairwise maxima (shared by all families).
        maxmat = [np.maximum.outer(u[:, j], u[:, j]) for j in range(self.d)]
        # Per family and coordinate: factor tables.
        self._F = [
            [fam.mu1_factor(maxmat[j], j) for j in range(self.d)]
            for fam in self.families
        ]
        self._g = [
            [fam.mu2_factor(u[:, j], j) for j in range(self.d)]
            for fam in self.families
        ]
        self._mu3 = np.array([fam.mu3() for fam in self.families])

    def observed(self) -> np.ndarray:
        """Statistic of the sample as given, one value per family."""
        n = self.n
        out = np.empty(len(self.families))
        for f in range(len(self.families)):
            prod = self._F[f][0].copy()
            for j in range(1, self.d):
                prod *= self._F[f][j]
            gprod = self._g[f][0].copy()
            for j in range(1, self.d):
                gprod *= self._g[f][j]
            out[f] = prod.sum() / n - 2.0 * gprod.sum() + n * self._mu3[f]
        return _finalize(out)

    def evaluate(self, perms: np.ndarray) -> np.ndarray:
        """Statistics of the sample with each column's rows independently permuted.

        Parameters
        ----------
        perms : ndarray of int, shape (d, N, n)
            ``perms[j, k]`` reorders column j in replicate k (row i of the
            permuted sample takes column-j value ``u[perms[j, k, i], j]``).

        Returns
        -------
        ndarray, shape (len(families), N)

        Notes
        -----
        The statistic is invariant under joint row relabelling, so the first
        column's permutation is absorbed by relabelling rows: with
        ``tau_j = perms[j] o perms[0]^-1`` the result is exactly (not just in
        distribution) the statistic of the fully permuted sample, with the
        first column left in place.
        """
        perms = np.asarray(perms)
        if perms.ndim != 3 or perms.shape[0] != self.d or perms.shape[2] != self.n:
            raise DimensionError(
                f"perms must have shape (d={self.d}, N, n={self.n}), got {perms.shape}"
            )
        n_rep = perms.shape[1]
        inv0 = np.argsort(perms[0], axis=1)
        taus = [
            np.take_along_axis(perms[j], inv0, axis=1) for j in range(1, self.d)
        ]
        out = np.empty((len(self.families), n_rep))
        chunk = max(1, _CHUNK_BYTES // (8 * self.n * self.n))
        for start in range(0, n_rep, chunk):
            stop = min(start + chunk, n_rep)
            self._evaluate_chunk(taus, start, stop, out)
        return _finalize(out)

    def _evaluate_chunk(self, taus, start, stop, out):
        n = self.n
        rows = [t[start:stop, :, None] for t in taus]  # (C, n, 1)
        cols = [t[start:stop, None, :] for t in taus]  # (C, 1, n)
        for f in range(len(self.families)):
            prod = self._F[f][1][rows[0], cols[0]]
            for j in range(2, self.d):
                prod *= self._F[f][j][rows[j - 1], cols[j - 1]]
            prod *= self._F[f][0]  # first column: identity
            s1 = prod.sum(axis=(1, 2))
            gprod = self._g[f][1][taus[0][start:stop]]
            for j in range(2, self.d):
                gprod = gprod * self._g[f][j][taus[j - 1][start:stop]]
            s2 = (gprod * self._g[f][0]).sum(axis=1)
            out[f, start:stop] = s1 / n - 2.0 * s2 + n * self._mu3[f]


def compute_statistic(pseudo: PseudoObservations, family: WeightFamily) -> StatisticValue:
    """Evaluate the weighted statistic for one sample and one weight family."""
    engine = PermutedStatistics(pseudo.u, [family])
    value = float(engine.observed()[0])
    return StatisticValue(value=value, n=pseudo.n, d=pseudo.d, family=family)
