"""Pseudo-observations: column-wise normalized ranks of a sample.

The test statistics in this package never see raw data; they operate on the
matrix of normalized ranks ``u[i, j] = (# rows l with x[l, j] <= x[i, j]) / n``,
whose entries live on the lattice ``{1/n, 2/n, ..., 1}``.  Tied values share
their maximum rank and are flagged per column so callers can warn (the
statistics remain well defined, but their null distribution theory assumes
continuous data).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError

__all__ = ["PseudoObservations", "as_sample", "pseudo_observations"]


@dataclass(frozen=True)
class PseudoObservations:
    """Normalized ranks of a sample.

    Attributes
    ----------
    u : ndarray, shape (n, d)
        Entries ``k/n`` with ``k`` in ``1..n``; column j is a permutation of
        the full lattice iff column j of the sample was tie-free.
    tie_flags : ndarray of bool, shape (d,)
        True for columns that contained duplicate values.
    """

    u: np.ndarray
    tie_flags: np.ndarray

    @property
    def n(self) -> int:
        return self.u.shape[0]

    @property
    def d(self) -> int:
        return self.u.shape[1]

    def has_ties(self) -> bool:
        return bool(self.tie_flags.any())


def as_sample(data) -> np.ndarray:
    """Validate raw data as an n x d sample matrix and return it as float64.

    Raises
    ------
    DimensionError
        If the array is not 2-D with at least one row and two columns.
    ValidationError
        If any entry is NaN or infinite.
    """
    x = np.asarray(data, dtype=float)
    if x.ndim != 2:
        raise DimensionError(f"sample must be a 2-D matrix, got ndim={x.ndim}")
    n, d = x.shape
    if n < 1:
        raise DimensionError("sample needs at least one row")
    if d < 2:
        raise DimensionError(f"need at least 2 columns, got {d}")
    if not np.isfinite(x).all():
        raise ValidationError("sample contains non-finite entries")
    return x


def pseudo_observations(data) -> PseudoObservations:
    """Convert a sample to pseudo-observations (count-<= normalized ranks).

    Invariant under strictly increasing column-wise transforms of the data,
    and equivariant under row permutations.
    """
    x = as_sample(data)
    n, d = x.shape
    u = np.empty_like(x)
    tie_flags = np.empty(d, dtype=bool)
    for j in range(d):
        col = x[:, j]
        srt = np.sort(col)
        # count-<= rank: number of entries <= col[i]
        u[:, j] = np.searchsorted(srt, col, side="right") / n
        tie_flags[j] = bool((srt[1:] == srt[:-1]).any()) if n > 1 else False
    return PseudoObservations(u=u, tie_flags=tie_flags)
