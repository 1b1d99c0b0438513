"""Brute-force evaluation of the statistic by direct integration.

Validates the closed-form engine through an independent route: integrate
``n * (C_n(u) - prod u_j)^2 w(u)`` over the unit cube, where ``C_n`` is the
empirical distribution of the pseudo-observations.

Two modes:

* ``exact``: d=2 only.  The cube is partitioned by the distinct rank values
  per axis; on each open cell ``C_n`` is constant and the cell integral of
  ``(c - u1*u2)^2 w`` has a closed form built from univariate antiderivatives
  of ``w``, ``u*w`` and ``u^2*w``.  Zero discretization error.
* ``grid``: d in {2, 3}.  Midpoint rule on m^d cells with ``C_n`` (and the
  whole integrand) evaluated at cell centers.  Cell boundaries are aligned
  with the jump planes of ``C_n`` (the rank values), so no cell interior
  crosses a jump and the only error is the smooth midpoint bias, O(1/m^2);
  a uniform grid would instead carry O(1/m) bias from straddling cells.

The antiderivative table below is deliberately separate from the moment maps
in :mod:`cwm.weights`; the two routes share no algebra beyond the weight
definitions themselves.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError
from .ranks import PseudoObservations
from .weights import (
    DeheuvelsWeight,
    LowerTailWeight,
    MedianWeight,
    SymmetricTailWeight,
    UniformWeight,
    UpperTailWeight,
    WeightFamily,
)

__all__ = ["OracleConfig", "oracle_statistic"]


@dataclass(frozen=True)
class OracleConfig:
    mode: str = "exact"  # "exact" or "grid"
    grid_points_per_axis: int = 256

    def __post_init__(self):
        if self.mode not in ("exact", "grid"):
            raise ValidationError(f"unknown oracle mode {self.mode!r}")
        if self.grid_points_per_axis < 16:
            raise ValidationError("grid_points_per_axis must be >= 16")


def _antiderivatives(family: WeightFamily, j: int):
    """Cumulative integrals x -> (int_0^x w, int_0^x u w, int_0^x u^2 w).

    Hard-coded per family; raises for unknown subclasses.
    """
    if isinstance(family, UniformWeight):
        return (
            lambda x: x,
            lambda x: x**2 / 2.0,
            lambda x: x**3 / 3.0,
        )
    if isinstance(family, MedianWeight):
        return (
            lambda x: x**2 / 2.0 - x**3 / 3.0,
            lambda x: x**3 / 3.0 - x**4 / 4.0,
            lambda x: x**4 / 4.0 - x**5 / 5.0,
        )
    if isinstance(family, SymmetricTailWeight):
        return (
            lambda x: x**3 / 3.0 - x**2 / 2.0 + x / 4.0,
            lambda x: x**4 / 4.0 - x**3 / 3.0 + x**2 / 8.0,
            lambda x: x**5 / 5.0 - x**4 / 4.0 + x**3 / 12.0,
        )
    if isinstance(family, UpperTailWeight):
        return (
            lambda x: x**3 / 3.0,
            lambda x: x**4 / 4.0,
            lambda x: x**5 / 5.0,
        )
    if isinstance(family, LowerTailWeight):
        return (
            lambda x: x - x**2 + x**3 / 3.0,
            lambda x: x**2 / 2.0 - 2.0 * x**3 / 3.0 + x**4 / 4.0,
            lambda x: x**3 / 3.0 - x**4 / 2.0 + x**5 / 5.0,
        )
    if isinstance(family, DeheuvelsWeight):
        p = 2.0 * family.betas[j]
        return (
            lambda x: x ** (p + 1.0) / (p + 1.0),
            lambda x: x ** (p + 2.0) / (p + 2.0),
            lambda x: x ** (p + 3.0) / (p + 3.0),
        )
    raise ValidationError(f"no antiderivative table for {type(family).__name__}")


def _exact_bivariate(u: np.ndarray, family: WeightFamily) -> float:
    n = u.shape[0]
    # Axis breakpoints: 0 plus the distinct rank values (the last is always 1).
    t1 = np.concatenate(([0.0], np.unique(u[:, 0])))
    t2 = np.concatenate(([0.0], np.unique(u[:, 1])))
    # H[k, l] = #points with u0 <= t1[k] and u1 <= t2[l]; the cell
    # (t1[k-1], t1[k]) x (t2[l-1], t2[l]) sees C_n = H[k-1, l-1] / n.
    i1 = np.searchsorted(t1, u[:, 0])
    i2 = np.searchsorted(t2, u[:, 1])
    counts = np.zeros((t1.size, t2.size))
    np.add.at(counts, (i1, i2), 1.0)
    H = counts.cumsum(axis=0).cumsum(axis=1)
    c = H[:-1, :-1] / n  # constant value of C_n on each open cell

    total = 0.0
    for j, t in ((0, t1), (1, t2)):
        I0, I1, I2 = _antiderivatives(family, j)
        dA = I0(t[1:]) - I0(t[:-1])
        dB = I1(t[1:]) - I1(t[:-1])
        dC = I2(t[1:]) - I2(t[:-1])
        if j == 0:
            A1, B1, C1 = dA, dB, dC
        else:
            A2, B2, C2 = dA, dB, dC
    # cell integral of (c - u1 u2)^2 w = c^2 A1 A2 - 2 c B1 B2 + C1 C2
    total = (
        (c**2 * np.outer(A1, A2)).sum()
        - 2.0 * (c * np.outer(B1, B2)).sum()
        + np.outer(C1, C2).sum()
    )
    return n * float(total)


def _axis_partition(values: np.ndarray, m: int) -> np.ndarray:
    """Breakpoints 0 = t_0 < ... < t_m = 1 aligned with the jump values.

    Starts from {0} plus the distinct rank values and subdivides the widest
    gaps uniformly (largest first) until there are exactly m intervals.  If
    there are more than m jump values the partition falls back to a uniform
    grid, which re-introduces straddle bias.
    """
    base = np.concatenate(([0.0], np.unique(values)))
    if base.size - 1 > m:
        return np.linspace(0.0, 1.0, m + 1)
    widths = np.diff(base)
    # Largest-remainder split: each gap gets extra cells in proportion to
    # its width, then leftovers go to the currently-widest subcells.
    extra = m - widths.size
    splits = np.floor(extra * widths / widths.sum()).astype(int)
    while splits.sum() < extra:
        k = int(np.argmax(widths / (splits + 1)))
        splits[k] += 1
    pieces = [
        np.linspace(base[i], base[i + 1], splits[i] + 2)[:-1]
        for i in range(widths.size)
    ]
    return np.concatenate(pieces + [[1.0]])


def _grid_bivariate(u: np.ndarray, family: WeightFamily, m: int) -> float:
    n = u.shape[0]
    t1 = _axis_partition(u[:, 0], m)
    t2 = _axis_partition(u[:, 1], m)
    c1, c2 = 0.5 * (t1[:-1] + t1[1:]), 0.5 * (t2[:-1] + t2[1:])
    # index of the first cell whose center is >= each pseudo-observation
    first = np.column_stack(
        [np.searchsorted(c1, u[:, 0]), np.searchsorted(c2, u[:, 1])]
    )
    counts = np.zeros((m + 1, m + 1))
    np.add.at(counts, (first[:, 0], first[:, 1]), 1.0)
    C = counts[:m, :m].cumsum(axis=0).cumsum(axis=1) / n
    wh1 = family.weight_factor(c1, 0) * np.diff(t1)
    wh2 = family.weight_factor(c2, 1) * np.diff(t2)
    diff = C - np.outer(c1, c2)
    return n * float((diff**2 * np.outer(wh1, wh2)).sum())


def _grid_trivariate(u: np.ndarray, family: WeightFamily, m: int) -> float:
    n = u.shape[0]
    t = [_axis_partition(u[:, j], m) for j in range(3)]
    c = [0.5 * (tj[:-1] + tj[1:]) for tj in t]
    wh = [family.weight_factor(c[j], j) * np.diff(t[j]) for j in range(3)]
    first = np.column_stack([np.searchsorted(c[j], u[:, j]) for j in range(3)])
    prod23 = np.outer(c[1], c[2])
    wh23 = np.outer(wh[1], wh[2])

    order = np.argsort(first[:, 0], kind="stable")
    sorted0 = first[order]
    # Sweep axis-0 slabs, maintaining the 2-D count of active points.
    active = np.zeros((m + 1, m + 1))
    total = 0.0
    p = 0
    for i in range(m):
        while p < n and sorted0[p, 0] <= i:
            active[sorted0[p, 1], sorted0[p, 2]] += 1.0
            p += 1
        C2 = active[:m, :m].cumsum(axis=0).cumsum(axis=1) / n
        diff = C2 - c[0][i] * prod23
        total += wh[0][i] * (diff**2 * wh23).sum()
    return n * float(total)


def oracle_statistic(
    pseudo: PseudoObservations, family: WeightFamily, cfg: OracleConfig = OracleConfig()
) -> float:
    """Integrate the squared deviation of the empirical copula directly.

    ``exact`` mode requires d=2; ``grid`` mode supports d in {2, 3}.
    """
    u = pseudo.u
    d = u.shape[1]
    if family.d != d:
        raise DimensionError(f"family has d={family.d}, sample has d={d}")
    if cfg.mode == "exact":
        if d != 2:
            raise DimensionError("exact mode is implemented for d=2 only")
        return _exact_bivariate(u, family)
    if d == 2:
        return _grid_bivariate(u, family, cfg.grid_points_per_axis)
    if d == 3:
        return _grid_trivariate(u, family, cfg.grid_points_per_axis)
    raise DimensionError("grid mode supports d in {2, 3}")
