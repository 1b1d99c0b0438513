"""Weight families and their closed-form moment integrals.

A weight family defines a non-negative, bounded, product-form function
``w(u) = prod_j w_j(u_j)`` on the unit hypercube together with the three
moment maps that make the test statistic computable in closed form:

* ``mu1(a) = integral of w over [a_1,1] x ... x [a_d,1]``
* ``mu2(a) = integral of (prod_j u_j) * w over the same box``
* ``mu3   = integral of (prod_j u_j^2) * w over the whole cube``

Because every family is a product weight, each map factors into univariate
closed forms, one per coordinate; general dimension is supported uniformly.

Families
--------
uniform      w = 1                   flat emphasis
median       w = prod u(1-u)         emphasis around the center
tails        w = prod (u-1/2)^2      symmetric emphasis on all four tails
upper        w = prod u^2            emphasis on the joint upper tail
lower        w = prod (1-u)^2        emphasis on the joint lower tail
deheuvels    w = prod u^(2*b_j)      power weights, b_j > -1/2; b=0 is
                                     uniform, b=1 is upper
"""

import numpy as np

from .errors import DimensionError, ValidationError

__all__ = [
    "WeightFamily",
    "UniformWeight",
    "MedianWeight",
    "SymmetricTailWeight",
    "UpperTailWeight",
    "LowerTailWeight",
    "DeheuvelsWeight",
    "NAMED_FAMILIES",
    "named_families",
    "parse_weight",
    "anderson_darling_weight",
]


class WeightFamily:
    """Base class: composes per-coordinate factors into the product maps.

    Subclasses implement the four univariate pieces ``weight_factor``,
    ``mu1_factor``, ``mu2_factor`` and ``mu3_factor``; all are vectorized
    over numpy arrays.  The factor functions double as the precomputation
    kernel of the statistic engine, which evaluates them on n x n matrices.
    """

    name = "?"

    def __init__(self, d: int):
        d = int(d)
        if d < 2:
            raise DimensionError(f"weight family needs d >= 2, got {d}")
        self.d = d

    # -- univariate pieces, coordinate j ------------------------------
    def weight_factor(self, x, j: int):
        raise NotImplementedError

    def mu1_factor(self, x, j: int):
        """Integral of the weight factor over [x, 1]."""
        raise NotImplementedError

    def mu2_factor(self, x, j: int):
        """Integral of u * weight factor over [x, 1]."""
        raise NotImplementedError

    def mu3_factor(self, j: int) -> float:
        """Integral of u^2 * weight factor over [0, 1]."""
        raise NotImplementedError

    # -- product maps --------------------------------------------------
    def _product(self, pts, factor):
        pts = np.asarray(pts, dtype=float)
        if pts.shape[-1] != self.d:
            raise DimensionError(
                f"expected points with last axis {self.d}, got {pts.shape[-1]}"
            )
        out = factor(pts[..., 0], 0)
        for j in range(1, self.d):
            out = out * factor(pts[..., j], j)
        return out

    def weight_value(self, u):
        """Evaluate w(u).  ``u`` has shape (..., d); returns shape (...)."""
        return self._product(u, self.weight_factor)

    def mu1(self, a):
        """Tail integral of w over the box [a, 1]^d."""
        return self._product(a, self.mu1_factor)

    def mu2(self, a):
        """Tail integral of (prod u_j) * w over the box [a, 1]^d."""
        return self._product(a, self.mu2_factor)

    def mu3(self) -> float:
        out = 1.0
        for j in range(self.d):
            out *= self.mu3_factor(j)
        return out

    def spec(self) -> str:
        """The CLI/config spelling of this family."""
        return self.name

    def __repr__(self):
        return f"{type(self).__name__}(d={self.d})"

    def __eq__(self, other):
        return type(self) is type(other) and self.d == other.d

    def __hash__(self):
        return hash((type(self).__name__, self.d))


class UniformWeight(WeightFamily):
    """Flat weight w = 1."""

    name = "uniform"

    def weight_factor(self, x, j):
        return np.ones_like(np.asarray(x, dtype=float))

    def mu1_factor(self, x, j):
        return 1.0 - x

    def mu2_factor(self, x, j):
        return 0.5 * (1.0 - x * x)

    def mu3_factor(self, j):
        return 1.0 / 3.0


class MedianWeight(WeightFamily):
    """w = prod u(1-u): largest at the center of the cube, zero on the faces."""

    name = "median"

    def weight_factor(self, x, j):
        return x * (1.0 - x)

    def mu1_factor(self, x, j):
        # int_x^1 u(1-u) du = (2x+1)(1-x)^2 / 6
        return (2.0 * x + 1.0) * (1.0 - x) ** 2 / 6.0

    def mu2_factor(self, x, j):
        # int_x^1 u^2(1-u) du = 1/12 - x^3/3 + x^4/4
        return 1.0 / 12.0 - x**3 / 3.0 + x**4 / 4.0

    def mu3_factor(self, j):
        return 1.0 / 20.0


class SymmetricTailWeight(WeightFamily):
    """w = prod (u-1/2)^2: emphasizes all tails symmetrically."""

    name = "tails"

    def weight_factor(self, x, j):
        return (x - 0.5) ** 2

    def mu1_factor(self, x, j):
        return 1.0 / 24.0 - (x - 0.5) ** 3 / 3.0

    def mu2_factor(self, x, j):
        return 1.0 / 24.0 - x**4 / 4.0 + x**3 / 3.0 - x**2 / 8.0

    def mu3_factor(self, j):
        return 1.0 / 30.0


class UpperTailWeight(WeightFamily):
    """w = prod u^2: emphasizes the joint upper tail."""

    name = "upper"

    def weight_factor(self, x, j):
        return x * x

    def mu1_factor(self, x, j):
        # int_x^1 u^2 du = (1 - x^3) / 3
        return (1.0 - x**3) / 3.0

    def mu2_factor(self, x, j):
        return (1.0 - x**4) / 4.0

    def mu3_factor(self, j):
        return 1.0 / 5.0


class LowerTailWeight(WeightFamily):
    """w = prod (1-u)^2: emphasizes the joint lower tail."""

    name = "lower"

    def weight_factor(self, x, j):
        return (1.0 - x) ** 2

    def mu1_factor(self, x, j):
        return (1.0 - x) ** 3 / 3.0

    def mu2_factor(self, x, j):
        # int_x^1 u(1-u)^2 du = 1/12 - x^2/2 + 2x^3/3 - x^4/4
        return 1.0 / 12.0 - x**2 / 2.0 + 2.0 * x**3 / 3.0 - x**4 / 4.0

    def mu3_factor(self, j):
        return 1.0 / 30.0


class DeheuvelsWeight(WeightFamily):
    """Power weights w = prod u^(2*b_j) with one exponent per coordinate.

    Requires every ``2*b_j + 1 > 0`` so the tail integrals stay finite; the
    family reduces exactly to ``uniform`` at b = 0 and to ``upper`` at b = 1.
    """

    name = "deheuvels"

    def __init__(self, d: int, betas):
        super().__init__(d)
        b = np.atleast_1d(np.asarray(betas, dtype=float))
        if b.size == 1:
            b = np.full(d, b[0])
        if b.shape != (d,):
            raise DimensionError(
                f"need {d} exponents (or one to broadcast), got {b.size}"
            )
        if not np.isfinite(b).all():
            raise ValidationError("exponents must be finite")
        if np.any(2.0 * b + 1.0 <= 0.0):
            raise ValidationError(
                "each exponent must exceed -1/2 (otherwise the tail integral diverges)"
            )
        self.betas = b

    def weight_factor(self, x, j):
        return np.asarray(x, dtype=float) ** (2.0 * self.betas[j])

    def mu1_factor(self, x, j):
        p = 2.0 * self.betas[j] + 1.0
        return (1.0 - np.asarray(x, dtype=float) ** p) / p

    def mu2_factor(self, x, j):
        p = 2.0 * self.betas[j] + 2.0
        return (1.0 - np.asarray(x, dtype=float) ** p) / p

    def mu3_factor(self, j):
        return 1.0 / (2.0 * self.betas[j] + 3.0)

    def spec(self):
        return "deheuvels:" + ",".join(repr(float(b)) for b in self.betas)

    def __repr__(self):
        return f"DeheuvelsWeight(d={self.d}, betas={self.betas.tolist()})"

    def __eq__(self, other):
        return (
            type(self) is type(other)
            and self.d == other.d
            and np.array_equal(self.betas, other.betas)
        )

    def __hash__(self):
        return hash(("deheuvels", self.d, tuple(self.betas)))


NAMED_FAMILIES = {
    "uniform": UniformWeight,
    "median": MedianWeight,
    "tails": SymmetricTailWeight,
    "upper": UpperTailWeight,
    "lower": LowerTailWeight,
}


def named_families(d: int) -> list:
    """The five named families (everything except ``deheuvels``) for dimension d."""
    return [cls(d) for cls in NAMED_FAMILIES.values()]


def parse_weight(spec: str, d: int) -> WeightFamily:
    """Build a weight family from its CLI/config spelling.

    Accepted forms: ``uniform``, ``median``, ``tails``, ``upper``, ``lower``
    and ``deheuvels:b1,b2,...`` (a single exponent broadcasts to all
    coordinates).
    """
    spec = spec.strip().lower()
    if spec in NAMED_FAMILIES:
        return NAMED_FAMILIES[spec](d)
    if spec.startswith("deheuvels"):
        _, sep, rest = spec.partition(":")
        if not sep or not rest.strip():
            raise ValidationError("deheuvels needs exponents, e.g. deheuvels:0.5,1")
        try:
            betas = [float(tok) for tok in rest.split(",")]
        except ValueError as exc:
            raise ValidationError(f"bad exponent list {rest!r}") from exc
        return DeheuvelsWeight(d, betas)
    raise ValidationError(
        f"unknown weight family {spec!r}; expected one of "
        f"{sorted(NAMED_FAMILIES)} or deheuvels:b1,b2,..."
    )


def anderson_darling_weight(u):
    """Variance-normalizing weight ``1 / [u1 u2 (u1-1)(u2-1)]`` on (0,1)^2.

    Provided for diagnostics only: its tail integral diverges near the
    boundary of the square, so no test statistic exists for this weight and
    it is deliberately not a :class:`WeightFamily`.
    """
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != 2:
        raise DimensionError("defined for d=2 only")
    u1, u2 = u[..., 0], u[..., 1]
    return 1.0 / (u1 * u2 * (u1 - 1.0) * (u2 - 1.0))
