"""Renormalized continuum limit of the correlated states on large cyclic groups.

A cyclic group of odd order N is laid out on a symmetric grid with
spacing eps = (2 pi / N)^(1/2).  The scaled point-mass basis of the
group maps to normalized indicator functions of grid cells, and the
correlated state maps to a sum of cell-indicator pairs that is never
materialized: only pairings with test functions are computed.  Scaled
by N^(1/2), those pairings converge to the integral of the product of
the test functions as N grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import CellOutOfRangeError, InvariantError, QuadratureFailureError

GAUSS_LEGENDRE_ORDER = 8
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(GAUSS_LEGENDRE_ORDER)

TAIL_BOUND = 1e-12
DEFAULT_RADIUS = 40.0


@dataclass(frozen=True)
class GridEmbedding:
    """Symmetric grid of N cells of width (2 pi / N)^(1/2), N odd."""

    n: int

    def __post_init__(self):
        if self.n < 1 or self.n % 2 == 0:
            raise InvariantError(f"grid size must be a positive odd integer, got {self.n}")

    @property
    def epsilon(self) -> float:
        return float(np.sqrt(2.0 * np.pi / self.n))

    @property
    def max_index(self) -> int:
        return (self.n - 1) // 2

    def cell_bounds(self, r: int):
        if abs(r) > self.max_index:
            raise CellOutOfRangeError(
                f"cell index {r} outside |r| <= {self.max_index} for n = {self.n}"
            )
        eps = self.epsilon
        return ((r - 0.5) * eps, (r + 0.5) * eps)

    def cell_indices(self) -> np.ndarray:
        return np.arange(-self.max_index, self.max_index + 1)


@dataclass(frozen=True)
class TestFunction:
    """A rapidly decaying function paired against the grid states.

    ``tail_radius`` bounds the support for quadrature purposes: beyond
    it the function is negligible (below 1e-18 of its peak for the
    built-in suite), which is what justifies truncating integrals.
    """

    name: str
    fn: object
    tail_radius: float = DEFAULT_RADIUS

    def __call__(self, x):
        return self.fn(x)


def _hermite_function(degree: int):
    basis = np.zeros(degree + 1)
    basis[degree] = 1.0
    norm = np.sqrt(float(2 ** degree) * float(math.factorial(degree)) * np.sqrt(np.pi))

    def fn(x):
        return np.polynomial.hermite.hermval(x, basis) * np.exp(-np.asarray(x) ** 2 / 2.0) / norm

    return fn


def _builtin_suite():
    suite = {
        "gauss": TestFunction("gauss", lambda x: np.exp(-np.asarray(x) ** 2 / 2.0), 15.0),
        "xgauss": TestFunction("xgauss", lambda x: np.asarray(x) * np.exp(-np.asarray(x) ** 2 / 2.0), 15.0),
        "shifted-gauss": TestFunction(
            "shifted-gauss", lambda x: np.exp(-(np.asarray(x) - 1.0) ** 2 / 2.0), 16.0
        ),
    }
    for degree in range(5):
        name = f"hermite{degree}"
        suite[name] = TestFunction(name, _hermite_function(degree), 20.0)
    return suite


TEST_FUNCTIONS = _builtin_suite()


def named_test_function(name: str) -> TestFunction:
    try:
        return TEST_FUNCTIONS[name]
    except KeyError:
        known = ", ".join(sorted(TEST_FUNCTIONS))
        raise InvariantError(f"unknown test function {name!r}; known: {known}") from None


def cell_pairing(embedding: GridEmbedding, r: int, f) -> float:
    """Integral of f over cell r by fixed-order Gauss-Legendre quadrature."""
    lo, hi = embedding.cell_bounds(int(r))
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    values = np.asarray(f(mid + half * _NODES))
    total = half * np.sum(_WEIGHTS * values)
    if np.iscomplexobj(values):
        return complex(total)
    return float(total)


def renormalized_pairing(embedding: GridEmbedding, f, g) -> float:
    """The scaled pairing of the grid state with f (x) g.

    Equals (1/eps) * sum over cells of (integral of f) * (integral of g),
    which is sqrt(N) times the pairing of the imbedded correlated state.
    """
    eps = embedding.epsilon
    total = 0.0
    for r in embedding.cell_indices():
        total += cell_pairing(embedding, r, f) * cell_pairing(embedding, r, g)
    total = total / eps
    return complex(total) if isinstance(total, complex) else float(total)


def limit_target(f, g, radius: float = None) -> float:
    """Adaptive quadrature of the product f*g over a truncated domain.

    The truncation radius defaults to 40 or the functions' tail radii,
    whichever is larger; a crude decay check at the boundary guards the
    neglected tail.
    """
    if radius is None:
        radius = DEFAULT_RADIUS
        for fn in (f, g):
            radius = max(radius, getattr(fn, "tail_radius", 0.0))
    boundary = max(abs(complex(f(radius) * g(radius))), abs(complex(f(-radius) * g(-radius))))
    if boundary > TAIL_BOUND:
        raise QuadratureFailureError(
            f"product still {boundary:.3e} at |x| = {radius}; tail bound "
            f"{TAIL_BOUND:.0e} cannot be certified"
        )

    def run(part):
        value, estimate = integrate.quad(
            lambda x: part(complex(f(x)) * complex(g(x))),
            -radius,
            radius,
            epsabs=1e-13,
            epsrel=1e-13,
            limit=400,
        )
        if estimate > 1e-10:
            raise QuadratureFailureError(
                f"quadrature error estimate {estimate:.3e} exceeds 1e-10"
            )
        return value

    real = run(lambda z: z.real)
    if abs(complex(f(0.0)).imag) > 0.0 or abs(complex(g(0.0)).imag) > 0.0:
        return complex(real, run(lambda z: z.imag))
    return float(real)


@dataclass(frozen=True)
class SweepRow:
    n: int
    epsilon: float
    pairing: float
    target: float
    abs_error: float


def convergence_sweep(ns, f, g) -> list:
    """Pairing-versus-target table over increasing odd grid sizes."""
    sizes = [int(n) for n in ns]
    if not sizes:
        raise InvariantError("need at least one grid size")
    if any(n % 2 == 0 or n < 1 for n in sizes):
        raise InvariantError(f"grid sizes must be positive odd integers, got {sizes}")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise InvariantError(f"grid sizes must be strictly increasing, got {sizes}")

    target = limit_target(f, g)
    rows = []
    for n in sizes:
        embedding = GridEmbedding(n)
        pairing = renormalized_pairing(embedding, f, g)
        rows.append(
            SweepRow(n, embedding.epsilon, pairing, target, abs(pairing - target))
        )
    return rows
