"""Joint, marginal, and conditional statistics of commuting factor observables.

For a first-factor observable A and a second-factor observable B,
measured together in a state with coefficient matrix C, the probability
of the eigenvalue pair (a, b) is |E_a C F_b^T|_F^2 where E_a, F_b are
the spectral projections.  Prediction with certainty is the statement
that the joint measure is carried by the graph of a function from
a-values to b-values.
"""

from __future__ import annotations

import numpy as np

from .analysis import EprAnalyzer
from .errors import (
    DimensionMismatchError,
    GraphUndefinedError,
    InvariantError,
    NotNormalizedError,
    PreconditionFailedError,
)
from .linalg import DEFAULT_TOL, Tolerances
from .states import Observable, PureState

POSITIVE_MASS = 1e-12
CLAMP = 1e-14
VALUE_MATCH_REL = 1e-8


def values_match(x: float, y: float, rel: float = VALUE_MATCH_REL) -> bool:
    """Eigenvalue comparison with the relative matching tolerance."""
    return abs(x - y) <= rel * (1.0 + max(abs(x), abs(y)))


class DiscreteJointDistribution:
    """A finitely supported probability measure on eigenvalue pairs.

    Stored as a grid over the distinct a-values and b-values; ``support``
    and ``probs`` expose the flattened view.
    """

    def __init__(self, a_values, b_values, table):
        self.a_values = np.asarray(a_values, dtype=float)
        self.b_values = np.asarray(b_values, dtype=float)
        grid = np.asarray(table, dtype=float)
        if grid.shape != (self.a_values.size, self.b_values.size):
            raise InvariantError(
                f"probability table of shape {grid.shape} does not match "
                f"{self.a_values.size} x {self.b_values.size} values"
            )
        if np.any(grid < -CLAMP):
            raise InvariantError("probabilities must be nonnegative")
        grid = np.where(grid < CLAMP, 0.0, grid)
        total = float(grid.sum())
        if abs(total - 1.0) > 1e-10:
            raise InvariantError(f"probabilities sum to {total!r}, expected 1")
        grid.setflags(write=False)
        self.table = grid

    @property
    def support(self):
        return [
            (float(a), float(b))
            for a in self.a_values
            for b in self.b_values
        ]

    @property
    def probs(self) -> np.ndarray:
        return self.table.ravel()

    def marginal_a(self):
        return self.a_values.copy(), self.table.sum(axis=1)

    def marginal_b(self):
        return self.b_values.copy(), self.table.sum(axis=0)


def joint_distribution(state: PureState, obs1: Observable, obs2: Observable,
                       tol: Tolerances = DEFAULT_TOL) -> DiscreteJointDistribution:
    """Joint distribution of the two factor observables in the state."""
    if obs1.dim != state.space1.dim or obs2.dim != state.space2.dim:
        raise DimensionMismatchError(
            f"observables of dimensions ({obs1.dim}, {obs2.dim}) do not act on "
            f"the factors of dimensions {state.dims}"
        )
    if not state.is_normalized(1e-10):
        raise NotNormalizedError(
            f"state norm is {state.norm()!r}; joint distributions need a unit state"
        )
    coeff = state.coeffs
    table = np.empty((len(obs1.values), len(obs2.values)))
    for i, block1 in enumerate(obs1.blocks):
        compressed = block1.conj().T @ coeff
        for j, block2 in enumerate(obs2.blocks):
            # |E_a C F_b^T|_F with isometric factors stripped off.
            table[i, j] = np.linalg.norm(compressed @ np.conj(block2)) ** 2
    return DiscreteJointDistribution(obs1.values, obs2.values, table)


def observable_distribution(state: PureState, obs2: Observable,
                            tol: Tolerances = DEFAULT_TOL):
    """Distribution of a second-factor observable alone: (values, probs)."""
    if obs2.dim != state.space2.dim:
        raise DimensionMismatchError(
            f"observable of dimension {obs2.dim} does not act on the second "
            f"factor (dim {state.space2.dim})"
        )
    coeff = state.coeffs
    probs = np.array(
        [np.linalg.norm(coeff @ np.conj(block)) ** 2 for block in obs2.blocks]
    )
    return obs2.values.copy(), probs


class ConditionalFamily:
    """Conditional measures q_a(b) for the a-values of positive marginal mass."""

    def __init__(self, entries):
        self.entries = dict(entries)

    def condition_on(self, a: float):
        for key, dist in self.entries.items():
            if values_match(key, a):
                return dist
        raise KeyError(f"no positive-mass a-value matching {a!r}")

    def point_mass_at(self, a: float, tol: float = 1e-10):
        """The b-value carrying all conditional mass given a, or None."""
        b_values, q = self.condition_on(a)
        top = int(np.argmax(q))
        if q[top] >= 1.0 - tol:
            return float(b_values[top])
        return None


def conditional_family(joint: DiscreteJointDistribution) -> ConditionalFamily:
    """Fiber the joint measure over its first marginal."""
    _, marginal = joint.marginal_a()
    entries = {}
    for i, a in enumerate(joint.a_values):
        if marginal[i] > POSITIVE_MASS:
            entries[float(a)] = (joint.b_values.copy(), joint.table[i] / marginal[i])
    return ConditionalFamily(entries)


def _graph_value(g, a: float):
    if callable(g):
        return float(g(a))
    for key, value in g.items():
        if values_match(float(key), a):
            return float(value)
    raise GraphUndefinedError(f"graph has no value for a = {a!r}")


def graph_concentration_check(joint: DiscreteJointDistribution, g,
                              tol: float = 1e-10) -> bool:
    """Whether the joint measure is carried by the graph of ``g``.

    ``g`` maps a-values to b-values (callable or mapping); it must be
    defined on every a-value of positive marginal mass.  True when the
    mass off the graph is at most ``tol``.
    """
    return off_graph_mass(joint, g) <= tol


def off_graph_mass(joint: DiscreteJointDistribution, g) -> float:
    _, marginal = joint.marginal_a()
    on_graph = 0.0
    for i, a in enumerate(joint.a_values):
        if marginal[i] <= POSITIVE_MASS:
            continue
        target = _graph_value(g, float(a))
        for j, b in enumerate(joint.b_values):
            if values_match(float(b), target):
                on_graph += joint.table[i, j]
    return float(max(joint.table.sum() - on_graph, 0.0))


def min_off_graph_mass(joint: DiscreteJointDistribution) -> float:
    """Off-graph mass minimized over all graphs: sum_a (P1(a) - max_b P(a, b))."""
    return float(joint.table.sum() - joint.table.max(axis=1).sum())


def corollary2_check(joint: DiscreteJointDistribution, g, tol: float = 1e-10) -> bool:
    """Whether the graph maps positive-mass a-values onto positive-mass b-values."""
    if not graph_concentration_check(joint, g, tol):
        raise PreconditionFailedError(
            "joint measure is not concentrated on the graph"
        )
    _, marginal_a = joint.marginal_a()
    _, marginal_b = joint.marginal_b()
    images = [
        _graph_value(g, float(a))
        for a, mass in zip(joint.a_values, marginal_a)
        if mass > POSITIVE_MASS
    ]
    positive_b = [float(b) for b, mass in zip(joint.b_values, marginal_b) if mass > POSITIVE_MASS]
    onto = all(any(values_match(b, img) for img in images) for b in positive_b)
    into = all(any(values_match(img, b) for b in positive_b) for img in images)
    return onto and into


def total_variation(dist1, dist2) -> float:
    """Total variation distance between two discrete (values, probs) measures.

    Values are identified when they match within the eigenvalue
    comparison tolerance.
    """
    values1, probs1 = dist1
    values2, probs2 = dist2
    values1 = np.asarray(values1, dtype=float)
    values2 = np.asarray(values2, dtype=float)
    probs1 = np.asarray(probs1, dtype=float)
    probs2 = np.asarray(probs2, dtype=float)

    used2 = np.zeros(values2.size, dtype=bool)
    distance = 0.0
    for v1, p1 in zip(values1, probs1):
        mass2 = 0.0
        for j, v2 in enumerate(values2):
            if not used2[j] and values_match(v1, float(v2)):
                mass2 += probs2[j]
                used2[j] = True
        distance += abs(p1 - mass2)
    distance += float(probs2[~used2].sum())
    return 0.5 * distance


def off_diagonal_mass(joint: DiscreteJointDistribution) -> float:
    """Mass at pairs whose eigenvalues do not match (identity graph on values)."""
    off_mass = 0.0
    for i, a in enumerate(joint.a_values):
        for j, b in enumerate(joint.b_values):
            if not values_match(float(a), float(b)):
                off_mass += joint.table[i, j]
    return float(off_mass)


def epr_correlation_test(state: PureState, obs2: Observable,
                         tol: float = 1e-10,
                         tolerances: Tolerances = DEFAULT_TOL):
    """Check that the predicted partner observable matches values exactly.

    Computes the partner of ``obs2`` under the predictive map, forms the
    joint distribution, and sums the mass at pairs with mismatched
    eigenvalues.  Returns ``(passed, off_diagonal_mass)``.
    """
    analyzer = EprAnalyzer(
        tolerances.eigen_cluster, tolerances.zero_threshold, tolerances.commutator_tol
    ).fit(state)
    obs1 = analyzer.predict(obs2)  # raises NotInAlgebraError when not predictable
    joint = joint_distribution(state, obs1, obs2, tolerances)
    off_mass = off_diagonal_mass(joint)
    return off_mass <= tol, off_mass
