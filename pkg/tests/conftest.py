"""Shared fixtures and random-object helpers.

All randomized tests draw from a generator seeded with SEED so failures
reproduce; the seed is echoed in the pytest header.
"""

import numpy as np
import pytest

SEED = 20260810


def pytest_report_header(config):
    return f"randomized tests use numpy seed {SEED}"


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


def random_unitary(rng, n):
    raw = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(raw)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_isometry(rng, rows, cols):
    return random_unitary(rng, rows)[:, :cols]


def random_hermitian(rng, n, scale=1.0):
    raw = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (raw + raw.conj().T)


def random_state_coeffs(rng, d1, d2, normalized=True):
    coeffs = rng.standard_normal((d1, d2)) + 1j * rng.standard_normal((d1, d2))
    if normalized:
        coeffs = coeffs / np.linalg.norm(coeffs)
    return coeffs


def group_close_values(values, rel=1e-8):
    """Index groups of an ascending value list, split at relative gaps.

    Local re-implementation kept independent of the package clustering
    so oracle computations do not share code with the paths they check.
    """
    values = np.asarray(values, dtype=float)
    groups = [[0]]
    for i in range(1, values.size):
        gap = values[i] - values[i - 1]
        if gap > rel * (1.0 + max(abs(values[i]), abs(values[i - 1]))):
            groups.append([i])
        else:
            groups[-1].append(i)
    return [np.array(g) for g in groups]
