import itertools
import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")


def brute_phi(a, u, v):
    """Independent oracle: loop over every proper subset with plain Python sums."""
    n = len(u)
    pi = [u[i] * v[i] for i in range(n)]
    total = sum(pi)
    best = math.inf
    for size in range(1, n):
        for S in itertools.combinations(range(n), size):
            inside = set(S)
            w = sum(pi[i] for i in S)
            if w > total / 2 + 1e-12:
                continue
            flow = sum(a[i][j] * u[i] * v[j] for i in S for j in range(n) if j not in inside)
            best = min(best, flow / w)
    return best


def dense_pf(a):
    """Oracle PF pair from numpy's eig, normalized to <u, v> = 1."""
    vals, vecs = np.linalg.eig(a)
    i = int(np.argmax(vals.real))
    v = np.abs(vecs[:, i].real)
    lvals, lvecs = np.linalg.eig(a.T)
    j = int(np.argmax(lvals.real))
    u = np.abs(lvecs[:, j].real)
    return vals[i].real, u / (u @ v), v


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def multiset_close(x, y, atol):
    """Greedy nearest matching of two complex multisets."""
    x = list(np.asarray(x, complex))
    y = list(np.asarray(y, complex))
    if len(x) != len(y):
        return False
    for z in x:
        j = int(np.argmin([abs(z - w) for w in y]))
        if abs(z - y[j]) > atol:
            return False
        y.pop(j)
    return True
