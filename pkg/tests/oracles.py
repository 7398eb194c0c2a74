"""Independent oracles used by the tests.

Deliberately decoupled from the package's own computation paths: exact
rational arithmetic for binomial tails, interval bisection for the normal
quantile, linear programming and brute-force simplex grids for the
smoothing balls.
"""

import itertools
import math
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from pabounds import normal_cdf


def binomial_cdf_fraction(n: int, q: float, k: int) -> Fraction:
    """Exact rational B(n, q, k) at the binary-float value of q."""
    qf = Fraction(q)
    return sum(
        math.comb(n, j) * qf ** j * (1 - qf) ** (n - j) for j in range(k + 1)
    )


def normal_quantile_bisect(p: float, lo: float = -40.0, hi: float = 40.0) -> float:
    """Invert the normal CDF by plain bisection to 1e-12 interval width."""
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if normal_cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def smooth_min_entropy_lp(table, reference, eps: float, normalized: bool) -> float:
    """Max of H_min(Q|R) over the eps-ball around the table, as an LP.

    Variables are the candidate weights Q, the absolute deviations u, and
    the ratio ceiling t; minimizing t maximizes -log t.  ``normalized``
    selects the normalized ball (sum Q = 1) versus the sub-normalized one
    (sum Q <= 1).
    """
    p = table.weights.reshape(-1)
    r = np.repeat(reference.probs[None, :], table.x_size, axis=0).reshape(-1)
    m = p.size
    # variable layout: [Q_0..Q_{m-1}, u_0..u_{m-1}, t]
    cost = np.zeros(2 * m + 1)
    cost[-1] = 1.0
    rows, b_ub = [], []
    for i in range(m):
        row = np.zeros(2 * m + 1)
        row[i], row[-1] = 1.0, -r[i]
        rows.append(row)
        b_ub.append(0.0)
        row = np.zeros(2 * m + 1)
        row[i], row[m + i] = 1.0, -1.0
        rows.append(row)
        b_ub.append(p[i])
        row = np.zeros(2 * m + 1)
        row[i], row[m + i] = -1.0, -1.0
        rows.append(row)
        b_ub.append(-p[i])
    budget = np.zeros(2 * m + 1)
    budget[m : 2 * m] = 1.0
    rows.append(budget)
    b_ub.append(2.0 * eps)
    a_eq = b_eq = None
    if normalized:
        total = np.zeros(2 * m + 1)
        total[:m] = 1.0
        a_eq, b_eq = [total], [1.0]
    else:
        total = np.zeros(2 * m + 1)
        total[:m] = 1.0
        rows.append(total)
        b_ub.append(1.0)
    result = linprog(
        cost,
        A_ub=np.array(rows),
        b_ub=np.array(b_ub),
        A_eq=np.array(a_eq) if a_eq is not None else None,
        b_eq=np.array(b_eq) if b_eq is not None else None,
        bounds=[(0.0, None)] * (2 * m) + [(0.0, None)],
        method="highs",
    )
    assert result.status == 0, result.message
    return -math.log(result.x[-1])


def smooth_min_entropy_grid(weights, eps: float, resolution: int = 120) -> float:
    """Brute-force sub-normalized ball search for a single-z table.

    Enumerates candidate weight vectors on a grid of the given resolution
    and returns the best H_min found; a lower bound on the true optimum
    within the grid spacing.
    """
    p = np.asarray(weights, dtype=float)
    assert p.ndim == 1 and p.size <= 3
    best = -math.inf
    steps = range(resolution + 1)
    for combo in itertools.product(steps, repeat=p.size):
        q = np.array(combo, dtype=float) / resolution
        if q.sum() > 1.0 + 1e-12:
            continue
        if 0.5 * np.abs(q - p).sum() > eps + 1e-12:
            continue
        peak = q.max()
        if peak <= 0.0:
            continue
        best = max(best, -math.log(peak))
    return best
