"""Entropic quantities of a joint table relative to a reference marginal.

Everything here is exact up to floating point: the smooth min-entropies are
computed by solving their piecewise-linear clipping characterizations at the
ratio breakpoints, not by generic numerical optimization.  Values are nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .errors import ReferenceSupportError
from .tables import MASS_TOL, JointTable, MarginalTable

ATOM_MERGE_TOL = 1e-12


@dataclass(frozen=True)
class EntropyValue:
    """An entropy in nats, tagged with the producing quantity.

    ``degenerate`` flags edge conventions: an all-zero table (+inf), mass
    outside the reference support (-inf), or a smoothing ball wide enough
    to erase the table (+inf).
    """

    value: float
    kind: str
    degenerate: bool = False

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True, eq=False)
class SpectrumTable:
    """Sorted atoms of -log(P(x,z)/R(z)) with their aggregated masses."""

    r_values: np.ndarray
    masses: np.ndarray
    cumulative: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        r = np.asarray(self.r_values, dtype=float)
        m = np.asarray(self.masses, dtype=float)
        if r.shape != m.shape or r.ndim != 1:
            raise ValueError("r_values and masses must be matching 1-D arrays")
        object.__setattr__(self, "r_values", r)
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "cumulative", np.cumsum(m))

    @property
    def total_mass(self) -> float:
        return float(self.cumulative[-1]) if self.cumulative.size else 0.0

    def threshold(self, eps: float) -> float:
        """Largest r with P{-log(P/R) <= r} <= eps (sup semantics).

        Returns the first atom whose cumulative mass strictly exceeds eps,
        or +inf when no cumulative does (sub-normalized edge).
        """
        if not 0.0 <= eps < 1.0:
            raise ValueError("eps must lie in [0, 1)")
        idx = int(np.searchsorted(self.cumulative, eps, side="right"))
        if idx >= self.r_values.size:
            return math.inf
        return float(self.r_values[idx])


def _ratio_cells(table: JointTable, reference: MarginalTable):
    """Likelihood ratios P/R over populated in-support cells, plus stray mass.

    Returns (ratios, masses, refs, stray) where ``stray`` is the weight
    sitting at z outside supp(R).
    """
    if table.z_size != reference.z_size:
        raise ReferenceSupportError("table and reference Z alphabets differ")
    w = table.weights
    stray = float(w[:, ~reference.support].sum())
    refs = np.broadcast_to(reference.probs, w.shape)
    mask = (w > 0.0) & reference.support[None, :]
    masses = w[mask]
    refs = refs[mask]
    return masses / refs, masses, refs, stray


def min_entropy(table: JointTable, reference: MarginalTable) -> EntropyValue:
    """-log of the largest likelihood ratio P(x,z)/R(z) over supp(R).

    Mass outside supp(R) yields -inf (flagged); an all-zero table yields
    +inf by convention (flagged).
    """
    ratios, _, _, stray = _ratio_cells(table, reference)
    if stray > MASS_TOL:
        return EntropyValue(-math.inf, "min", degenerate=True)
    if ratios.size == 0:
        return EntropyValue(math.inf, "min", degenerate=True)
    return EntropyValue(-math.log(ratios.max()), "min")


def collision_entropy(table: JointTable, reference: MarginalTable) -> EntropyValue:
    """Order-2 conditional Renyi entropy: -log sum P(x,z)^2 / R(z)."""
    ratios, masses, _, stray = _ratio_cells(table, reference)
    if stray > MASS_TOL:
        return EntropyValue(-math.inf, "collision", degenerate=True)
    if ratios.size == 0:
        return EntropyValue(math.inf, "collision", degenerate=True)
    return EntropyValue(-math.log(float(np.dot(masses, ratios))), "collision")


def renyi_entropy(table: JointTable, reference: MarginalTable, theta: float) -> EntropyValue:
    """Order-(1+theta) conditional Renyi entropy relative to the reference.

    -(1/theta) log sum_{x,z} R(z) (P(x,z)/R(z))^{1+theta} for theta in
    (0, 1]; at theta = 1 this equals the collision entropy.  The theta -> 0
    limit is served by :func:`conditional_entropy`.
    """
    if not 0.0 < theta <= 1.0:
        raise ValueError("theta must lie in (0, 1]")
    ratios, masses, _, stray = _ratio_cells(table, reference)
    if stray > MASS_TOL:
        return EntropyValue(-math.inf, "renyi", degenerate=True)
    if ratios.size == 0:
        return EntropyValue(math.inf, "renyi", degenerate=True)
    log_terms = np.log(masses) + theta * np.log(ratios)
    return EntropyValue(-float(logsumexp(log_terms)) / theta, "renyi")


def renyi_curve(table: JointTable, reference: MarginalTable):
    """theta -> order-(1+theta) Renyi entropy, with the cell arrays cached.

    Same values as :func:`renyi_entropy`; built for optimizers that probe
    many orders against one table.  Cells sharing a likelihood ratio are
    aggregated up front, which collapses i.i.d. product tables to a
    handful of atoms.
    """
    ratios, masses, _, stray = _ratio_cells(table, reference)
    if stray > MASS_TOL or ratios.size == 0:
        degenerate = -math.inf if stray > MASS_TOL else math.inf

        def flat(theta: float) -> float:
            return degenerate

        return flat
    unique, inverse = np.unique(ratios, return_inverse=True)
    log_masses = np.log(np.bincount(inverse, weights=masses))
    log_ratios = np.log(unique)

    def value(theta: float) -> float:
        return -float(logsumexp(log_masses + theta * log_ratios)) / theta

    return value


def exponent_curve(table: JointTable):
    """rho -> security exponent, with the conditional logs cached.

    Same values as :func:`security_exponent` on (0, 1/2].  Within each z
    column, repeated conditional probabilities are grouped once so each
    evaluation runs over the distinct atoms only.
    """
    pz = table.z_mass()
    on = pz > 0.0
    log_pz = np.log(pz[on])
    log_cond = table.log_weights[:, on] - log_pz[None, :]
    z_ids = np.broadcast_to(np.arange(log_cond.shape[1]), log_cond.shape)
    populated = np.isfinite(log_cond)
    z_flat = z_ids[populated]
    lc_flat = log_cond[populated]
    order = np.lexsort((lc_flat, z_flat))
    z_sorted, lc_sorted = z_flat[order], lc_flat[order]
    fresh = np.concatenate(
        ([True], (z_sorted[1:] != z_sorted[:-1]) | (lc_sorted[1:] != lc_sorted[:-1]))
    )
    starts = np.flatnonzero(fresh)
    group_z = z_sorted[starts]
    group_lc = lc_sorted[starts]
    group_log_count = np.log(np.diff(np.append(starts, z_sorted.size)))
    segments = np.flatnonzero(
        np.concatenate(([True], group_z[1:] != group_z[:-1]))
    )
    segment_sizes = np.diff(np.append(segments, group_z.size))
    segment_log_pz = log_pz[group_z[segments]]

    def value(rho: float) -> float:
        terms = group_lc / (1.0 - rho) + group_log_count
        peaks = np.maximum.reduceat(terms, segments)
        sums = np.add.reduceat(np.exp(terms - np.repeat(peaks, segment_sizes)), segments)
        inner = np.log(sums) + peaks
        return float(logsumexp(segment_log_pz + (1.0 - rho) * inner))

    return value


def conditional_entropy(table: JointTable, reference: MarginalTable | None = None) -> EntropyValue:
    """H(X|Z) minus the divergence D(P_Z || R); the order-1 Renyi limit.

    With the reference equal to (or omitted for) the table's own Z marginal
    the divergence vanishes and this is plain H(X|Z).
    """
    if not table.normalized:
        raise ValueError("conditional_entropy requires a normalized table")
    w = table.weights
    pz = table.z_mass()
    mask = w > 0.0
    log_cond = table.log_weights[mask] - np.log(np.broadcast_to(pz, w.shape)[mask])
    h_xz = -float(np.dot(w[mask], log_cond))
    if reference is None:
        return EntropyValue(h_xz, "order1")
    if reference.z_size != table.z_size:
        raise ReferenceSupportError("table and reference Z alphabets differ")
    on = pz > 0.0
    if np.any(on & ~reference.support):
        raise ReferenceSupportError("P_Z has mass outside the reference support")
    div = float(np.dot(pz[on], np.log(pz[on]) - np.log(reference.probs[on])))
    return EntropyValue(h_xz - div, "order1")


def security_exponent(rho: float, table: JointTable) -> EntropyValue:
    """log sum_z P_Z(z) (sum_x P(x|z)^{1/(1-rho)})^{1-rho}; never positive.

    Defined for rho in [0, 1/2]; rho = 0 returns exactly 0.
    """
    if not 0.0 <= rho <= 0.5:
        raise ValueError("rho must lie in [0, 1/2]")
    if not table.normalized:
        raise ValueError("security_exponent requires a normalized table")
    if rho == 0.0:
        return EntropyValue(0.0, "exponent")
    pz = table.z_mass()
    on = pz > 0.0
    log_pz = np.log(pz[on])
    log_cond = table.log_weights[:, on] - log_pz[None, :]
    with np.errstate(invalid="ignore"):
        inner = logsumexp(log_cond / (1.0 - rho), axis=0)
    value = float(logsumexp(log_pz + (1.0 - rho) * inner))
    return EntropyValue(value, "exponent")


def log_likelihood_spectrum(table: JointTable, reference: MarginalTable) -> SpectrumTable:
    """Distribution of -log(P(x,z)/R(z)) over populated cells.

    Atoms within ``ATOM_MERGE_TOL`` (relative) of one another are merged;
    mass at z outside supp(R) appears as a -inf atom.
    """
    ratios, masses, _, stray = _ratio_cells(table, reference)
    values = -np.log(ratios)
    order = np.argsort(values)
    values, weights = values[order], masses[order]
    if values.size:
        gaps = np.diff(values) > ATOM_MERGE_TOL * np.maximum(1.0, np.abs(values[1:]))
        starts = np.flatnonzero(np.concatenate(([True], gaps)))
        merged_r = values[starts]
        merged_m = np.add.reduceat(weights, starts)
    else:
        merged_r = np.empty(0)
        merged_m = np.empty(0)
    if stray > MASS_TOL:
        merged_r = np.concatenate(([-math.inf], merged_r))
        merged_m = np.concatenate(([stray], merged_m))
    return SpectrumTable(merged_r, merged_m)


def spectral_entropy(source, reference: MarginalTable | None = None, eps: float = 0.0) -> EntropyValue:
    """Inf-spectral entropy: sup{r : P{-log(P/R) <= r} <= eps}.

    ``source`` may be a JointTable (with ``reference``) or a prebuilt
    SpectrumTable.
    """
    if isinstance(source, SpectrumTable):
        spectrum = source
    else:
        if reference is None:
            raise ValueError("a reference marginal is required with a joint table")
        spectrum = log_likelihood_spectrum(source, reference)
    value = spectrum.threshold(eps)
    return EntropyValue(value, "spectral", degenerate=not math.isfinite(value))


def _clip_threshold(ratios, masses, refs, extra: float, budget: float) -> float | None:
    """Smallest t >= 0 with extra + sum(max(0, m_i - t r_i)) <= budget.

    The excess function is continuous, piecewise linear and decreasing in t,
    so the crossing is solved exactly at the sorted ratio breakpoints.
    Returns None when even full removal cannot fit the budget (stray mass
    above budget), 0.0 when the whole table fits.
    """
    total = extra + float(masses.sum())
    if budget >= total:
        return 0.0
    if extra > budget:
        return None
    rem = budget - extra
    order = np.argsort(-ratios)
    r = ratios[order]
    a = np.cumsum(masses[order])
    b = np.cumsum(refs[order])
    # Excess evaluated at each breakpoint t = r[j]; nondecreasing in j.
    excess_bp = np.concatenate(([0.0], a[:-1] - r[1:] * b[:-1]))
    j = int(np.searchsorted(excess_bp, rem, side="right")) - 1
    return float((a[j] - rem) / b[j])


def smooth_min_entropy_sub(table: JointTable, reference: MarginalTable, eps: float) -> EntropyValue:
    """Max of the min-entropy over the sub-normalized ball of radius eps.

    The optimum truncates the table at a threshold t times the reference;
    a half-L1 radius of eps buys 2*eps of removable mass.  Solved exactly
    at the ratio breakpoints.
    """
    if eps < 0.0:
        raise ValueError("eps must be nonnegative")
    ratios, masses, refs, stray = _ratio_cells(table, reference)
    t = _clip_threshold(ratios, masses, refs, stray, 2.0 * eps)
    if t is None:
        return EntropyValue(-math.inf, "smooth_min_sub", degenerate=True)
    if t == 0.0:
        return EntropyValue(math.inf, "smooth_min_sub", degenerate=True)
    return EntropyValue(-math.log(t), "smooth_min_sub")


def smooth_min_entropy(table: JointTable, reference: MarginalTable, eps: float) -> EntropyValue:
    """Max of the min-entropy over normalized tables within distance eps.

    A threshold t is feasible iff the clipped excess fits the budget eps
    and the headroom below t*R can absorb it.  Headroom minus excess equals
    t*|X| - 1, so the optimum is exactly max(t_budget, 1/|X|) with t_budget
    the breakpoint solution of excess(t) = eps.
    """
    if eps < 0.0:
        raise ValueError("eps must be nonnegative")
    if not table.normalized:
        raise ValueError("smooth_min_entropy requires a normalized table")
    ratios, masses, refs, stray = _ratio_cells(table, reference)
    if stray > MASS_TOL:
        raise ReferenceSupportError("table has mass outside the reference support")
    t_budget = _clip_threshold(ratios, masses, refs, 0.0, eps)
    t = max(t_budget, table.total_mass / table.x_size)
    return EntropyValue(-math.log(t), "smooth_min")


def dispersion(table: JointTable) -> float:
    """Variance of the conditional log-likelihood -log P(x|z), in nats^2."""
    if not table.normalized:
        raise ValueError("dispersion requires a normalized table")
    w = table.weights
    pz = table.z_mass()
    mask = w > 0.0
    log_cond = table.log_weights[mask] - np.log(np.broadcast_to(pz, w.shape)[mask])
    weights = w[mask]
    mean = float(np.dot(weights, -log_cond))
    return float(np.dot(weights, (-log_cond - mean) ** 2))
