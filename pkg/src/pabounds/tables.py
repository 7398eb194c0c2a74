"""Finite-alphabet probability tables and the operations built on them.

Joint weight tables may be sub-normalized (total mass at most one); reference
marginals are always normalized.  All logarithms are natural, so every
entropic quantity downstream is expressed in nats.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import AlphabetMismatchError, ReferenceSupportError, SizeCapError

MASS_TOL = 1e-12
DEFAULT_CELL_CAP = 2 ** 20


def _weights(obj) -> np.ndarray:
    if isinstance(obj, JointTable):
        return obj.weights
    if isinstance(obj, MarginalTable):
        return obj.probs
    return np.asarray(obj, dtype=float)


@dataclass(frozen=True, eq=False)
class JointTable:
    """Sub-normalized joint weight table over a finite X x Z alphabet.

    Weights are nonnegative and sum to at most 1 (within ``MASS_TOL``).
    Natural-log weights are precomputed, with ``-inf`` marking empty cells.
    Instances are immutable; the backing arrays are marked read-only, so
    tables are safe to share across threads.
    """

    weights: np.ndarray
    log_weights: np.ndarray = field(init=False, repr=False)
    x_size: int = field(init=False)
    z_size: int = field(init=False)
    total_mass: float = field(init=False)
    normalized: bool = field(init=False)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2 or w.size == 0:
            raise ValueError("weights must be a non-empty 2-D array")
        if not np.all(np.isfinite(w)) or np.any(w < 0.0):
            raise ValueError("weights must be finite and nonnegative")
        total = float(w.sum())
        if total > 1.0 + MASS_TOL:
            raise ValueError(f"total mass {total!r} exceeds 1")
        w.flags.writeable = False
        with np.errstate(divide="ignore"):
            lw = np.log(w)
        lw.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "log_weights", lw)
        object.__setattr__(self, "x_size", w.shape[0])
        object.__setattr__(self, "z_size", w.shape[1])
        object.__setattr__(self, "total_mass", total)
        object.__setattr__(self, "normalized", abs(total - 1.0) <= MASS_TOL)

    def z_mass(self) -> np.ndarray:
        """Column sums (mass per z); sub-normalized tables allowed."""
        return self.weights.sum(axis=0)

    def z_marginal(self) -> "MarginalTable":
        """Z-marginal as a normalized reference; requires a normalized table."""
        if not self.normalized:
            raise ValueError("z_marginal requires a normalized table")
        return MarginalTable(self.z_mass())

    def normalize(self) -> "JointTable":
        """Rescale the weights to total mass one (explicit request only)."""
        if self.total_mass <= 0.0:
            raise ValueError("cannot normalize an all-zero table")
        return JointTable(self.weights / self.total_mass)

    def to_json(self) -> str:
        payload = {
            "x_size": self.x_size,
            "z_size": self.z_size,
            "weights": [float(v) for v in self.weights.reshape(-1)],
        }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str, renormalize: bool = False) -> "JointTable":
        """Parse ``{x_size, z_size, weights}`` with row-major weights.

        Weights are taken exactly as read; pass ``renormalize=True`` to
        rescale to total mass one.
        """
        payload = json.loads(text)
        x, z = int(payload["x_size"]), int(payload["z_size"])
        w = np.asarray(payload["weights"], dtype=float)
        if w.size != x * z:
            raise ValueError("weights length does not match x_size * z_size")
        w = w.reshape(x, z)
        if renormalize:
            total = w.sum()
            if total <= 0.0:
                raise ValueError("cannot renormalize an all-zero table")
            w = w / total
        return cls(w)


@dataclass(frozen=True, eq=False)
class MarginalTable:
    """Normalized distribution over the Z alphabet (reference R_Z or P_Z)."""

    probs: np.ndarray
    z_size: int = field(init=False)
    support: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probs must be a non-empty 1-D array")
        if not np.all(np.isfinite(p)) or np.any(p < 0.0):
            raise ValueError("probs must be finite and nonnegative")
        total = float(p.sum())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"marginal must be normalized, got total {total!r}")
        p.flags.writeable = False
        sup = p > 0.0
        sup.flags.writeable = False
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "z_size", p.size)
        object.__setattr__(self, "support", sup)

    @classmethod
    def uniform(cls, z_size: int) -> "MarginalTable":
        return cls(np.full(z_size, 1.0 / z_size))

    def mixed_with_uniform(self, weight: float = 0.01) -> "MarginalTable":
        """Blend in uniform mass so the support covers the whole alphabet."""
        return MarginalTable((1.0 - weight) * self.probs + weight / self.z_size)


@dataclass(frozen=True)
class BscSource:
    """I.i.d. source: X uniform on bits, Z the output of a BSC with crossover q.

    The single-letter joint puts mass (1-q)/2 on agreeing (x, z) pairs and
    q/2 on disagreeing ones.
    """

    q: float
    n: int

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise ValueError("crossover probability must lie in [0, 1]")
        if self.n < 1:
            raise ValueError("block length must be a positive integer")

    def single_letter(self) -> JointTable:
        a, b = (1.0 - self.q) / 2.0, self.q / 2.0
        return JointTable(np.array([[a, b], [b, a]]))

    def product_table(self, cap: int = DEFAULT_CELL_CAP) -> JointTable:
        """Materialize the n-fold product table (small n only)."""
        return product_extension(self.single_letter(), self.n, cap=cap)


def total_variation(p, q) -> float:
    """Half-L1 distance between two same-shape weight tables.

    Accepts joint tables, marginals, or plain arrays; sub-normalized inputs
    are fine.  Symmetric, and a metric on tables of equal shape.
    """
    a, b = _weights(p), _weights(q)
    if a.shape != b.shape:
        raise AlphabetMismatchError(f"shape mismatch: {a.shape} vs {b.shape}")
    return 0.5 * float(np.abs(a - b).sum())


def push_forward(f, table: JointTable, s_size: int | None = None) -> JointTable:
    """Joint table of (f(X), Z): sums the rows of each preimage f^{-1}(s).

    ``f`` maps x indices to s indices, given as a length-x_size sequence.
    Total mass is preserved.
    """
    fx = np.asarray(f, dtype=int)
    if fx.shape != (table.x_size,):
        raise AlphabetMismatchError("f must assign one output per x symbol")
    if np.any(fx < 0):
        raise ValueError("f must map to nonnegative indices")
    size = int(fx.max()) + 1 if s_size is None else int(s_size)
    if np.any(fx >= size):
        raise ValueError("f maps outside the requested output alphabet")
    out = np.zeros((size, table.z_size))
    np.add.at(out, fx, table.weights)
    return JointTable(out)


def _distance_from_ideal(key_table: JointTable) -> float:
    """d(P_SZ, uniform-on-S x P_Z); accepts sub-normalized tables."""
    ideal = np.outer(
        np.full(key_table.x_size, 1.0 / key_table.x_size), key_table.z_mass()
    )
    return 0.5 * float(np.abs(key_table.weights - ideal).sum())


def security_distance(f, table: JointTable, s_size: int | None = None) -> float:
    """Half-L1 distance of the hashed key from an ideal uniform key.

    Pushes the joint through ``f`` and measures the distance to
    uniform-on-S times the Z marginal.  Only normalized inputs carry the
    operational meaning, so sub-normalized tables are rejected.
    """
    if not table.normalized:
        raise ValueError("security_distance requires a normalized table")
    return _distance_from_ideal(push_forward(f, table, s_size=s_size))


def clip_below(table: JointTable, reference: MarginalTable, r: float) -> JointTable:
    """Zero out every cell whose log-likelihood ratio -log(P/R) is <= r.

    The kept cells are exactly those with -log(P(x,z)/R(z)) > r, i.e. the
    high-surprisal part of the table; the removed mass equals
    P{-log(P/R) <= r}.  Requires supp(P_Z) within supp(R).
    """
    if table.z_size != reference.z_size:
        raise AlphabetMismatchError("table and reference Z alphabets differ")
    stray = table.z_mass()[~reference.support].sum()
    if stray > MASS_TOL:
        raise ReferenceSupportError("table has mass outside the reference support")
    with np.errstate(divide="ignore", invalid="ignore"):
        surprisal = np.log(reference.probs)[None, :] - table.log_weights
    keep = (table.weights > 0.0) & (surprisal > r)
    return JointTable(np.where(keep, table.weights, 0.0))


def product_extension(table: JointTable, n: int, cap: int = DEFAULT_CELL_CAP) -> JointTable:
    """Materialize the n-fold i.i.d. product table.

    Cell count is (x_size * z_size)^n and must stay within ``cap``; larger
    blocks are served by closed forms elsewhere, never materialized.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    cells = (table.x_size * table.z_size) ** n
    if cells > cap:
        raise SizeCapError(
            f"product table would hold {cells} cells, above the cap of {cap}"
        )
    out = table.weights
    for _ in range(n - 1):
        out = np.kron(out, table.weights)
    return JointTable(out)
