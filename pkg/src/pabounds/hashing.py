"""Exhaustive small-scale ground truth for the hashing security bounds.

A concrete universal-2 family (binary Toeplitz matrices indexed by their
first column and row) is enumerated in full, giving the exact expected
security distance.  The verification entry points check the proven
inequalities: the leftover-hash bound, the exponential bound, and the
smoothing inequalities behind the spectral bounds.  A violation from an
exact run means an implementation bug, so reports carry the offending
instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import entropy
from .errors import SizeCapError
from .tables import JointTable, MarginalTable, _distance_from_ideal, push_forward

DEFAULT_WORK_CAP = 2 ** 26


@dataclass(frozen=True)
class ToeplitzFamily:
    """All k x m binary Toeplitz matrices, seeded by m + k - 1 bits.

    Member ``seed`` has T[i, j] = bit (i + m - 1 - j) of the seed; the hash
    of an m-bit input x is T x over GF(2).  For any two distinct inputs the
    fraction of members hashing them together is exactly 2^-k.
    """

    m: int
    k: int

    def __post_init__(self):
        if self.m < 1 or self.k < 1:
            raise ValueError("m and k must be positive")

    @property
    def size(self) -> int:
        return 1 << (self.m + self.k - 1)

    @property
    def input_size(self) -> int:
        return 1 << self.m

    @property
    def output_size(self) -> int:
        return 1 << self.k

    def matrix(self, seed: int) -> np.ndarray:
        """The k x m 0/1 matrix of one member."""
        bits = [(seed >> t) & 1 for t in range(self.m + self.k - 1)]
        return np.array(
            [[bits[i + self.m - 1 - j] for j in range(self.m)] for i in range(self.k)],
            dtype=np.uint8,
        )

    def _windows(self, seeds: np.ndarray) -> np.ndarray:
        """Per-member bit windows: popcount(window_i & x) mod 2 is output bit i."""
        mask = (1 << self.m) - 1
        out = np.zeros((self.k, seeds.size), dtype=np.uint64)
        for i in range(self.k):
            win = (seeds >> np.uint64(i)) & np.uint64(mask)
            rev = np.zeros_like(win)
            for j in range(self.m):
                rev |= ((win >> np.uint64(j)) & np.uint64(1)) << np.uint64(self.m - 1 - j)
            out[i] = rev
        return out

    def output_maps(self, seeds=None) -> np.ndarray:
        """Hash values of every input under each requested member.

        Returns an array of shape (len(seeds), 2^m); ``seeds`` defaults to
        the full family.
        """
        if seeds is None:
            seeds = np.arange(self.size, dtype=np.uint64)
        else:
            seeds = np.asarray(seeds, dtype=np.uint64)
        windows = self._windows(seeds)
        xs = np.arange(self.input_size, dtype=np.uint64)
        fx = np.zeros((seeds.size, self.input_size), dtype=np.int64)
        for i in range(self.k):
            bit = np.bitwise_count(windows[i][:, None] & xs[None, :]) & 1
            fx |= bit.astype(np.int64) << i
        return fx

    def apply(self, seed: int, x: int) -> int:
        windows = self._windows(np.asarray([seed], dtype=np.uint64))
        return int(
            sum(
                ((int(windows[i, 0]) & x).bit_count() & 1) << i
                for i in range(self.k)
            )
        )

    def collision_counts(self) -> np.ndarray:
        """Exhaustive member counts of f(x) == f(x') for every input pair."""
        maps = self.output_maps()
        counts = np.zeros((self.input_size, self.input_size), dtype=np.int64)
        for x in range(self.input_size):
            counts[x] = (maps == maps[:, x : x + 1]).sum(axis=0)
        return counts

    def is_universal(self) -> bool:
        """Exhaustive check of the pairwise 2^-k collision property."""
        counts = self.collision_counts()
        off = ~np.eye(self.input_size, dtype=bool)
        return bool(np.all(counts[off] <= self.size >> self.k))


def _member_distances(family: ToeplitzFamily, table: JointTable, stride: int = 1) -> np.ndarray:
    seeds = np.arange(0, family.size, stride, dtype=np.uint64)
    maps = family.output_maps(seeds)
    out = np.empty(seeds.size)
    for i in range(seeds.size):
        pushed = np.zeros((family.output_size, table.z_size))
        np.add.at(pushed, maps[i], table.weights)
        out[i] = _distance_from_ideal(JointTable(pushed))
    return out


def _check_shape(family: ToeplitzFamily, table: JointTable, work_cap: int) -> int:
    if table.x_size != family.input_size:
        raise ValueError("table x alphabet must have size 2^m")
    work = family.size * table.x_size * table.z_size
    return max(1, -(-work // work_cap))  # ceil division: stride needed to fit


def expected_security_distance(
    family: ToeplitzFamily, table: JointTable, work_cap: int = DEFAULT_WORK_CAP
) -> float:
    """Exact expected security distance over the full family.

    Raises SizeCapError when full enumeration exceeds the work cap;
    the verification entry points subsample instead.
    """
    if _check_shape(family, table, work_cap) > 1:
        raise SizeCapError("full enumeration exceeds the work cap")
    return float(_member_distances(family, table).mean())


def distance_profile(family: ToeplitzFamily, table: JointTable, stride: int = 1) -> dict:
    """Expectation plus the best member (existence argument for key maps)."""
    distances = _member_distances(family, table, stride)
    best = int(np.argmin(distances))
    return {
        "expectation": float(distances.mean()),
        "min_distance": float(distances[best]),
        "min_seed": best * stride,
        "members": int(distances.size),
        "sampled": stride > 1,
    }


def _default_references(table: JointTable) -> dict:
    refs = {"uniform": MarginalTable.uniform(table.z_size)}
    z = table.z_mass()
    if table.total_mass > 0.0:
        refs["marginal"] = MarginalTable(z / z.sum())
    return refs


def verify_leftover_bound(
    family: ToeplitzFamily,
    table: JointTable,
    references: dict | None = None,
    work_cap: int = DEFAULT_WORK_CAP,
) -> dict:
    """Check E[d] <= (1/2) sqrt(|S| e^{-H_2(P|R)}) for each probe reference.

    Exact enumerations must satisfy the bound outright; subsampled runs get
    a three-standard-error allowance and never hard-fail.
    """
    stride = _check_shape(family, table, work_cap)
    distances = _member_distances(family, table, stride)
    expectation = float(distances.mean())
    slack = 0.0
    if stride > 1:
        slack = 3.0 * float(distances.std(ddof=1)) / math.sqrt(distances.size)
    refs = _default_references(table) if references is None else references
    entries = []
    for name, ref in refs.items():
        h2 = float(entropy.collision_entropy(table, ref))
        bound = 0.5 * math.sqrt(family.output_size * math.exp(-h2))
        entries.append(
            {
                "reference": name,
                "expectation": expectation,
                "bound": bound,
                "margin": bound - expectation,
                "pass": expectation <= bound + slack + 1e-12,
            }
        )
    return {
        "check": "leftover_hash",
        "m": family.m,
        "k": family.k,
        "sampled": stride > 1,
        "members": int(distances.size),
        "entries": entries,
        "min_margin": min(e["margin"] for e in entries),
        "pass": all(e["pass"] for e in entries),
    }


def verify_exponential_bound(
    family: ToeplitzFamily,
    table: JointTable,
    rho_grid=(0.1, 0.25, 0.5),
    work_cap: int = DEFAULT_WORK_CAP,
) -> dict:
    """Check E[d] <= (3/2) |S|^rho e^{phi(rho)} across the rho grid."""
    if not table.normalized:
        raise ValueError("the exponential bound is stated for normalized tables")
    stride = _check_shape(family, table, work_cap)
    distances = _member_distances(family, table, stride)
    expectation = float(distances.mean())
    slack = 0.0
    if stride > 1:
        slack = 3.0 * float(distances.std(ddof=1)) / math.sqrt(distances.size)
    entries = []
    for rho in rho_grid:
        phi = float(entropy.security_exponent(rho, table))
        bound = 1.5 * family.output_size ** rho * math.exp(phi)
        entries.append(
            {
                "rho": rho,
                "expectation": expectation,
                "bound": bound,
                "margin": bound - expectation,
                "pass": expectation <= bound + slack + 1e-12,
            }
        )
    return {
        "check": "exponential",
        "m": family.m,
        "k": family.k,
        "sampled": stride > 1,
        "members": int(distances.size),
        "entries": entries,
        "min_margin": min(e["margin"] for e in entries),
        "pass": all(e["pass"] for e in entries),
    }


def random_joint_table(rng: np.random.Generator, x_size: int, z_size: int) -> JointTable:
    """Normalized exponentials of uniform draws; deterministic given the rng."""
    w = -np.log(1.0 - rng.random((x_size, z_size)))
    return JointTable(w / w.sum())


def _serialize_instance(table: JointTable, extra: dict) -> dict:
    payload = {
        "x_size": table.x_size,
        "z_size": table.z_size,
        "weights": [float(v) for v in table.weights.reshape(-1)],
    }
    payload.update(extra)
    return payload


def verify_entropy_inequalities(
    instance_count: int = 200,
    alphabet_cap: int = 8,
    eps_grid=(0.01, 0.1, 0.3),
    zeta_grid=(0.05, 0.1),
    seed: int = 0,
    tol: float = 1e-9,
) -> list[dict]:
    """Property-check the three smoothing inequalities on random instances.

    For each random normalized table (alphabets up to ``alphabet_cap``) and
    random key map f the following must hold at every grid point:

    - hash_monotonicity: smoothing never rises when X is replaced by f(X);
    - clip_smoothing_achievability: the sub-normalized smooth min-entropy at
      radius eps/2 dominates the spectral threshold at eps;
    - smoothing_converse: the normalized smooth min-entropy at eps is capped
      by the spectral threshold at eps + zeta minus log zeta.

    Returns one report per inequality: {lemma, instances, min_slack,
    worst_instance, pass}.
    """
    if alphabet_cap > 8:
        raise ValueError("alphabet_cap must stay at or below 8")
    rng = np.random.default_rng(seed)
    stats = {
        name: {"lemma": name, "instances": 0, "min_slack": math.inf, "worst_instance": None}
        for name in ("hash_monotonicity", "clip_smoothing_achievability", "smoothing_converse")
    }

    def record(name: str, slack: float, instance: dict) -> None:
        entry = stats[name]
        entry["instances"] += 1
        if slack < entry["min_slack"]:
            entry["min_slack"] = slack
            entry["worst_instance"] = instance

    for index in range(instance_count):
        x_size = int(rng.integers(2, alphabet_cap + 1))
        z_size = int(rng.integers(2, alphabet_cap + 1))
        table = random_joint_table(rng, x_size, z_size)
        marginal = table.z_marginal()
        mixed = MarginalTable(
            random_joint_table(rng, 1, z_size).weights[0]
        ).mixed_with_uniform(0.01)
        s_size = int(rng.integers(1, x_size + 1))
        key_map = rng.integers(0, s_size, x_size)
        pushed = push_forward(key_map, table, s_size=s_size)

        for eps in eps_grid:
            for name, ref in (("marginal", marginal), ("mixed", mixed)):
                base = {
                    "index": index,
                    "eps": float(eps),
                    "reference": name,
                    "f": [int(v) for v in key_map],
                }
                smoothed = float(entropy.smooth_min_entropy(table, ref, eps))
                slack = smoothed - float(entropy.smooth_min_entropy(pushed, ref, eps))
                record("hash_monotonicity", slack, _serialize_instance(table, base))
                slack = float(entropy.smooth_min_entropy_sub(table, ref, eps / 2.0)) - float(
                    entropy.spectral_entropy(table, ref, eps)
                )
                record(
                    "clip_smoothing_achievability", slack, _serialize_instance(table, base)
                )
            for zeta in zeta_grid:
                if zeta > 1.0 - eps:
                    continue
                ceiling = float(
                    entropy.spectral_entropy(table, marginal, eps + zeta)
                ) - math.log(zeta)
                slack = ceiling - float(entropy.smooth_min_entropy(table, marginal, eps))
                record(
                    "smoothing_converse",
                    slack,
                    _serialize_instance(table, {"index": index, "eps": float(eps), "zeta": float(zeta)}),
                )

    reports = []
    for entry in stats.values():
        entry["pass"] = entry["min_slack"] >= -tol
        if entry["pass"]:
            entry["worst_instance"] = None
        reports.append(entry)
    return reports
