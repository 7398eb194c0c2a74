"""Command-line front end: parameter sweeps, single-shot bounds, verification.

Sweeps emit CSV with a fixed column order and are byte-for-byte
deterministic for a given spec.  Exit codes: 0 success, 1 verification
failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import hashing
from .bounds import (
    LN2,
    BoundParams,
    exponential_lower_bound,
    gaussian_approximation,
    hybrid_lower_bound,
    spectral_lower_bound,
    spectral_upper_bound,
)
from .numeric import binomial_model, log_binomial_cdf, normal_cdf, normal_quantile
from .tables import BscSource, clip_below

CSV_HEADER = "n,eps,q,eta,zeta,ell_s_low,ell_e_low,ell_h_low,ell_s_up,gauss,theta_star_e,theta_star_h"


@dataclass
class SweepSpec:
    """Resolved sweep parameters; grids are explicit tuples."""

    mode: str
    q: float = 0.11
    eps: float = 1e-10
    n: int = 1000
    eps_grid: tuple | None = None
    n_grid: tuple | None = None
    eta_frac: float = 0.5
    zeta_frac: float = 0.5
    units: str = "bits"
    clamp: bool = False
    out: str | None = None
    seed: int = 42
    level: str = "quick"

    def __post_init__(self):
        if self.units not in ("bits", "nats"):
            raise ValueError("units must be 'bits' or 'nats'")
        if not 0.0 < self.eta_frac <= 1.0 or not 0.0 < self.zeta_frac <= 1.0:
            raise ValueError("eta/zeta fractions must lie in (0, 1]")


def log_spaced_ints(start: int, stop: int, count: int) -> tuple:
    """Log-spaced integer grid, deduplicated after rounding, order kept."""
    if count < 1 or start < 1 or stop < start:
        raise ValueError("invalid n grid")
    raw = np.geomspace(start, stop, count)
    grid, seen = [], set()
    for v in raw:
        n = int(round(v))
        if n not in seen:
            seen.add(n)
            grid.append(n)
    return tuple(grid)


def log_spaced_floats(start: float, stop: float, count: int) -> tuple:
    if count < 1 or start <= 0 or stop < start:
        raise ValueError("invalid eps grid")
    return tuple(float(v) for v in np.geomspace(start, stop, count))


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _row(spec: SweepSpec, n: int, eps: float) -> str:
    eta = spec.eta_frac * eps
    zeta = spec.zeta_frac * eps
    if zeta > 1.0 - eps or eta > eps:
        return f"# skipped n={n} eps={_fmt(eps)}: eta/zeta rule leaves the valid range"
    params = BoundParams(eps, BscSource(spec.q, n), eta=eta, zeta=zeta)
    s_low = spectral_lower_bound(params)
    e_low = exponential_lower_bound(params)
    h_low = hybrid_lower_bound(params)
    s_up = spectral_upper_bound(params)
    gauss = gaussian_approximation(params)
    conv = 1.0 / LN2 if spec.units == "bits" else 1.0
    values = [r.value_nats * conv for r in (s_low, e_low, h_low, s_up, gauss)]
    if spec.clamp:
        values = [max(0.0, v) for v in values]
    cells = [str(n), _fmt(eps), _fmt(spec.q), _fmt(eta), _fmt(zeta)]
    cells += [_fmt(v) for v in values]
    cells += [_fmt(e_low.theta_star), _fmt(h_low.theta_star)]
    return ",".join(cells)


def run_sweep_n(spec: SweepSpec, stream) -> int:
    """One CSV row per block length at fixed eps."""
    if not spec.n_grid:
        raise ValueError("sweep-n requires an n grid")
    stream.write(CSV_HEADER + "\n")
    for n in spec.n_grid:
        stream.write(_row(spec, n, spec.eps) + "\n")
    return 0


def run_sweep_eps(spec: SweepSpec, stream) -> int:
    """One CSV row per security parameter at fixed block length."""
    if not spec.eps_grid:
        raise ValueError("sweep-eps requires an eps grid")
    stream.write(CSV_HEADER + "\n")
    for eps in spec.eps_grid:
        stream.write(_row(spec, spec.n, eps) + "\n")
    return 0


def run_bound(spec: SweepSpec, stream) -> int:
    """Single-shot evaluation of every bound at (q, n, eps), as JSON."""
    eta = spec.eta_frac * spec.eps
    zeta = spec.zeta_frac * spec.eps
    if zeta > 1.0 - spec.eps or eta > spec.eps:
        raise ValueError("eta/zeta rule leaves the valid range at this eps")
    params = BoundParams(spec.eps, BscSource(spec.q, spec.n), eta=eta, zeta=zeta)
    results = {
        "ell_s_low": spectral_lower_bound(params),
        "ell_e_low": exponential_lower_bound(params),
        "ell_h_low": hybrid_lower_bound(params),
        "ell_s_up": spectral_upper_bound(params),
        "gauss": gaussian_approximation(params),
    }
    conv = 1.0 / LN2 if spec.units == "bits" else 1.0
    payload = {
        "q": spec.q,
        "n": spec.n,
        "eps": spec.eps,
        "eta": eta,
        "zeta": zeta,
        "units": spec.units,
        "bounds": {},
    }
    for name, res in results.items():
        value = res.value_nats * conv
        if spec.clamp:
            value = max(0.0, value)
        payload["bounds"][name] = {
            "value": value,
            "theta_star": res.theta_star,
            "k_star": res.k_star,
            "components_nats": res.components,
        }
    stream.write(json.dumps(payload, indent=2) + "\n")
    return 0


def _binomial_cdf_fraction(n: int, q: float, k: int) -> Fraction:
    """Exact rational CDF at the binary-float value of q."""
    qf = Fraction(q)
    total = Fraction(0)
    for j in range(k + 1):
        total += math.comb(n, j) * qf ** j * (1 - qf) ** (n - j)
    return total


def _rational_binomial_check(n_values, q_values, rel_tol=1e-12) -> dict:
    worst = 0.0
    count = 0
    for n in n_values:
        for q in q_values:
            model = binomial_model(n, q)
            for k in range(0, n):
                exact = float(_binomial_cdf_fraction(n, q, k))
                got = math.exp(log_binomial_cdf(model, k))
                worst = max(worst, abs(got - exact) / exact)
                count += 1
    return {
        "check": "binomial_rational_oracle",
        "instances": count,
        "max_rel_error": worst,
        "pass": worst <= rel_tol,
    }


def _quantile_bisection_check() -> dict:
    p = 1e-10
    lo, hi = -40.0, 0.0
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if normal_cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    reference = 0.5 * (lo + hi)
    value = normal_quantile(p)
    return {
        "check": "normal_quantile_bisection",
        "value": value,
        "reference": reference,
        "pass": abs(value - reference) <= 1e-9 and abs(value + 6.3613) <= 1e-3,
    }


def run_verify(seed: int = 42, level: str = "quick", stream=None) -> int:
    """Aggregate the proven-inequality suite; exit 0 iff everything passes."""
    if level not in ("quick", "full"):
        raise ValueError("level must be 'quick' or 'full'")
    full = level == "full"
    rng = np.random.default_rng(seed)
    checks = []

    toeplitz_ms = range(1, 9) if full else range(1, 5)
    for m in toeplitz_ms:
        for k in (1, min(3, m)) if full else (1,):
            family = hashing.ToeplitzFamily(m, k)
            checks.append(
                {
                    "check": "toeplitz_universality",
                    "m": m,
                    "k": k,
                    "pass": family.is_universal(),
                }
            )

    bsc_lengths = range(1, 5) if full else range(1, 3)
    k_values = (1, 2, 3) if full else (1, 2)
    for n in bsc_lengths:
        table = BscSource(0.25, n).product_table()
        family_ks = [k for k in k_values if k <= n] or [1]
        for k in family_ks:
            family = hashing.ToeplitzFamily(n, k)
            checks.append(hashing.verify_leftover_bound(family, table))
            checks.append(hashing.verify_exponential_bound(family, table))
            clipped = clip_below(
                table, table.z_marginal(), float(np.log(2.0)) * n / 2.0
            )
            if clipped.total_mass > 0.0:
                checks.append(hashing.verify_leftover_bound(family, clipped))

    random_ms = range(2, 7) if full else range(2, 5)
    per_m = 3 if full else 1
    for m in random_ms:
        for _ in range(per_m):
            z_size = int(rng.integers(2, 9))
            table = hashing.random_joint_table(rng, 2 ** m, z_size)
            refs = {
                "marginal": table.z_marginal(),
                "uniform": hashing.MarginalTable.uniform(z_size),
                "random": hashing.MarginalTable(
                    hashing.random_joint_table(rng, 1, z_size).weights[0]
                ).mixed_with_uniform(0.01),
            }
            for k in k_values:
                family = hashing.ToeplitzFamily(m, k)
                checks.append(hashing.verify_leftover_bound(family, table, refs))
                checks.append(hashing.verify_exponential_bound(family, table))

    instance_count = 200 if full else 50
    checks.extend(
        hashing.verify_entropy_inequalities(
            instance_count=instance_count, alphabet_cap=8, seed=seed
        )
    )

    n_values = range(1, 31) if full else (5, 10, 12)
    checks.append(_rational_binomial_check(n_values, (0.11, 0.25, 0.5)))
    checks.append(_quantile_bisection_check())

    passed = all(c["pass"] for c in checks)
    report = {"level": level, "seed": seed, "pass": passed, "checks": checks}
    if stream is None:
        stream = sys.stdout
    stream.write(json.dumps(report, indent=2, default=float) + "\n")
    return 0 if passed else 1


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def _merge(args: argparse.Namespace, config: dict, key: str, default):
    value = getattr(args, key.replace("-", "_"), None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--q", type=float, default=None, help="BSC crossover probability")
    parser.add_argument("--eps", type=float, default=None, help="security parameter")
    parser.add_argument("--n", type=int, default=None, help="block length")
    parser.add_argument("--eps-from", type=float, default=None)
    parser.add_argument("--eps-to", type=float, default=None)
    parser.add_argument("--eps-count", type=int, default=None)
    parser.add_argument("--n-from", type=int, default=None)
    parser.add_argument("--n-to", type=int, default=None)
    parser.add_argument("--n-count", type=int, default=None)
    parser.add_argument("--eta-frac", type=float, default=None, help="eta as a fraction of eps")
    parser.add_argument("--zeta-frac", type=float, default=None, help="zeta as a fraction of eps")
    parser.add_argument("--units", choices=("bits", "nats"), default=None)
    parser.add_argument("--clamp", action="store_true", default=None, help="clamp displayed values at zero")
    parser.add_argument("--out", default=None, help="output path (default: stdout)")
    parser.add_argument("--config", default=None, help="JSON file mirroring the sweep spec; flags override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pabounds",
        description="Finite-blocklength privacy-amplification key-length bounds",
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode, text in (
        ("sweep-n", "sweep the block length at fixed eps"),
        ("sweep-eps", "sweep the security parameter at fixed block length"),
        ("bound", "evaluate every bound at one parameter point"),
    ):
        _add_common(sub.add_parser(mode, help=text))
    verify = sub.add_parser("verify", help="run the proven-inequality verification suite")
    verify.add_argument("--seed", type=int, default=None)
    verify.add_argument("--level", choices=("quick", "full"), default=None)
    verify.add_argument("--out", default=None)
    verify.add_argument("--config", default=None)
    return parser


def _spec_from_args(args: argparse.Namespace) -> SweepSpec:
    config = _load_config(args.config)
    spec = SweepSpec(
        mode=args.mode,
        q=float(_merge(args, config, "q", 0.11)),
        eps=float(_merge(args, config, "eps", 1e-10)),
        n=int(_merge(args, config, "n", 1000)),
        eta_frac=float(_merge(args, config, "eta-frac", 0.5)),
        zeta_frac=float(_merge(args, config, "zeta-frac", 0.5)),
        units=_merge(args, config, "units", "bits"),
        clamp=bool(_merge(args, config, "clamp", False)),
        out=_merge(args, config, "out", None),
        seed=int(_merge(args, config, "seed", 42)),
        level=_merge(args, config, "level", "quick"),
    )
    n_from = _merge(args, config, "n-from", None)
    if n_from is not None:
        spec.n_grid = log_spaced_ints(
            int(n_from),
            int(_merge(args, config, "n-to", n_from)),
            int(_merge(args, config, "n-count", 1)),
        )
    eps_from = _merge(args, config, "eps-from", None)
    if eps_from is not None:
        spec.eps_grid = log_spaced_floats(
            float(eps_from),
            float(_merge(args, config, "eps-to", eps_from)),
            int(_merge(args, config, "eps-count", 1)),
        )
    return spec


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.mode == "verify":
            config = _load_config(args.config)
            seed = int(_merge(args, config, "seed", 42))
            level = _merge(args, config, "level", "quick")
            out = _merge(args, config, "out", None)
            if out:
                with open(out, "w", encoding="utf-8") as handle:
                    return run_verify(seed=seed, level=level, stream=handle)
            return run_verify(seed=seed, level=level)
        spec = _spec_from_args(args)
        runner = {
            "sweep-n": run_sweep_n,
            "sweep-eps": run_sweep_eps,
            "bound": run_bound,
        }[args.mode]
        if spec.out:
            with open(spec.out, "w", encoding="utf-8") as handle:
                return runner(spec, handle)
        return runner(spec, sys.stdout)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
