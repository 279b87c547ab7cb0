"""Experiment configuration, seeded sampling, parallel execution, persistence.

Targets are drawn from a counter-based generator keyed by (seed, index,
entry position), so every row of every table is reconstructible from the
manifest and identical across platforms and worker counts.  Each experiment
writes CSV tables with fixed headers plus a JSON manifest; per-sample
failures go to errors.csv without aborting the run.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence

from . import stats as _stats
from .bestapprox import (TargetMatrix, cf_fast_count,
                         enumerate_best_approximations)
from .lattice import (INDETERMINATE, apply_flow, make_unipotent,
                      perturbation_check, random_sl_perturbation)
from .norms import EUCLIDEAN, SUP, ProductNormSpec
from .oracles import definitional_best_approximations
from .orbit import (autocovariance, birkhoff_series, variance_from_autocovariance,
                    verify_correspondence)

__version__ = "0.1.0"

_CALIBRATION_OFFSET = 1_000_000
_ORBIT_OFFSET = 2_000_000


# ---------------------------------------------------------------------------
# Configuration


@dataclass
class ExperimentConfig:
    m: int = 1
    n: int = 1
    norm_m: str = SUP
    norm_n: str = SUP
    scale_m: Fraction = Fraction(1)
    scale_n: Fraction = Fraction(1)
    sign_mode: str = "signed"
    T_grid: tuple[Fraction, ...] = (Fraction(25),)
    samples: int = 100
    seed: int = 20260808
    dyadic_bits: int = 64
    precision: int = 128
    guard_policy: str = "retry"
    s_max: int = 20
    burn_in: int = 10
    perturbation_C: float = 6 * math.e
    M_max: int = 64
    output_dir: str = "out"
    workers: int = 1
    synthetic_mode: str = "none"
    synthetic_sigma0: float = 1.0

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("dims must be positive")
        if self.norm_m not in (SUP, EUCLIDEAN) or self.norm_n not in (SUP, EUCLIDEAN):
            raise ValueError("norm kinds must be 'sup' or 'euclidean'")
        self.scale_m = Fraction(self.scale_m)
        self.scale_n = Fraction(self.scale_n)
        if self.scale_m <= 0 or self.scale_n <= 0:
            raise ValueError("norm scales must be positive")
        if self.sign_mode not in ("signed", "unsigned"):
            raise ValueError("sign_mode must be 'signed' or 'unsigned'")
        self.T_grid = tuple(Fraction(t) for t in self.T_grid)
        if not self.T_grid:
            raise ValueError("T_grid must be nonempty")
        if list(self.T_grid) != sorted(self.T_grid):
            raise ValueError("T_grid must be ascending")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.dyadic_bits < 16:
            raise ValueError("dyadic_bits must be >= 16")
        if self.precision < 32:
            raise ValueError("precision must be >= 32")
        if self.guard_policy not in ("retry", "none"):
            raise ValueError("guard_policy must be 'retry' or 'none'")
        if self.s_max < 0 or self.burn_in < 0:
            raise ValueError("s_max and burn_in must be nonnegative")
        if self.perturbation_C <= 0:
            raise ValueError("perturbation_C must be positive")
        if self.M_max < 1:
            raise ValueError("M_max must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.synthetic_mode not in ("none", "normal", "exponential"):
            raise ValueError("synthetic_mode must be none, normal or exponential")

    def norms(self) -> ProductNormSpec:
        return ProductNormSpec.default(self.m, self.n, self.norm_m, self.norm_n,
                                       self.scale_m, self.scale_n)

    def is_classical_1d(self) -> bool:
        return (self.m == 1 and self.n == 1
                and self.scale_m == 1 and self.scale_n == 1)

    def as_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if f.name == "T_grid":
                v = ", ".join(str(t) for t in v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"


_INT_KEYS = {"m", "n", "samples", "seed", "dyadic_bits", "precision",
             "s_max", "burn_in", "M_max", "workers"}
_FRACTION_KEYS = {"scale_m", "scale_n"}
_FLOAT_KEYS = {"perturbation_C", "synthetic_sigma0"}


def parse_config(text: str, **overrides) -> ExperimentConfig:
    """Parse the line-oriented ``key = value`` format; unknown keys raise."""
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in known:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
        if key in _INT_KEYS:
            values[key] = int(val)
        elif key in _FRACTION_KEYS:
            values[key] = Fraction(val)
        elif key in _FLOAT_KEYS:
            values[key] = float(val)
        elif key == "T_grid":
            values[key] = tuple(Fraction(part.strip()) for part in val.split(",") if part.strip())
        else:
            values[key] = val
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**values)


def load_config(path: Optional[str], **overrides) -> ExperimentConfig:
    if path is None:
        base = {k: v for k, v in overrides.items() if v is not None}
        return ExperimentConfig(**base)
    return parse_config(Path(path).read_text(), **overrides)


# ---------------------------------------------------------------------------
# Seeded sampling


def _dyadic_numerator(seed: int, index: int, i: int, j: int, bits: int) -> int:
    msg = f"{seed}:{index}:{i}:{j}".encode()
    nbytes = (bits + 7) // 8
    digest = hashlib.blake2b(msg, digest_size=nbytes).digest()
    return int.from_bytes(digest, "big") >> (8 * nbytes - bits)


def sample_theta(seed: int, index: int, dims: tuple[int, int], bits: int = 64) -> TargetMatrix:
    """Deterministic dyadic target with entries k / 2**bits, k uniform.

    Entries come from a keyed hash of (seed, index, position), so results do
    not depend on platform, draw order, or worker count.  For growth
    experiments the bit depth must comfortably exceed T * log2(e), or the
    target's own finiteness truncates the count.
    """
    if bits < 16:
        raise ValueError("bits must be >= 16")
    if bits > 512:
        raise ValueError("bits must be <= 512")
    m, n = dims
    den = 1 << bits
    rows = [[Fraction(_dyadic_numerator(seed, index, i, j, bits), den)
             for j in range(n)] for i in range(m)]
    return TargetMatrix(m, n, tuple(tuple(r) for r in rows),
                        provenance=f"dyadic:seed={seed}:index={index}:B={bits}")


def theta_id(seed: int, index: int) -> str:
    return f"s{seed}-{index:06d}"


# ---------------------------------------------------------------------------
# Result persistence


class ResultStore:
    """Directory with CSV tables plus a JSON manifest of the run."""

    def __init__(self, out_dir: str, config: ExperimentConfig, experiment: str):
        self.dir = Path(out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.config = config
        self.experiment = experiment
        self.tables: dict[str, Path] = {}
        self.failures: list[dict] = []
        self.summary: dict = {}
        self._started = time.time()

    def write_csv(self, name: str, header: Sequence[str], rows: Sequence[Sequence]) -> Path:
        path = self.dir / name
        with open(path, "w") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_cell(x) for x in row) + "\n")
        self.tables[name] = path
        return path

    def record_failure(self, **info) -> None:
        self.failures.append(info)

    def finalize(self) -> Path:
        if self.failures:
            self.write_csv("errors.csv", ["theta_id", "task", "error"],
                           [[f.get("theta_id", ""), f.get("task", ""), f.get("error", "")]
                            for f in self.failures])
        manifest = {
            "experiment": self.experiment,
            "version": __version__,
            "config": {f.name: str(getattr(self.config, f.name))
                       for f in dataclasses.fields(self.config)},
            "tables": sorted(self.tables),
            "failure_count": len(self.failures),
            "summary": self.summary,
            "started_unix": self._started,
            "wall_clock_s": round(time.time() - self._started, 3),
        }
        path = self.dir / "manifest.json"
        path.write_text(json.dumps(manifest, indent=2, default=str) + "\n")
        return path


def _cell(x) -> str:
    if x is None:
        return ""
    if x is INDETERMINATE:
        return "indet"
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf"
        return repr(x)
    if isinstance(x, Fraction):
        return repr(float(x))
    return str(x)


def _parallel_map(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=chunk))


# ---------------------------------------------------------------------------
# Counting experiment


def _count_at(theta: TargetMatrix, T: Fraction, config: ExperimentConfig) -> tuple[int, int]:
    """(signed, unsigned) counts at cut-off e**T, by the validated fast path
    when available and by exact enumeration otherwise."""
    if config.is_classical_1d():
        unsigned = cf_fast_count(theta.entries[0][0], T=T, sign_mode="unsigned")
        return 2 * unsigned, unsigned
    seq = enumerate_best_approximations(theta, T=T, norms=config.norms(), sign_mode="signed")
    return seq.count, seq.count // 2


def _lk_worker(args) -> dict:
    config, index = args
    tid = theta_id(config.seed, index)
    theta = sample_theta(config.seed, index, (config.m, config.n), config.dyadic_bits)
    try:
        rows = []
        for T in config.T_grid:
            signed, unsigned = _count_at(theta, T, config)
            rows.append([tid, float(T), signed, unsigned])
        return {"rows": rows}
    except Exception as exc:  # noqa: BLE001 - isolation is the contract
        return {"error": str(exc), "theta_id": tid}


def run_lk(config: ExperimentConfig, out_dir: Optional[str] = None) -> ResultStore:
    """Counting table: one row per (target, T) with signed/unsigned counts."""
    store = ResultStore(out_dir or config.output_dir, config, "lk")
    results = _parallel_map(_lk_worker, [(config, i) for i in range(config.samples)],
                            config.workers)
    rows = []
    for res in results:
        if "error" in res:
            store.record_failure(theta_id=res["theta_id"], task="lk", error=res["error"])
        else:
            rows.extend(res["rows"])
    rows.sort(key=lambda r: (r[0], r[1]))
    store.write_csv("lk.csv", ["theta_id", "T", "N_signed", "N_unsigned"], rows)
    if rows:
        pairs = [(r[1], r[2]) for r in rows]
        gamma_hat, stderr = _stats.estimate_gamma(pairs)
        store.summary["gamma_hat"] = gamma_hat
        store.summary["gamma_stderr"] = stderr
        if (config.m, config.n) != (1, 1) and gamma_hat > 0:
            # reciprocal form of the growth constant used in higher dimensions
            store.summary["L_hat"] = 2.0 / gamma_hat
    store.finalize()
    return store


# ---------------------------------------------------------------------------
# Correspondence experiment


def _correspondence_worker(args) -> dict:
    config, index = args
    tid = theta_id(config.seed, index)
    theta = sample_theta(config.seed, index, (config.m, config.n), config.dyadic_bits)
    T = int(config.T_grid[-1])
    try:
        reports = verify_correspondence(theta, T, config.norms(), config.precision)
        rows = []
        for rep in reports:
            rows.append([tid, rep.M, rep.count_bestapprox,
                         rep.f_value if rep.conclusive else INDETERMINATE,
                         int(rep.match) if rep.conclusive else "",
                         rep.margin])
        return {"rows": rows}
    except Exception as exc:  # noqa: BLE001
        return {"error": str(exc), "theta_id": tid}


def run_correspondence(config: ExperimentConfig, out_dir: Optional[str] = None) -> ResultStore:
    """Shell table comparing best-approximation counts with orbit counts."""
    store = ResultStore(out_dir or config.output_dir, config, "correspondence")
    results = _parallel_map(_correspondence_worker,
                            [(config, i) for i in range(config.samples)], config.workers)
    rows = []
    for res in results:
        if "error" in res:
            store.record_failure(theta_id=res["theta_id"], task="correspondence",
                                 error=res["error"])
        else:
            rows.extend(res["rows"])
    rows.sort(key=lambda r: (r[0], r[1]))
    store.write_csv("shells.csv",
                    ["theta_id", "M", "count_ba", "f_value", "match", "margin"], rows)
    conclusive = [r for r in rows if r[4] != ""]
    matches = [r for r in conclusive if r[4] == 1]
    store.summary["shells_total"] = len(rows)
    store.summary["shells_conclusive"] = len(conclusive)
    store.summary["match_rate"] = (len(matches) / len(conclusive)) if conclusive else math.nan
    store.summary["indeterminate_rate"] = (
        (len(rows) - len(conclusive)) / len(rows) if rows else math.nan)
    store.finalize()
    return store


# ---------------------------------------------------------------------------
# Distribution experiment


def _synthetic_count(config: ExperimentConfig, index: int, T: Fraction) -> float:
    """Injected replacement for the count in pipeline-oracle mode.

    Real-valued on purpose: the injection checks the deviation/normality
    pipeline itself, so it must not add a rounding lattice of its own.  The
    noise comes from an inverse-CDF transform of a hash-derived uniform, so
    its law is exactly the nominal one up to hash uniformity.
    """
    from statistics import NormalDist

    digest = hashlib.blake2b(
        f"synthetic:{config.seed}:{index}:{T}".encode(), digest_size=8).digest()
    u = (int.from_bytes(digest, "big") + 0.5) / 2.0 ** 64
    mean = _stats.GAMMA_1D_SIGNED * float(T)
    if config.synthetic_mode == "normal":
        noise = NormalDist(0.0, config.synthetic_sigma0).inv_cdf(u)
    else:
        noise = (-math.log1p(-u) - 1.0) * config.synthetic_sigma0
    return mean + math.sqrt(float(T)) * noise


def _deviation_worker(args) -> dict:
    config, index, gamma = args
    tid = theta_id(config.seed, index)
    try:
        rows = []
        for T in config.T_grid:
            if config.synthetic_mode != "none":
                signed = _synthetic_count(config, index, T)
            else:
                theta = sample_theta(config.seed, index, (config.m, config.n),
                                     config.dyadic_bits)
                signed, _ = _count_at(theta, T, config)
            dev = (signed - gamma * float(T)) / math.sqrt(float(T))
            rows.append([tid, float(T), signed, dev])
        return {"rows": rows}
    except Exception as exc:  # noqa: BLE001
        return {"error": str(exc), "theta_id": tid}


def _calibration_gamma(config: ExperimentConfig) -> float:
    """Growth rate from a disjoint calibration ensemble (split-sample)."""
    T_cal = config.T_grid[-1]
    pairs = []
    for k in range(config.samples):
        theta = sample_theta(config.seed, _CALIBRATION_OFFSET + k,
                             (config.m, config.n), config.dyadic_bits)
        signed, _ = _count_at(theta, T_cal, config)
        pairs.append((float(T_cal), signed))
    gamma, _ = _stats.estimate_gamma(pairs)
    return gamma


def orbit_bits(config: ExperimentConfig, length: int) -> int:
    """Bit depth for orbit ensembles: a target with B bits exhausts near flow
    time B log 2, after which its orbit degenerates toward the cusp, so the
    depth is floored at (length + 8) log2(e)."""
    return max(config.dyadic_bits, math.ceil((length + 8) * math.log2(math.e)))


def _orbit_worker(args) -> dict:
    config, index = args
    tid = theta_id(config.seed, index)
    length = config.burn_in + config.s_max + 30
    theta = sample_theta(config.seed, index, (config.m, config.n),
                         orbit_bits(config, length))
    try:
        series = birkhoff_series(theta, length, config.norms(), config.precision,
                                 retry_double_precision=config.guard_policy == "retry")
        return {"series": series}
    except Exception as exc:  # noqa: BLE001
        return {"error": str(exc), "theta_id": tid}


def run_clt(config: ExperimentConfig, out_dir: Optional[str] = None,
            orbit_samples: Optional[int] = None,
            gamma_mode: str = "auto") -> ResultStore:
    """Deviation ensemble, normality battery, lag autocovariance table.

    The centering growth rate is the known 1d constant in the classical
    configuration and a split-sample estimate otherwise (``gamma_mode`` can
    force ``known``/``split``).  The summary row is only emitted with at
    least 500 samples; partial tables are always written.  The orbit-based
    autocovariance table is skipped in synthetic-injection mode, where the
    injected noise has no orbit counterpart.
    """
    store = ResultStore(out_dir or config.output_dir, config, "clt")
    if gamma_mode == "auto":
        gamma_mode = "known" if (config.is_classical_1d() or config.synthetic_mode != "none") \
            else "split"
    if gamma_mode == "known":
        gamma = _stats.GAMMA_1D_SIGNED
    elif gamma_mode == "split":
        gamma = _calibration_gamma(config)
    else:
        raise ValueError("gamma_mode must be auto, known or split")
    store.summary["gamma_mode"] = gamma_mode
    store.summary["gamma_centering"] = gamma

    results = _parallel_map(_deviation_worker,
                            [(config, i, gamma) for i in range(config.samples)],
                            config.workers)
    dev_rows = []
    for res in results:
        if "error" in res:
            store.record_failure(theta_id=res["theta_id"], task="clt", error=res["error"])
        else:
            dev_rows.extend(res["rows"])
    dev_rows.sort(key=lambda r: (r[0], r[1]))
    store.write_csv("deviations.csv", ["theta_id", "T", "N_signed", "deviation"], dev_rows)

    T_star = float(config.T_grid[-1])
    deviations = [r[3] for r in dev_rows if r[1] == T_star]

    xi_estimates = None
    if config.synthetic_mode == "none":
        count = orbit_samples if orbit_samples is not None else min(config.samples, 500)
        orbit_results = _parallel_map(_orbit_worker,
                                      [(config, _ORBIT_OFFSET + k) for k in range(count)],
                                      config.workers)
        ensemble = []
        for res in orbit_results:
            if "error" in res:
                store.record_failure(theta_id=res["theta_id"], task="orbit",
                                     error=res["error"])
            else:
                ensemble.append(res["series"])
        if ensemble:
            xi_estimates = autocovariance(ensemble, config.s_max, config.burn_in)
            store.write_csv("xi.csv", ["s", "xi_hat", "stderr", "n_pairs"],
                            [[e.s, e.xi_hat, e.stderr, e.sample_count] for e in xi_estimates])
            indet = sum(s.indeterminate_count for s in ensemble)
            total = sum(s.N for s in ensemble)
            store.summary["orbit_indeterminate_rate"] = indet / total if total else math.nan

    if len(deviations) >= 500:
        report = _stats.clt_suite(deviations, seed=config.seed)
        ratio = math.nan
        if xi_estimates is not None:
            two_sided = variance_from_autocovariance(xi_estimates)
            if two_sided > 0:
                ratio = report.sigma_hat ** 2 / two_sided
        store.write_csv("clt_summary.csv",
                        ["sigma_hat", "ks_D", "ks_p", "cum3", "cum4",
                         "var_consistency_ratio"],
                        [[report.sigma_hat, report.ks_D, report.ks_p,
                          report.cum3.estimate, report.cum4.estimate, ratio]])
        store.write_csv("cumulants.csv", ["r", "estimate", "ci_lo", "ci_hi", "resamples"],
                        [[c.r, c.estimate, c.ci_lo, c.ci_hi, c.resamples]
                         for c in (report.cum3, report.cum4)])
        store.summary["sigma_hat"] = report.sigma_hat
        store.summary["ks_D"] = report.ks_D
        store.summary["ks_p"] = report.ks_p
        store.summary["var_consistency_ratio"] = ratio
    store.finalize()
    return store


# ---------------------------------------------------------------------------
# Verification suite


def _verify_checks(config: ExperimentConfig, corrupt_f: bool) -> list[tuple[str, bool, str]]:
    import random

    from .norms import NormSpec, NormValue, enumerate_shells

    rng = random.Random(config.seed)
    checks: list[tuple[str, bool, str]] = []

    # Shell enumeration against a direct grid scan.
    ok, detail = True, ""
    for trial in range(6):
        dim = rng.randint(1, 3)
        kind = rng.choice([SUP, EUCLIDEAN])
        bound = rng.randint(1, 6)
        spec = NormSpec(kind, dim)
        bound_value = NormValue(kind, Fraction(bound if kind == SUP else bound * bound))
        shells = enumerate_shells(spec, bound_value)
        got = sorted(v for _, vs in shells for v in vs)
        want = []
        for v in _grid(dim, bound):
            from .norms import norm_eval
            if norm_eval([Fraction(c) for c in v], spec).raw <= bound_value.raw:
                want.append(v)
        if got != sorted(want):
            ok, detail = False, f"shell mismatch dim={dim} kind={kind} bound={bound}"
            break
    checks.append(("shell_completeness", ok, detail))

    # Production enumeration against the definitional oracle.
    ok, detail = True, ""
    for trial in range(8):
        m = rng.randint(1, 2)
        n = rng.randint(1, 2)
        theta = sample_theta(config.seed + 17, trial, (m, n), 24)
        qmax = Fraction(rng.randint(5, 20))
        norms = ProductNormSpec.default(m, n)
        got = sorted((r.p, r.q) for r in
                     enumerate_best_approximations(theta, qmax=qmax, norms=norms,
                                                   sign_mode="signed").records)
        want = definitional_best_approximations(theta, qmax, norms, "signed")
        if got != want:
            ok, detail = False, f"oracle mismatch at dims ({m},{n}) trial {trial} qmax {qmax}"
            break
    checks.append(("definitional_oracle", ok, detail))

    # Fast path against exact enumeration.
    ok, detail = True, ""
    for trial in range(20):
        den = rng.randint(2, 4000)
        num = rng.randint(0, den - 1)
        theta = TargetMatrix.scalar(Fraction(num, den))
        qmax = Fraction(rng.randint(1, 300))
        fast = cf_fast_count(Fraction(num, den), qmax=qmax, sign_mode="signed")
        exact = enumerate_best_approximations(theta, qmax=qmax, sign_mode="signed").count
        if fast != exact:
            ok, detail = False, f"cf fast count {fast} != {exact} at theta={num}/{den} qmax={qmax}"
            break
    checks.append(("cf_fast_path", ok, detail))

    # Exact correspondence, with the optional corruption hook as a negative control.
    ok, detail = True, ""
    observed_max = 0
    for trial in range(4):
        dims = [(1, 1), (2, 1)][trial % 2]
        theta = sample_theta(config.seed + 23, trial, dims, config.dyadic_bits)
        reports = verify_correspondence(theta, 5, ProductNormSpec.default(*dims),
                                        config.precision)
        for rep in reports:
            if not rep.conclusive:
                continue
            f_val = rep.f_value + (2 if corrupt_f else 0)
            observed_max = max(observed_max, f_val)
            if f_val != rep.count_bestapprox:
                ok = False
                detail = (f"shell mismatch dims={dims} trial={trial} M={rep.M}: "
                          f"count={rep.count_bestapprox} f={f_val} margin={rep.margin}")
                break
        if not ok:
            break
    checks.append(("correspondence_exact", ok, detail))

    # Evenness and boundedness of conclusive window counts.
    ok = True
    detail = f"observed_max={observed_max}"
    if observed_max % 2 or observed_max < 0 or observed_max > config.M_max:
        ok, detail = False, f"window count {observed_max} violates parity/bounds"
    checks.append(("f_even_bounded", ok, detail))

    # Perturbation inequality on random orbit lattices.
    ok, detail = True, ""
    holds, inconclusive = 0, 0
    for trial in range(12):
        theta = sample_theta(config.seed + 31, trial, (1, 1), config.dyadic_bits)
        t = rng.randint(0, 8)
        L = apply_flow(make_unipotent(theta, precision=config.precision), t)
        g = random_sl_perturbation(2, 1e-3, rng)
        rep = perturbation_check(L, g, 1e-3, config.perturbation_C)
        if rep.holds is None:
            inconclusive += 1
        elif rep.holds:
            holds += 1
        else:
            ok, detail = False, f"violation at trial {trial}: lhs={rep.lhs} rhs={rep.rhs}"
            break
    if ok:
        detail = f"holds={holds} inconclusive={inconclusive}"
    checks.append(("perturbation_inequality", ok, detail))

    # Sampler determinism.
    a = sample_theta(config.seed, 0, (2, 2), config.dyadic_bits)
    b = sample_theta(config.seed, 0, (2, 2), config.dyadic_bits)
    c = sample_theta(config.seed, 1, (2, 2), config.dyadic_bits)
    ok = a.entries == b.entries and a.entries != c.entries
    checks.append(("sampler_determinism", ok, "" if ok else "sampler not reproducible"))

    return checks


def _grid(dim: int, radius: int):
    import itertools

    for v in itertools.product(range(-radius, radius + 1), repeat=dim):
        if any(v):
            yield v


def run_verify(config: ExperimentConfig, out_dir: Optional[str] = None,
               corrupt_f: bool = False) -> tuple[int, ResultStore]:
    """Cross-checks of every exact identity at desk scale.

    Returns (exit_status, store); any hard failure gives a nonzero status
    with the failing case recorded in verify.csv.
    """
    store = ResultStore(out_dir or config.output_dir, config, "verify")
    checks = _verify_checks(config, corrupt_f)
    rows = [[name, "PASS" if ok else "FAIL", detail] for name, ok, detail in checks]
    store.write_csv("verify.csv", ["check", "status", "detail"], rows)
    failed = [name for name, ok, _ in checks if not ok]
    store.summary["failed"] = failed
    store.finalize()
    return (1 if failed else 0), store
