"""Seeded Monte-Carlo comparison of the PUS and SUS schedules."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..channels import ChannelSpec, transmit
from ..code import SparseCode, build_code, encode, load_code, syndrome
from ..decoder import decode, init_messages
from ..gf import bits_to_symbols, popcount_table, symbols_to_bits
from ..source import MarkovModel, generate, resolve_model
from .config import ExperimentConfig

_MASK64 = (1 << 64) - 1


def mix_seed(base_seed: int, index: int) -> int:
    """SplitMix64 finaliser applied to ``base_seed * golden + index``."""
    x = (base_seed * 0x9E3779B97F4A7C15 + index) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


@dataclass
class TrialRecord:
    trial: int
    seed: int
    iterations: dict[str, int] = field(default_factory=dict)
    converged: dict[str, bool] = field(default_factory=dict)
    bit_errors: dict[str, int] = field(default_factory=dict)
    trajectories: dict[str, list[float]] = field(default_factory=dict)
    same_x_hat: bool | None = None


@dataclass
class ExperimentStats:
    channel: str
    q: int
    source: str
    noise: float
    trials: int
    paired_trials: int
    mean_t_sus: float
    mean_t_pus: float
    ratio_of_means: float
    mean_ratio: float
    std_ratio: float
    ber_sus: float
    ber_pus: float
    nonconv_sus: int
    nonconv_pus: int
    source_bits: int = 0
    agreement: float = math.nan

    CSV_FIELDS = ("channel", "q", "source", "noise", "trials", "paired_trials",
                  "mean_t_sus", "mean_t_pus", "ratio_of_means", "mean_ratio",
                  "std_ratio", "ber_sus", "ber_pus", "nonconv_sus", "nonconv_pus")


@dataclass
class DeltaPBin:
    low: float
    high: float
    mean_dp_pus: float
    mean_dp_sus: float
    ratio: float
    n_pus: int
    n_sus: int


@dataclass
class DeltaPCurve:
    bin_width: float
    min_count: int
    bins: list[DeltaPBin]

    CSV_FIELDS = ("p_bin_low", "p_bin_high", "mean_dp_pus", "mean_dp_sus", "ratio",
                  "n_pus", "n_sus")

    def reported(self) -> list[DeltaPBin]:
        """Bins whose ratio is defined (both schedules have enough samples)."""
        return [b for b in self.bins if not math.isnan(b.ratio)]


class TrialRunner:
    """Everything needed to run trials of one (config, noise level) setting."""

    def __init__(self, config: ExperimentConfig, spec: ChannelSpec, code: SparseCode | None = None):
        self.config = config
        self.spec = spec
        self.code = code if code is not None else make_code(config)
        self.model: MarkovModel = resolve_model(config.source, self.code.q)
        self.pop = popcount_table(self.code.q)

    def run(self, trial: int, keep_trajectories: bool = False) -> TrialRecord:
        cfg, code = self.config, self.code
        m = code.m
        seed = mix_seed(cfg.base_seed, trial)
        rng = np.random.default_rng(seed)
        s = generate(self.model, code.N, rng)
        t = encode(code, s)
        out = transmit(symbols_to_bits(t, m), self.spec, rng)
        r = bits_to_symbols(out.filled_bits, m)
        z = syndrome(code, r)
        x = np.concatenate([s, r ^ t])
        msgs = init_messages(code, out, self.model)
        order = rng.permutation(code.n_vars) if cfg.sus_order == "random" else None

        rec = TrialRecord(trial, seed)
        x_hats = {}
        for sched in cfg.schedule_list:
            kw = {"order": order} if sched == "sus" else {}
            res = decode(sched, code, z, msgs.copy(), cfg.max_iters, x,
                         source_model=self.model, **kw)
            rec.iterations[sched] = res.iterations
            rec.converged[sched] = res.converged
            rec.bit_errors[sched] = int(self.pop[res.x_hat[: code.N] ^ s].sum())
            if keep_trajectories:
                rec.trajectories[sched] = res.correct_source_fraction_per_iter
            x_hats[sched] = res.x_hat
        if len(x_hats) == 2 and all(rec.converged.values()):
            rec.same_x_hat = bool(np.array_equal(x_hats["pus"], x_hats["sus"]))
        return rec


def make_code(config: ExperimentConfig) -> SparseCode:
    if config.code_a is not None:
        code = load_code(config.code_a, config.code_b)
        if code.q != config.q:
            raise ValueError(f"loaded code is over GF({code.q}), config says q={config.q}")
        return code
    return build_code(config.q, config.N, config.rate, config.col_weight, config.seed_for_code)


_worker_runner: TrialRunner | None = None


def _init_worker(config, spec):
    global _worker_runner
    _worker_runner = TrialRunner(config, spec)


def _run_chunk(args):
    trials, keep = args
    return [_worker_runner.run(t, keep) for t in trials]


def run_trials(config: ExperimentConfig, spec: ChannelSpec | None = None,
               keep_trajectories: bool = False, code: SparseCode | None = None) -> list[TrialRecord]:
    """All trials of one noise level, sorted by trial index."""
    spec = spec or config.channel_specs()[0]
    indices = list(range(config.trials))
    if config.workers == 1:
        runner = TrialRunner(config, spec, code)
        return [runner.run(t, keep_trajectories) for t in indices]
    chunks = [(indices[k::config.workers * 4], keep_trajectories)
              for k in range(config.workers * 4)]
    with ProcessPoolExecutor(config.workers, initializer=_init_worker,
                             initargs=(config, spec)) as pool:
        records = [r for chunk in pool.map(_run_chunk, chunks) for r in chunk]
    return sorted(records, key=lambda r: r.trial)


def _mean(xs):
    return float(np.mean(xs)) if len(xs) else math.nan


def summarize(records: list[TrialRecord], config: ExperimentConfig, spec: ChannelSpec,
              source_bits_per_trial: int) -> ExperimentStats:
    """Aggregate trials; iteration statistics use only trials where every
    configured schedule converged."""
    scheds = config.schedule_list
    paired = [r for r in records if all(r.converged[s] for s in scheds)]
    t = {s: [r.iterations[s] for r in paired] for s in scheds}
    mean_t = {s: _mean(t.get(s, [])) for s in ("sus", "pus")}
    if len(scheds) == 2 and paired:
        ratios = np.array(t["sus"], dtype=float) / np.array(t["pus"], dtype=float)
        ratio_of_means = mean_t["sus"] / mean_t["pus"]
        mean_ratio = float(ratios.mean())
        std_ratio = float(ratios.std(ddof=1)) if len(ratios) > 1 else 0.0
        agreement = float(np.mean([r.same_x_hat for r in paired]))
    else:
        ratio_of_means = mean_ratio = std_ratio = agreement = math.nan
    total_bits = len(records) * source_bits_per_trial

    def ber(s):
        if s not in scheds or total_bits == 0:
            return math.nan
        return sum(r.bit_errors[s] for r in records) / total_bits

    def nonconv(s):
        return sum(not r.converged[s] for r in records) if s in scheds else 0

    return ExperimentStats(
        channel=spec.kind, q=config.q, source=config.source, noise=spec.param,
        trials=len(records), paired_trials=len(paired),
        mean_t_sus=mean_t["sus"], mean_t_pus=mean_t["pus"],
        ratio_of_means=ratio_of_means, mean_ratio=mean_ratio, std_ratio=std_ratio,
        ber_sus=ber("sus"), ber_pus=ber("pus"),
        nonconv_sus=nonconv("sus"), nonconv_pus=nonconv("pus"),
        source_bits=source_bits_per_trial, agreement=agreement,
    )


def run_experiment(config: ExperimentConfig, with_records: bool = False):
    """One :class:`ExperimentStats` per configured noise level.

    Returns ``(stats_list, records_by_noise)`` when ``with_records`` is set.
    """
    code = make_code(config) if config.workers == 1 else None
    stats, all_records = [], []
    for spec in config.channel_specs():
        records = run_trials(config, spec, code=code)
        n_bits = (code.N * code.m) if code is not None else config.N * config.m
        stats.append(summarize(records, config, spec, n_bits))
        all_records.append(records)
    return (stats, all_records) if with_records else stats


def dp_curve(records: list[TrialRecord], bin_width: float = 0.02, min_count: int = 30) -> DeltaPCurve:
    """Mean per-iteration gain in correct source bits, binned by current P."""
    n_bins = max(1, round(1.0 / bin_width))
    sums = {s: np.zeros(n_bins) for s in ("pus", "sus")}
    counts = {s: np.zeros(n_bins, dtype=np.int64) for s in ("pus", "sus")}
    for rec in records:
        for sched, traj in rec.trajectories.items():
            if len(traj) < 2:
                continue
            p = np.asarray(traj)
            idx = np.minimum(np.floor(p[:-1] * n_bins + 1e-9).astype(int), n_bins - 1)
            np.add.at(sums[sched], idx, np.diff(p))
            np.add.at(counts[sched], idx, 1)
    bins = []
    for k in range(n_bins):
        n_p, n_s = int(counts["pus"][k]), int(counts["sus"][k])
        if n_p == 0 and n_s == 0:
            continue
        mp = sums["pus"][k] / n_p if n_p else math.nan
        ms = sums["sus"][k] / n_s if n_s else math.nan
        ratio = mp / ms if (n_p >= min_count and n_s >= min_count and ms != 0) else math.nan
        bins.append(DeltaPBin(k * bin_width, min((k + 1) * bin_width, 1.0), mp, ms, ratio, n_p, n_s))
    return DeltaPCurve(bin_width, min_count, bins)


def run_dp_curve(config: ExperimentConfig, bin_width: float | None = None,
                 min_count: int | None = None) -> DeltaPCurve:
    if config.schedules != "both":
        raise ValueError("the delta-P curve needs both schedules")
    records = []
    for spec in config.channel_specs():
        records.extend(run_trials(config, spec, keep_trajectories=True))
    return dp_curve(records,
                    config.bin_width if bin_width is None else bin_width,
                    config.min_bin_count if min_count is None else min_count)


def pus_load(config: ExperimentConfig, noise: float, code: SparseCode | None = None) -> float:
    """Mean PUS iterations with non-convergent trials counted at ``max_iters``."""
    cfg = config.replace(schedules="pus", noise=[noise])
    records = run_trials(cfg, cfg.channel_specs()[0], code=code)
    return float(np.mean([r.iterations["pus"] for r in records]))


def calibrate(config: ExperimentConfig, target: float = 45.0, lo: float | None = None,
              hi: float | None = None, steps: int = 10, log=None) -> float:
    """Bisect the noise level at which PUS needs about ``target`` iterations."""
    default_brackets = {"BSC": (0.01, 0.45), "BEC": (0.05, 0.95), "BIAWGN": (0.3, 3.0)}
    spec_kind = ChannelSpec(config.channel, config.noise[0]).kind
    b_lo, b_hi = default_brackets[spec_kind]
    lo = b_lo if lo is None else lo
    hi = b_hi if hi is None else hi
    code = make_code(config)
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        load = pus_load(config, mid, code)
        if log:
            log(f"noise={mid:.6g} mean PUS iterations={load:.3f}")
        if load < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
