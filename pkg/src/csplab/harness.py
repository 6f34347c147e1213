"""Monte Carlo experiment runner: trials, sweeps, CSV emission.

A run is fully determined by its JSON config plus the master seed.  Per-trial
randomness comes from streams derived as (master_seed, packed id) where the
packed id encodes (sweep point, trial, channel); trials are therefore
independent, order-insensitive, and reproducible, and repeated runs emit
byte-identical CSV (timings are recorded as zero unless explicitly enabled,
since real wall times would break that guarantee).

Regimes:
  weak   -- fresh measurement matrix per trial, one random test signal;
  strong -- per trial, one fresh matrix shared by a fixed panel of signals
            (all codewords when the codebook is small enough, plus cell-corner
            stress points and class samples); the record keeps the panel max;
  analog -- fresh Wiener ensemble per trial, function-valued signals.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import rng as _rng
from .bounds import BoundInputs, evaluate_bound
from .codecs import Codec, PiecewisePolyCodec, ceil_snap, codec_from_config
from .measurement import (NoiseModel, apply_noise, measure, measure_analog,
                          sample_ensemble, sample_wiener_ensemble)
from .solver import csp_recover, csp_recover_analog, csp_recover_panel

# stream id packing: (point, trial, channel) -> one 64-bit id
_POINT_BITS, _TRIAL_BITS, _CHANNEL_BITS = 16, 28, 16
CH_ENSEMBLE, CH_SIGNAL, CH_NOISE, CH_PANEL = 0, 1, 2, 3
CH_WIENER_BASE = 16  # analog paths use channels [16, 16 + d)


def stream_id(point: int, trial: int, channel: int) -> int:
    if not (0 <= point < 2**_POINT_BITS and 0 <= trial < 2**_TRIAL_BITS
            and 0 <= channel < 2**_CHANNEL_BITS):
        raise ValueError(f"stream id components out of range: {point},{trial},{channel}")
    return (point << (_TRIAL_BITS + _CHANNEL_BITS)) | (trial << _CHANNEL_BITS) | channel


# theorem ids admissible per (regime, noise kind); the analog noiseless and
# bounded-noise guarantees share the weak finite-dimensional formulas
_COMPATIBLE = {
    ("weak", "none"): {"T3", "C4"},
    ("weak", "bounded"): {"T5", "C6"},
    ("weak", "gaussian"): {"T6", "T7"},
    ("strong", "none"): {"T8", "C9"},
    ("strong", "bounded"): {"T9", "C11"},
    ("strong", "gaussian"): {"T10", "T11"},
    ("analog", "none"): {"T3"},
    ("analog", "bounded"): {"T5"},
}

_AXES = ("d", "delta", "sigma", "zeta")


@dataclass
class ExperimentConfig:
    """One experiment: codec descriptor, regime, noise, measurement count (or
    oversampling factor eta for the budget rule), trial count, master seed,
    and an optional guarantee to compare against."""

    codec: dict
    regime: str = "weak"
    noise: dict = field(default_factory=lambda: {"kind": "none"})
    d: int | None = None
    eta: float | None = None
    trials: int = 1
    master_seed: int = 0
    theorem_id: str | None = None
    bound_params: dict = field(default_factory=dict)
    signal_source: str = "class"
    panel_size: int = 200
    axis: dict | None = None
    threads: int = 1
    block_size: int = 4096
    record_timings: bool = False

    def __post_init__(self):
        if self.regime not in ("weak", "strong", "analog"):
            raise ValueError(f"unknown regime {self.regime!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.signal_source not in ("class", "codebook"):
            raise ValueError(f"unknown signal_source {self.signal_source!r}")
        if self.d is None and self.eta is None:
            raise ValueError("set either d or the budget factor eta")
        self.noise_model()  # validates the noise block
        if self.axis is not None:
            extra = set(self.axis) - {"name", "values"}
            if extra:
                raise ValueError(f"unknown axis keys: {sorted(extra)}")
            if self.axis.get("name") not in _AXES:
                raise ValueError(f"axis name must be one of {_AXES}")
            if not self.axis.get("values"):
                raise ValueError("axis values must be nonempty")
        if self.theorem_id is not None:
            allowed = _COMPATIBLE.get((self.regime, self.noise["kind"]), set())
            if self.theorem_id not in allowed:
                raise ValueError(
                    f"theorem {self.theorem_id} incompatible with regime="
                    f"{self.regime}, noise={self.noise['kind']}; "
                    f"allowed: {sorted(allowed)}"
                )
        bad = set(self.bound_params) - {f.name for f in fields(BoundInputs)}
        if bad:
            raise ValueError(f"unknown bound_params keys: {sorted(bad)}")

    def noise_model(self) -> NoiseModel:
        block = dict(self.noise)
        kind = block.pop("kind", "none")
        if kind == "none":
            extra = set(block)
        elif kind == "bounded":
            extra = set(block) - {"zeta", "shape"}
        elif kind == "gaussian":
            extra = set(block) - {"sigma"}
        else:
            raise ValueError(f"unknown noise kind {kind!r}")
        if extra:
            raise ValueError(f"unknown noise keys: {sorted(extra)}")
        if kind == "bounded":
            return NoiseModel.bounded(block.get("zeta", 0.0),
                                      block.get("shape", "random_direction"))
        if kind == "gaussian":
            return NoiseModel.gaussian(block.get("sigma", 0.0))
        return NoiseModel.none()

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        extra = set(raw) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**raw)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass
class TrialRecord:
    """One Monte Carlo trial, mirroring one CSV row."""

    trial: int
    axis_value: float | None
    ensemble_seed: int
    signal_seed: int
    n: int
    d: int
    rate_bits: float
    delta: float
    noise_kind: str
    noise_level: float
    error_l2: float
    residual: float
    bound_error: float | None
    bound_fail_prob: float | None
    within_bound: bool | None
    wall_ms: float
    signal_desc: str = ""


@dataclass
class SweepPoint:
    axis_value: float
    exceed_rate: float | None
    mean_error: float
    max_error: float
    bound_error: float | None
    bound_fail_prob: float | None


@dataclass
class SweepResult:
    axis_name: str
    points: list
    records: list
    master_seed: int


def _resolve_d(config: ExperimentConfig, codec: Codec) -> int:
    if config.d is not None:
        if config.d < 1:
            raise ValueError("d must be >= 1")
        return int(config.d)
    if not 0 < codec.delta < 1 / math.e:
        raise ValueError("the eta budget rule needs delta in (0, 1/e)")
    mult = 2.0 if config.regime == "strong" else 1.0
    denom = math.log2(1.0 / (math.e * codec.delta))
    return max(1, ceil_snap(mult * config.eta * codec.rate_bits / denom))


def _signal_dim(config: ExperimentConfig, codec: Codec) -> int:
    return codec.grid if config.regime == "analog" else codec.n


def _bound_for(config: ExperimentConfig, codec: Codec, d: int, n: int):
    if config.theorem_id is None:
        return None
    model = config.noise_model()
    # bound_params may override any derived field (e.g. a hand-set sigma)
    kwargs = dict(r=codec.rate_bits, delta=codec.delta, d=d, n=n,
                  sigma=model.sigma, zeta=model.zeta)
    kwargs.update(config.bound_params)
    return evaluate_bound(config.theorem_id, BoundInputs(**kwargs))


def _draw_signal(config: ExperimentConfig, codec: Codec, stream):
    if config.signal_source == "codebook":
        idx = int(stream.generator.integers(0, codec.size))
        return codec.decode(idx), f"codeword[{idx}]"
    return codec.sample_member(stream.generator), "class-sample"


def _worst_direction(codec: Codec, ensemble, x) -> np.ndarray | None:
    """Direction of A(x - decode(encode(x))): the measured quantization
    residual, the stress stand-in for noise aligned against recovery."""
    xt = codec.decode(codec.encode(x))
    u = ensemble.matrix @ (np.asarray(x) - xt)
    nrm = float(np.linalg.norm(u))
    return u if nrm > 1e-15 else None


def _apply_trial_noise(y, model: NoiseModel, noise_stream, direction):
    if model.kind == "bounded" and model.shape == "worst_aligned":
        if direction is None:
            # signal sits on a codeword: any direction is an admissible
            # adversary, fall back to a random one
            return apply_noise(y, NoiseModel.bounded(model.zeta), noise_stream)
        return apply_noise(y, model, noise_stream, context=direction)
    return apply_noise(y, model, noise_stream)


def build_panel(codec: Codec, size: int, stream) -> list:
    """Deterministic strong-regime test panel: every in-class codeword when
    they all fit, otherwise evenly spaced ones for a quarter of the panel;
    then Voronoi cell-corner stress points; class samples fill the rest.
    Codewords the construction leaves outside the class are skipped (the
    uniform guarantee only quantifies over class members)."""
    members: list = []
    descs: list[str] = []
    if codec.size <= size:
        cw_ids = range(codec.size)
    else:
        quarter = max(size // 4, 1)
        step = codec.size // quarter
        cw_ids = range(0, codec.size, step)
    for i in cw_ids:
        if len(members) >= size:
            break
        cw = codec.decode(i)
        if codec.is_member(cw):
            members.append(cw)
            descs.append(f"codeword[{i}]")
    for i in cw_ids:
        if len(members) >= size:
            break
        stress = codec.stress_member(i)
        if stress is not None:
            members.append(stress)
            descs.append(f"cell-corner[{i}]")
    while len(members) < size:
        members.append(codec.sample_member(stream.generator))
        descs.append("class-sample")
    return list(zip(members[:size], descs[:size]))


def run_trial(config: ExperimentConfig, trial_index: int, point: int = 0,
              codec: Codec | None = None, axis_value: float | None = None) -> TrialRecord:
    """Run one trial (one ensemble draw).  In the strong regime the trial
    evaluates the whole signal panel against its one matrix and records the
    panel maximum error."""
    if codec is None:
        codec = codec_from_config(config.codec)
    if isinstance(codec, PiecewisePolyCodec) != (config.regime == "analog"):
        if config.regime == "analog":
            raise ValueError("analog regime needs a ppoly codec")
        raise ValueError(
            f"the {config.regime} regime needs a finite-dimensional codec"
        )
    d = _resolve_d(config, codec)
    n = _signal_dim(config, codec)
    bound = _bound_for(config, codec, d, n)
    model = config.noise_model()
    seed = config.master_seed

    ens_sid = stream_id(point, trial_index, CH_ENSEMBLE)
    sig_sid = stream_id(point, trial_index, CH_SIGNAL)
    noise_stream = _rng.derive_stream(seed, stream_id(point, trial_index, CH_NOISE))

    if config.regime == "analog":
        wiener_base = stream_id(point, trial_index, CH_WIENER_BASE)
        ensemble = sample_wiener_ensemble(d, codec.grid, seed, wiener_base)
        f, desc = _draw_signal(config, codec, _rng.derive_stream(seed, sig_sid))
        y = measure_analog(ensemble, f)
        direction = None
        if model.kind == "bounded" and model.shape == "worst_aligned":
            direction = y - measure_analog(ensemble, codec.decode(codec.encode(f)))
            if float(np.linalg.norm(direction)) <= 1e-15:
                direction = None
        y = _apply_trial_noise(y, model, noise_stream, direction)
        res = csp_recover_analog(y, ensemble, codec, truth=f,
                                 block_size=config.block_size, threads=config.threads)
        ensemble_seed = wiener_base
        error, residual = res.error_l2, res.residual
        wall = res.wall_time
    elif config.regime == "strong":
        ensemble = sample_ensemble(d, codec.n, _rng.derive_stream(seed, ens_sid))
        panel_sid = stream_id(point, 0, CH_PANEL)  # panel fixed across trials
        panel = build_panel(codec, config.panel_size, _rng.derive_stream(seed, panel_sid))
        ys = []
        for x, _ in panel:
            y = measure(ensemble, x)
            direction = _worst_direction(codec, ensemble, x) \
                if model.kind == "bounded" and model.shape == "worst_aligned" else None
            ys.append(_apply_trial_noise(y, model, noise_stream, direction))
        results = csp_recover_panel(
            np.asarray(ys), ensemble, codec,
            truths=np.asarray([x for x, _ in panel]),
            block_size=config.block_size, threads=config.threads,
        )
        errors = np.asarray([r.error_l2 for r in results])
        worst = int(np.argmax(errors))
        error = float(errors[worst])
        residual = results[worst].residual
        wall = results[0].wall_time
        desc = f"panel-max[{panel[worst][1]}]"
        ensemble_seed, sig_sid = ens_sid, panel_sid
    else:  # weak
        ensemble = sample_ensemble(d, codec.n, _rng.derive_stream(seed, ens_sid))
        x, desc = _draw_signal(config, codec, _rng.derive_stream(seed, sig_sid))
        y = measure(ensemble, x)
        direction = _worst_direction(codec, ensemble, x) \
            if model.kind == "bounded" and model.shape == "worst_aligned" else None
        y = _apply_trial_noise(y, model, noise_stream, direction)
        res = csp_recover(y, ensemble, codec, truth=x,
                          block_size=config.block_size, threads=config.threads)
        ensemble_seed = ens_sid
        error, residual = res.error_l2, res.residual
        wall = res.wall_time

    return TrialRecord(
        trial=trial_index, axis_value=axis_value,
        ensemble_seed=ensemble_seed, signal_seed=sig_sid,
        n=n, d=d, rate_bits=codec.rate_bits, delta=codec.delta,
        noise_kind=model.kind, noise_level=model.level,
        error_l2=error, residual=residual,
        bound_error=None if bound is None else bound.error_bound,
        bound_fail_prob=None if bound is None else bound.failure_probability,
        within_bound=None if bound is None else bool(error <= bound.error_bound),
        wall_ms=(wall * 1e3) if config.record_timings else 0.0,
        signal_desc=desc,
    )


def run_trials(config: ExperimentConfig, point: int = 0,
               axis_value: float | None = None) -> list:
    codec = codec_from_config(config.codec)
    return [
        run_trial(config, t, point=point, codec=codec, axis_value=axis_value)
        for t in range(config.trials)
    ]


def _point_config(config: ExperimentConfig, value: float) -> ExperimentConfig:
    name = config.axis["name"]
    if name == "d":
        return replace(config, d=int(value), axis=None)
    if name == "delta":
        codec = dict(config.codec)
        codec["delta"] = float(value)
        return replace(config, codec=codec, axis=None)
    noise = dict(config.noise)
    if name == "sigma":
        noise.update(kind="gaussian", sigma=float(value))
        noise.pop("zeta", None)
        noise.pop("shape", None)
    else:
        noise.setdefault("shape", "random_direction")
        noise.update(kind="bounded", zeta=float(value))
        noise.pop("sigma", None)
    return replace(config, noise=noise, axis=None)


def run_sweep(config: ExperimentConfig) -> SweepResult:
    """Run the trial grid over the configured axis.

    Per-point failures (for example a distortion too small for the codebook
    cap) are recorded as a point with nan aggregates and no records; the
    sweep continues.
    """
    if config.axis is None:
        raise ValueError("run_sweep needs an axis in the config")
    axis_name = config.axis["name"]
    values = [float(v) for v in config.axis["values"]]
    points: list[SweepPoint] = []
    records: list[TrialRecord] = []
    for i, value in enumerate(values):
        try:
            pc = _point_config(config, value)
            recs = run_trials(pc, point=i, axis_value=value)
        except ValueError:
            # per-point failure (e.g. capacity at a small delta): mark and go on
            points.append(SweepPoint(value, None, math.nan, math.nan, None, None))
            continue
        errs = np.asarray([r.error_l2 for r in recs])
        bound_error = recs[0].bound_error
        bound_fail = recs[0].bound_fail_prob
        exceed = None
        if bound_error is not None:
            exceed = float(np.mean(errs > bound_error))
        points.append(SweepPoint(
            axis_value=value, exceed_rate=exceed,
            mean_error=float(errs.mean()), max_error=float(errs.max()),
            bound_error=bound_error, bound_fail_prob=bound_fail,
        ))
        records.extend(recs)
    return SweepResult(axis_name=axis_name, points=points, records=records,
                       master_seed=config.master_seed)


CSV_COLUMNS = (
    "trial", "axis_value", "ensemble_seed", "signal_seed", "n", "d",
    "rate_bits", "delta", "noise_kind", "noise_level", "error_l2", "residual",
    "bound_error", "bound_fail_prob", "within_bound", "wall_ms",
)


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, float):
        # cast first: repr of numpy scalars carries a type wrapper
        return repr(float(value))
    return str(value)


def records_to_csv(records, master_seed: int) -> str:
    """Render trial records as CSV text: a '# master_seed=...' provenance
    line, the mandatory header row, then one row per record.  '.' decimals,
    LF line endings, shortest round-trip float format, hence byte-identical
    for identical records."""
    buf = io.StringIO()
    buf.write(f"# master_seed={master_seed}\n")
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for r in records:
        row = [_csv_cell(getattr(r, c)) for c in CSV_COLUMNS]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def write_csv(records, master_seed: int, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(records_to_csv(records, master_seed))
