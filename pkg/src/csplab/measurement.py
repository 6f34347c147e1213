"""Random linear measurement operators.

Finite-dimensional signals are measured with a d-by-n matrix of i.i.d.
standard normals; functions on [0,1] are measured by stochastic integrals
against d independent Wiener paths, realized as left-point sums on a uniform
grid of m steps.  Both operators are sampled from RandomStreams and are fully
reproducible from their recorded (master_seed, stream_id) provenance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .piecewise import PiecewisePolynomial
from .rng import RandomStream, WienerPath, derive_stream, gaussian_matrix, gaussian_vector


@dataclass
class MeasurementEnsemble:
    """A d-by-n Gaussian measurement matrix plus its seed provenance."""

    d: int
    n: int
    matrix: np.ndarray
    master_seed: int
    stream_id: int


def sample_ensemble(d: int, n: int, stream: RandomStream) -> MeasurementEnsemble:
    """Draw a fresh d-by-n matrix of i.i.d. N(0,1) entries from the stream.

    Entries are generated in row-major order: A[i, j] is the (i*n + j)-th
    normal variate drawn, so the matrix regenerates exactly from the seeds.
    """
    if d < 1 or n < 1:
        raise ValueError(f"need d >= 1 and n >= 1; got d={d}, n={n}")
    return MeasurementEnsemble(
        d=int(d), n=int(n),
        matrix=gaussian_matrix(stream, d, n),
        master_seed=stream.master_seed, stream_id=stream.stream_id,
    )


def measure(ensemble: MeasurementEnsemble, x) -> np.ndarray:
    """Exact matrix-vector product y = A x."""
    x = np.asarray(x, dtype=float)
    if x.shape != (ensemble.n,):
        raise ValueError(f"signal shape {x.shape}; ensemble expects ({ensemble.n},)")
    return ensemble.matrix @ x


@dataclass(frozen=True)
class NoiseModel:
    """Measurement noise description.

    kind "none":     y unchanged.
    kind "gaussian": y + sigma * g with g i.i.d. standard normal.
    kind "bounded":  y + zeta * u with ||u||_2 = 1; shape "random_direction"
                     draws u uniformly on the sphere, shape "worst_aligned"
                     takes u from a caller-supplied direction (the stress
                     surrogate for noise that may depend on the measurements).
    The emitted perturbation of a bounded model always has norm exactly zeta.
    """

    kind: str = "none"
    zeta: float = 0.0
    sigma: float = 0.0
    shape: str = "random_direction"

    def __post_init__(self):
        if self.kind not in ("none", "bounded", "gaussian"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.zeta < 0 or self.sigma < 0:
            raise ValueError("noise levels must be >= 0")
        if self.kind == "bounded" and self.shape not in (
            "random_direction", "worst_aligned",
        ):
            raise ValueError(f"unknown bounded-noise shape {self.shape!r}")

    @classmethod
    def none(cls) -> "NoiseModel":
        return cls(kind="none")

    @classmethod
    def bounded(cls, zeta: float, shape: str = "random_direction") -> "NoiseModel":
        return cls(kind="bounded", zeta=float(zeta), shape=shape)

    @classmethod
    def gaussian(cls, sigma: float) -> "NoiseModel":
        return cls(kind="gaussian", sigma=float(sigma))

    @property
    def level(self) -> float:
        """The scalar magnitude of the model (zeta, sigma, or 0)."""
        if self.kind == "bounded":
            return self.zeta
        if self.kind == "gaussian":
            return self.sigma
        return 0.0


def apply_noise(y: np.ndarray, model: NoiseModel, stream: RandomStream | None = None,
                context: np.ndarray | None = None) -> np.ndarray:
    """Return the noisy measurement vector for the given model.

    worst_aligned noise requires `context`, a nonzero direction in measurement
    space (normalized here); random directions and gaussian noise draw from
    `stream`.  Zero noise levels return the input unchanged.
    """
    y = np.asarray(y, dtype=float)
    if model.kind == "none":
        return y.copy()
    if model.kind == "gaussian":
        if model.sigma == 0.0:
            return y.copy()
        if stream is None:
            raise ValueError("gaussian noise needs a RandomStream")
        return y + model.sigma * gaussian_vector(stream, y.size)
    # bounded
    if model.zeta == 0.0:
        return y.copy()
    if model.shape == "worst_aligned":
        if context is None:
            raise ValueError("worst_aligned bounded noise needs a context direction")
        u = np.asarray(context, dtype=float)
        nrm = float(np.linalg.norm(u))
        if u.shape != y.shape or nrm == 0.0:
            raise ValueError("worst_aligned context must be a nonzero vector of shape y")
    else:
        if stream is None:
            raise ValueError("random_direction bounded noise needs a RandomStream")
        u = gaussian_vector(stream, y.size)
        nrm = float(np.linalg.norm(u))
        while nrm == 0.0:  # essentially impossible; keeps the contract hard
            u = gaussian_vector(stream, y.size)
            nrm = float(np.linalg.norm(u))
    return y + (model.zeta / nrm) * u


@dataclass
class WienerEnsemble:
    """d independent Wiener paths on a shared m-step grid.

    increments[i, k] = W_i((k+1)/m) - W_i(k/m).  Path i is drawn from stream
    id base_stream_id + i, so the ensemble regenerates from its seeds and the
    paths are independent by construction.
    """

    d: int
    m: int
    increments: np.ndarray
    master_seed: int
    base_stream_id: int

    @property
    def times(self) -> np.ndarray:
        """Left endpoints k/m of the integration cells."""
        return np.arange(self.m) / self.m

    def path(self, i: int) -> WienerPath:
        return WienerPath(m=self.m, increments=self.increments[i].copy())


def sample_wiener_ensemble(d: int, m: int, master_seed: int,
                           base_stream_id: int = 0) -> WienerEnsemble:
    """Draw d independent Wiener paths, path i from stream base_stream_id+i.

    The caller reserves the contiguous id block [base, base+d).
    """
    if d < 1:
        raise ValueError(f"need d >= 1 measurement paths; got d={d}")
    if m < 1:
        raise ValueError(f"need m >= 1 grid steps; got m={m}")
    inc = np.empty((d, m))
    scale = np.sqrt(1.0 / m)
    for i in range(d):
        stream = derive_stream(master_seed, base_stream_id + i)
        inc[i] = gaussian_vector(stream, m) * scale
    return WienerEnsemble(d=int(d), m=int(m), increments=inc,
                          master_seed=int(master_seed),
                          base_stream_id=int(base_stream_id))


def measure_analog(ensemble: WienerEnsemble, f) -> np.ndarray:
    """Stochastic-integral measurements y_i = sum_k f(t_k) (W_i(t_{k+1}) - W_i(t_k)).

    The left-point sum over the ensemble's m-step grid; exact (no
    discretization error) when f is piecewise constant with breakpoints on
    the grid.  f may be a PiecewisePolynomial (sampled with right limits at
    breakpoints, which is what makes the aligned case exact) or any callable
    on [0,1).
    """
    times = ensemble.times
    if isinstance(f, PiecewisePolynomial):
        vals = f.values_for_ito(times)
    else:
        vals = np.asarray(f(times), dtype=float)
    if vals.shape != times.shape:
        raise ValueError("integrand must evaluate to one value per grid cell")
    return ensemble.increments @ vals
