"""Open-loop steering of a herdable set above a threshold.

Floating point lives here and only here. Given a witness ``alpha`` with
``(C alpha)_i >= 1`` on the target set, the displacement ``k = gamma * C alpha``
is made large enough to beat the threshold against the free response, then
reached exactly at the horizon by the minimum-energy input built from the
finite-horizon reachability Gramian.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, TextIO

import numpy as np
from scipy.integrate import simpson
from scipy.linalg import expm

from .herdability import check_set
from .linsys import ControllabilityMatrix, controllability_matrix
from .model import LinearSystem

__all__ = [
    "PreconditionError",
    "SynthesisConfig",
    "SynthesisResult",
    "GramianControl",
    "reachability_gramian",
    "exact_gramian",
    "rk4_simulate",
    "synthesize",
]

CONDITION_CUTOFF = 1e-12


class PreconditionError(ValueError):
    """The requested set is not herdable, so no steering input exists."""


@dataclass(frozen=True)
class SynthesisConfig:
    threshold: float = 0.0
    horizon: float = 1.0
    steps: int = 1000
    margin: float = 2.0
    x0: Sequence[float] | None = None
    gamma: float | None = None  # overrides the computed scaling when set

    def __post_init__(self):
        if not np.isfinite(self.threshold) or self.threshold < 0:
            raise ValueError(f"threshold must be a non-negative real, got {self.threshold}")
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        if not isinstance(self.steps, (int, np.integer)) or self.steps < 1:
            raise ValueError("steps must be a positive integer")
        if not self.margin > 0:
            raise ValueError("margin must be positive")
        if self.gamma is not None and not self.gamma > 0:
            raise ValueError("gamma override must be positive")


class GramianControl:
    """``u(t) = B^T exp(A^T (T - t)) lam``, evaluated for arrays of times."""

    def __init__(self, A: np.ndarray, B: np.ndarray, horizon: float, costate: np.ndarray):
        self.A, self.B, self.horizon, self.costate = A, B, float(horizon), costate

    def __call__(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        E = expm(self.A.T[None, :, :] * (self.horizon - t)[:, None, None])
        return (self.B.T @ (E @ self.costate)[..., None])[..., 0]


@dataclass
class SynthesisResult:
    times: np.ndarray
    input_samples: np.ndarray  # (steps, m): u at t_0 .. t_{steps-1}
    trajectory: np.ndarray  # (steps + 1, n)
    achieved: dict[int, float]
    success: bool
    threshold: float
    gamma: float
    target: np.ndarray  # displacement the input is meant to add at the horizon
    control: GramianControl
    warnings: list[str] = field(default_factory=list)

    def write_csv(self, fh: TextIO) -> None:
        """One row per grid point: ``t, x1..xn, u1..um``."""
        n = self.trajectory.shape[1]
        m = self.input_samples.shape[1]
        u_last = self.control(self.times[-1])
        inputs = np.vstack([self.input_samples, u_last])
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t"] + [f"x{i + 1}" for i in range(n)] + [f"u{j + 1}" for j in range(m)])
        for t, x, u in zip(self.times, self.trajectory, inputs):
            writer.writerow([repr(float(t))] + [repr(float(v)) for v in x] + [repr(float(v)) for v in u])


def reachability_gramian(A: np.ndarray, B: np.ndarray, horizon: float, steps: int) -> np.ndarray:
    """``int_0^T e^{As} B B^T e^{A^T s} ds`` by Simpson's rule on the step grid."""
    s = np.linspace(0.0, horizon, steps + 1)
    E = expm(A[None, :, :] * s[:, None, None])
    EB = E @ B
    integrand = EB @ np.swapaxes(EB, 1, 2)
    return simpson(integrand, x=s, axis=0)


def exact_gramian(A: np.ndarray, B: np.ndarray, horizon: float) -> np.ndarray:
    """Closed-form Gramian from one block exponential (Van Loan)."""
    n = A.shape[0]
    M = np.zeros((2 * n, 2 * n))
    M[:n, :n] = -A
    M[:n, n:] = B @ B.T
    M[n:, n:] = A.T
    F = expm(M * horizon)
    return F[n:, n:].T @ F[:n, n:]


def rk4_simulate(A: np.ndarray, B: np.ndarray, x0: np.ndarray, horizon: float, steps: int,
                 control: Callable[[np.ndarray], np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Classical RK4 for ``x' = Ax + Bu(t)``. Returns ``(times, states)``."""
    dt = horizon / steps
    half = np.linspace(0.0, horizon, 2 * steps + 1)
    Bu = control(half) @ B.T
    x = np.array(x0, dtype=float)
    out = np.empty((steps + 1, x.size))
    out[0] = x
    for k in range(steps):
        b0, bh, b1 = Bu[2 * k], Bu[2 * k + 1], Bu[2 * k + 2]
        k1 = A @ x + b0
        k2 = A @ (x + 0.5 * dt * k1) + bh
        k3 = A @ (x + 0.5 * dt * k2) + bh
        k4 = A @ (x + dt * k3) + b1
        x = x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        out[k + 1] = x
    return half[::2], out


def _range_basis_float(C: ControllabilityMatrix) -> np.ndarray:
    basis = C.range.basis
    if not basis:
        return np.zeros((C.n, 0))
    cols = np.array([[float(v) for v in col] for col in basis]).T
    Q, _ = np.linalg.qr(cols)
    return Q


def synthesize(sys: LinearSystem, X: Iterable[int], cfg: SynthesisConfig | None = None, *,
               witness: Sequence | None = None,
               C: ControllabilityMatrix | None = None) -> SynthesisResult:
    """Drive the 0-based states ``X`` to at least ``cfg.threshold`` at ``cfg.horizon``.

    Raises :class:`PreconditionError` when ``X`` is not herdable. A poorly
    conditioned Gramian is reported in ``result.warnings``, not raised.
    """
    cfg = cfg or SynthesisConfig()
    X = tuple(sorted(set(X)))
    C = C if C is not None else controllability_matrix(sys)
    if witness is None:
        verdict = check_set(C, X)
        if not verdict.herdable:
            raise PreconditionError(f"states {[i + 1 for i in X]} are not herdable")
        witness = verdict.witness
    k_exact = C.C.matvec(witness)
    if any(k_exact[i] <= 0 for i in X):
        raise PreconditionError("supplied witness is not positive on the query set")

    A, B = sys.A.to_float(), sys.B.to_float()
    n = sys.n
    T, h = float(cfg.horizon), float(cfg.threshold)
    x0 = np.zeros(n) if cfg.x0 is None else np.asarray(cfg.x0, dtype=float)
    if x0.shape != (n,):
        raise ValueError(f"x0 must have length {n}")

    k = np.array([float(v) for v in k_exact])
    free = expm(A * T) @ x0
    min_k = min(k[i] for i in X)
    bound = float(np.max(h - free)) / min_k
    if cfg.gamma is not None:
        gamma = float(cfg.gamma)
    elif bound > 0:
        gamma = cfg.margin * bound
    else:
        gamma = cfg.margin / min_k
    target = gamma * k

    notes: list[str] = []
    W = reachability_gramian(A, B, T, cfg.steps)
    Q = _range_basis_float(C)
    Wr = Q.T @ W @ Q
    sv = np.linalg.svd(Wr, compute_uv=False)
    if sv.size and sv[-1] < CONDITION_CUTOFF * sv[0]:
        msg = f"Gramian poorly conditioned on the reachable subspace (sigma_min/sigma_max = {sv[-1] / sv[0]:.2e})"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes.append(msg)
    costate = Q @ np.linalg.lstsq(Wr, Q.T @ target, rcond=None)[0]
    control = GramianControl(A, B, T, costate)

    times, traj = rk4_simulate(A, B, x0, T, cfg.steps, control)
    u = control(times[:-1])
    final = traj[-1]
    achieved = {i: float(final[i]) for i in X}
    tol = 1e-6 * max(1.0, h)
    success = all(v >= h - tol for v in achieved.values())
    return SynthesisResult(times, u, traj, achieved, success, h, gamma, target, control, notes)
