"""Relaxed Douglas-Rachford fixed-point engine with iteration tracing.

One step from iterate z applies the prox of the first operator, reflects,
applies the prox of the second, and averages:

    x  = prox_f(z)            (f applied first, the default order)
    y  = prox_g(2x - z)
    z+ = z + 2*alpha*(y - x)

which is algebraically ((1-alpha)*Id + alpha*R_g R_f) z.  The swapped order
applies prox_g first.  The unaveraged case alpha = 1 is Peaceman-Rachford.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .prox import ProxFn

#: scalars of full z-history kept before thinning to residuals only
HISTORY_SCALAR_BUDGET = 10**7

CSV_SCHEMA_TAG = "# proxsplit-csv v1"


@dataclass(frozen=True)
class DrConfig:
    """Parameters of the relaxed splitting iteration.

    ``order`` picks which prox is applied first: "f_first" (the explicit
    three-step form above) or "g_first" (the mirrored composition).
    """

    gamma: float
    alpha: float
    max_iters: int = 10_000
    tol: float = 1e-10
    order: Literal["f_first", "g_first"] = "f_first"

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.order not in ("f_first", "g_first"):
            raise ValueError("order must be 'f_first' or 'g_first'")


@dataclass(eq=False)
class SolveTrace:
    """Per-iteration record of a fixed-point solve.

    ``residuals[k]`` is ||z^{k+1} - z^k||; ``contraction_ratios[k]`` is
    ||z^{k+1} - ref|| / ||z^k - ref|| when a reference was supplied (NaN
    where the denominator underflows).  ``z_history`` holds [z^0, ..., z^K]
    unless thinned for memory, in which case it is empty.
    """

    residuals: list[float] = field(default_factory=list)
    contraction_ratios: list[float] = field(default_factory=list)
    z_history: list[np.ndarray] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    z_final: np.ndarray | None = None
    x_final: np.ndarray | None = None

    def distances_to(self, ref: np.ndarray) -> np.ndarray:
        """||z^k - ref|| over the stored history (needs full history)."""
        if not self.z_history:
            raise ValueError("z_history was thinned away; nothing to measure")
        ref = np.asarray(ref, dtype=float)
        return np.array([float(np.linalg.norm(z - ref))
                         for z in self.z_history])


def write_trace_csv(trace: SolveTrace, fileobj: io.TextIOBase) -> None:
    """Emit iter,residual,contraction_ratio rows; ratio empty when unmeasured."""
    fileobj.write(CSV_SCHEMA_TAG + "\n")
    fileobj.write("iter,residual,contraction_ratio\n")
    have_ratio = bool(trace.contraction_ratios)
    for k, res in enumerate(trace.residuals):
        if have_ratio:
            ratio = trace.contraction_ratios[k]
            ratio_txt = "" if np.isnan(ratio) else f"{ratio:.17g}"
        else:
            ratio_txt = ""
        fileobj.write(f"{k},{res:.17g},{ratio_txt}\n")


def dr_step(f: ProxFn, g: ProxFn, cfg: DrConfig,
            z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One relaxed step; returns (z_next, x, y).

    ``x`` is always the prox-of-f point and ``y`` the prox-of-g point,
    regardless of order.  At a fixed point of the composition both coincide
    with the solution.
    """
    z = np.asarray(z, dtype=float)
    if cfg.order == "f_first":
        x = f.prox(cfg.gamma, z)
        y = g.prox(cfg.gamma, 2.0 * x - z)
        z_next = z + 2.0 * cfg.alpha * (y - x)
    else:
        y = g.prox(cfg.gamma, z)
        x = f.prox(cfg.gamma, 2.0 * y - z)
        z_next = z + 2.0 * cfg.alpha * (x - y)
    return z_next, x, y


def dr_solve(f: ProxFn, g: ProxFn, cfg: DrConfig, z0: np.ndarray,
             reference: np.ndarray | None = None) -> SolveTrace:
    """Iterate the relaxed splitting map from z0 until the residual is small.

    Stops when ||z^{k+1} - z^k|| <= tol * max(1, ||z^k||) or after
    ``max_iters`` steps (then ``converged`` is False; no exception).  The
    solution candidate ``x_final`` is the prox of the first-applied operator
    at the final iterate.

    Parameters
    ----------
    f, g : ProxFn
        The two operators; ``cfg.order`` picks which prox runs first.
    cfg : DrConfig
        Step size, relaxation, stopping rule, order.
    z0 : array
        Starting iterate.
    reference : array, optional
        Known fixed point; when given, per-iteration contraction ratios
        ||z^{k+1} - ref|| / ||z^k - ref|| are recorded.
    """
    z = np.asarray(z0, dtype=float).copy()
    ref = None if reference is None else np.asarray(reference, dtype=float)
    keep_history = z.size * (cfg.max_iters + 1) <= HISTORY_SCALAR_BUDGET
    trace = SolveTrace()
    if keep_history:
        trace.z_history.append(z.copy())
    x = None
    for _ in range(cfg.max_iters):
        z_next, x, y = dr_step(f, g, cfg, z)
        trace.iterations += 1
        res = float(np.linalg.norm(z_next - z))
        trace.residuals.append(res)
        if ref is not None:
            den = float(np.linalg.norm(z - ref))
            num = float(np.linalg.norm(z_next - ref))
            trace.contraction_ratios.append(
                num / den if den > 1e-300 else float("nan"))
        if keep_history:
            trace.z_history.append(z_next.copy())
        z = z_next
        if res <= cfg.tol * max(1.0, float(np.linalg.norm(z))):
            trace.converged = True
            break
    trace.z_final = z
    if cfg.order == "f_first":
        trace.x_final = f.prox(cfg.gamma, z)
    else:
        trace.x_final = g.prox(cfg.gamma, z)
    return trace
