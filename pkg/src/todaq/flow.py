"""Time integration in native chart coordinates with drift monitoring.

The matrix ``L`` is never integrated directly: flows run in the
system's own phase coordinates and ``L`` is rebuilt at every sample,
so trace powers and eigenvalues are genuine conservation checks of
the integrator, not of the bookkeeping.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import lax

Arr = np.ndarray

METHODS = ("rk4", "adaptive")
TRACE_POWERS = (1, 2, 3)


class FlowError(RuntimeError):
    """Integration failed (blow-up, non-finite state, solver failure)."""


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk4"
    h: float = 1e-3              # rk4 step; also the output grid unit
    tol: float = 1e-10           # adaptive relative tolerance
    t_final: float = 10.0
    stride: int = 10             # samples every stride steps

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.h <= 0 or self.t_final <= 0 or self.stride < 1:
            raise ValueError("h, t_final must be positive and stride >= 1")


@dataclass(frozen=True)
class Trajectory:
    system: lax.LaxSystem
    config: IntegratorConfig
    times: Arr
    states: Arr                       # samples x dim
    trace_powers: dict                # k -> samples array of tr L^k
    eigenvalues: Arr                  # samples x size (complex for GL)
    wall_clock_seconds: float

    @property
    def initial_state(self) -> Arr:
        return self.states[0]

    @property
    def final_state(self) -> Arr:
        return self.states[-1]


@dataclass(frozen=True)
class DriftReport:
    invariant_drift: dict           # k -> max |tr L^k (t) - tr L^k (0)|
    eigenvalue_drift: float         # max over samples of matched-set deviation
    wall_clock_seconds: float
    samples: int

    def render(self) -> str:
        parts = [f"trL{'' if k == 1 else k}={v:.3e}" for k, v in sorted(self.invariant_drift.items())]
        parts.append(f"eig={self.eigenvalue_drift:.3e}")
        return "drift " + " ".join(parts) + f" (samples={self.samples}, wall={self.wall_clock_seconds:.3f}s)"


def _step_times(t_final: float, h: float) -> Arr:
    """Step endpoints 0, h, 2h, ..., ending exactly at t_final."""
    n_full = int(math.floor(t_final / h + 1e-12))
    times = [i * h for i in range(n_full + 1)]
    if t_final - times[-1] > 1e-12 * max(1.0, t_final):
        times.append(t_final)
    else:
        times[-1] = t_final
    return np.asarray(times)


def _sample_indices(n_steps: int, stride: int) -> list:
    idx = list(range(0, n_steps + 1, stride))
    if idx[-1] != n_steps:
        idx.append(n_steps)
    return idx


def integrate(system: lax.LaxSystem, z0, config: IntegratorConfig) -> Trajectory:
    """Integrate the native flow and sample states plus invariants."""
    z0 = np.asarray(z0, dtype=float)
    if z0.shape != (system.dim,):
        raise ValueError(f"state must have {system.dim} components")
    ps = system.phase_system()
    f = ps.rhs
    if f is None:
        from . import phase

        f = lambda z: phase.structure_vector_field(ps.energy, ps.structure, z)
    step_times = _step_times(config.t_final, config.h)
    n_steps = len(step_times) - 1
    idx = _sample_indices(n_steps, config.stride)
    times = step_times[idx]
    t_start = time.perf_counter()
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            if config.method == "rk4":
                samples = _rk4_samples(f, z0, step_times, set(idx))
            else:
                sol = solve_ivp(lambda t, y: f(y), (0.0, float(times[-1])), z0,
                                method="RK45", rtol=config.tol,
                                atol=config.tol * 1e-2, t_eval=times)
                if not sol.success:
                    raise FlowError(f"adaptive solver failed: {sol.message}")
                samples = sol.y.T
    except (OverflowError, FloatingPointError) as exc:
        raise FlowError(f"flow blew up: {exc}") from exc
    wall = time.perf_counter() - t_start
    samples = np.asarray(samples, dtype=float)
    if not np.all(np.isfinite(samples)):
        raise FlowError("flow produced non-finite states")
    traces = {k: np.empty(len(idx)) for k in TRACE_POWERS}
    eig = np.empty((len(idx), system.size),
                   dtype=float if system.symmetric else complex)
    for row, z in enumerate(samples):
        L = lax.build_L(system, z)
        Lk = np.eye(system.size)
        for k in TRACE_POWERS:
            Lk = Lk @ L
            traces[k][row] = np.trace(Lk)
        eig[row] = lax.eigenvalues(system, z)
    return Trajectory(system, config, np.asarray(times, dtype=float),
                      samples, traces, eig, wall)


def _rk4_samples(f, z0: Arr, step_times: Arr, keep: set) -> list:
    z = z0.copy()
    out = [z0.copy()] if 0 in keep else []
    for i in range(1, len(step_times)):
        h = step_times[i] - step_times[i - 1]
        h2, h6 = 0.5 * h, h / 6.0
        k1 = f(z)
        k2 = f(z + h2 * k1)
        k3 = f(z + h2 * k2)
        k4 = f(z + h * k3)
        z = z + h6 * (k1 + 2.0 * (k2 + k3) + k4)
        if i in keep:
            out.append(z.copy())
    return out


def drift_report(traj: Trajectory) -> DriftReport:
    """Worst-case wander of trace powers and eigenvalue sets over time."""
    inv = {k: float(np.max(np.abs(v - v[0]))) for k, v in traj.trace_powers.items()}
    eig0 = traj.eigenvalues[0]
    eig_drift = float(np.max(np.abs(traj.eigenvalues - eig0[None, :])))
    return DriftReport(inv, eig_drift, traj.wall_clock_seconds, len(traj.times))


@dataclass(frozen=True)
class CrossCheckReport:
    max_deviation: float
    samples: int

    def render(self) -> str:
        return f"sup deviation {self.max_deviation:.3e} over {self.samples} samples"


def cross_check_flows(system_a: lax.LaxSystem, system_b: lax.LaxSystem,
                      chart_map, z0_a, config: IntegratorConfig) -> CrossCheckReport:
    """Integrate the same initial condition in two charts and compare.

    The first flow's samples are pushed through the chart map and
    compared against the second flow started from the mapped state;
    returns the sup-norm deviation over all sampled times.
    """
    traj_a = integrate(system_a, z0_a, config)
    z0_b = np.asarray(chart_map.forward(np.asarray(z0_a, dtype=float)), dtype=float)
    traj_b = integrate(system_b, z0_b, config)
    mapped = np.array([chart_map.forward(z) for z in traj_a.states])
    n = min(len(mapped), len(traj_b.states))
    dev = float(np.max(np.abs(mapped[:n] - traj_b.states[:n])))
    return CrossCheckReport(dev, n)


def convergence_ratio(system: lax.LaxSystem, z0, t_final: float, h: float) -> float:
    """Endpoint-error ratio between steps h and h/2 (about 16 for RK4)."""
    ref = integrate(system, z0, IntegratorConfig(h=h / 64, t_final=t_final, stride=10 ** 9))
    e = []
    for hh in (h, h / 2):
        traj = integrate(system, z0, IntegratorConfig(h=hh, t_final=t_final, stride=10 ** 9))
        e.append(float(np.max(np.abs(traj.final_state - ref.final_state))))
    return e[0] / e[1]


# ---------------------------------------------------------------------------
# CSV output


def _fmt(x: float) -> str:
    return repr(float(x))


def _fmt_complex(x: complex) -> str:
    r, i = float(x.real), float(x.imag)
    return f"{r!r}{'+' if i >= 0 else '-'}{abs(i)!r}j"


def trajectory_header(traj: Trajectory) -> str:
    names = list(traj.system.state_names)
    eigs = [f"eig{i + 1}" for i in range(traj.system.size)]
    return ",".join(["t"] + names + ["trL", "trL2", "trL3"] + eigs)


def write_trajectory_csv(traj: Trajectory, path, drift: DriftReport | None = None):
    """Write samples: t, state, trace powers, eigenvalues.

    Floats use the shortest decimal that round-trips the double.  The
    drift summary goes into trailing comment lines, never into data
    rows, so files for a fixed configuration are byte-identical.
    """
    complex_eigs = np.iscomplexobj(traj.eigenvalues)
    lines = [trajectory_header(traj)]
    for row in range(len(traj.times)):
        cells = [_fmt(traj.times[row])]
        cells += [_fmt(x) for x in traj.states[row]]
        cells += [_fmt(traj.trace_powers[k][row]) for k in TRACE_POWERS]
        if complex_eigs:
            cells += [_fmt_complex(x) for x in traj.eigenvalues[row]]
        else:
            cells += [_fmt(x) for x in traj.eigenvalues[row]]
        lines.append(",".join(cells))
    if drift is not None:
        for k, v in sorted(drift.invariant_drift.items()):
            lines.append(f"# drift_trL{k} = {_fmt(v)}")
        lines.append(f"# drift_eig = {_fmt(drift.eigenvalue_drift)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
