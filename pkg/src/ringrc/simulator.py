"""Brute-force transient oracle for the three coupled lines.

Builds the network directly from circuit elements (no transfer-function
algebra shared with the analytic model) and integrates the state-space
equation

    C dV/dt = b - G V

with a fixed-step classical 4th-order Runge-Kutta scheme. Each line can
be split into N identical segments (resistance r/N in series, c/N to
ground and c_c/N of coupling per segment) to approximate a distributed
line; N = 1 reproduces the single-lump topology of the analytic model.

For a linear time-invariant system with a constant source vector the
four Runge-Kutta stage evaluations collapse to one affine update
V <- M V + k per step, where M is the degree-4 Taylor polynomial of
exp(h A). The propagator M is precomputed once, which makes million-step
runs tractable; the arithmetic is identical to evaluating the textbook
stages.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .capacitance import CrosstalkMode
from .errors import InstabilityError, NoCrossingError
from .lumpmodel import DrivePattern, LineRC

#: Default integration step, as a fraction of the fastest time constant.
DT_DIVISOR = 50.0
#: Largest step the integrator accepts, as a fraction of the fastest time constant.
DT_DIVISOR_MIN = 20.0
#: Default simulation span, in units of the slowest time constant.
T_END_FACTOR = 30.0
#: Samples retained per run; longer runs are decimated to roughly this count.
MAX_SAMPLES = 8192


@dataclass
class NetworkStateSpace:
    """Dense state-space matrices of the segmented three-line network.

    capacitance and conductance are symmetric (node x node) matrices;
    source_conductance[i] is the conductance from node i to its driving
    source (zero except at each line's near-end node) and source_line[i]
    names which drive amplitude feeds node i (-1 for none). observed
    holds the far-end node index of lines A, B, C.
    """

    segments: int
    capacitance: np.ndarray
    conductance: np.ndarray
    source_conductance: np.ndarray
    source_line: np.ndarray
    observed: tuple[int, int, int]
    v_ref: float

    def __post_init__(self):
        c, g = self.capacitance, self.conductance
        if not np.allclose(c, c.T) or not np.allclose(g, g.T):
            raise ValueError("network matrices must be symmetric")
        offdiag = np.abs(c).sum(axis=1) - np.abs(np.diag(c))
        if np.any(np.diag(c) < offdiag - 1e-30):
            raise ValueError("capacitance matrix is not diagonally dominant")

    @property
    def node_count(self) -> int:
        return self.capacitance.shape[0]

    def time_constants(self) -> tuple[float, float]:
        """(fastest, slowest) time constants of the C^-1 G pencil."""
        a = np.linalg.solve(self.capacitance, self._g_total())
        eig = np.linalg.eigvals(a)
        rates = np.sort(np.abs(eig.real))
        rates = rates[rates > 0.0]
        return 1.0 / rates[-1], 1.0 / rates[0]

    def _g_total(self) -> np.ndarray:
        return self.conductance + np.diag(self.source_conductance)


@dataclass(frozen=True)
class Waveform:
    """Uniformly sampled node voltage trace."""

    dt: float
    values: np.ndarray
    label: str

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError("dt must be > 0")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("waveform contains non-finite samples")

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.values)) * self.dt


@dataclass(frozen=True)
class SimulationResult:
    """Far-end waveforms of the three lines."""

    line_a: Waveform
    line_b: Waveform
    line_c: Waveform

    @property
    def victim(self) -> Waveform:
        return self.line_b


def build_network(line: LineRC, segments: int = 1) -> NetworkStateSpace:
    """Assemble the segmented three-line network from circuit elements.

    Each of the three lines is a chain of `segments` RC sections fed
    through the first section's resistance; coupling capacitance ties
    nodes of adjacent lines section by section. Element values scale as
    r/segments, c/segments and c_c/segments so the line totals are
    independent of the segment count.
    """
    if segments < 1:
        raise ValueError(f"segments must be >= 1, got {segments}")
    n_seg = segments
    n_nodes = 3 * n_seg
    r_seg = line.r / n_seg
    c_seg = line.c / n_seg
    cc_seg = line.c_c / n_seg
    g_seg = 1.0 / r_seg

    cap = np.zeros((n_nodes, n_nodes))
    cond = np.zeros((n_nodes, n_nodes))
    src_g = np.zeros(n_nodes)
    src_line = np.full(n_nodes, -1, dtype=int)

    def node(line_idx: int, seg_idx: int) -> int:
        return line_idx * n_seg + seg_idx

    for li in range(3):
        src_g[node(li, 0)] = g_seg
        src_line[node(li, 0)] = li
        for k in range(n_seg):
            cap[node(li, k), node(li, k)] += c_seg
            if k + 1 < n_seg:
                i, j = node(li, k), node(li, k + 1)
                cond[i, i] += g_seg
                cond[j, j] += g_seg
                cond[i, j] -= g_seg
                cond[j, i] -= g_seg
    for li, lj in ((0, 1), (1, 2)):
        for k in range(n_seg):
            i, j = node(li, k), node(lj, k)
            cap[i, i] += cc_seg
            cap[j, j] += cc_seg
            cap[i, j] -= cc_seg
            cap[j, i] -= cc_seg

    observed = (node(0, n_seg - 1), node(1, n_seg - 1), node(2, n_seg - 1))
    return NetworkStateSpace(
        segments=n_seg,
        capacitance=cap,
        conductance=cond,
        source_conductance=src_g,
        source_line=src_line,
        observed=observed,
        v_ref=line.v_dd,
    )


def simulate_step(
    net: NetworkStateSpace,
    drive: DrivePattern,
    dt: float | None = None,
    t_end: float | None = None,
    max_samples: int = MAX_SAMPLES,
) -> SimulationResult:
    """Integrate the step response from an all-zero initial state.

    Args:
        net: network from build_network().
        drive: constant source amplitudes applied for t >= 0.
        dt: integration step (seconds). Defaults to the fastest network
            time constant divided by DT_DIVISOR; must not exceed that
            constant divided by DT_DIVISOR_MIN.
        t_end: span to integrate (seconds). Defaults to T_END_FACTOR
            times the slowest network time constant.
        max_samples: approximate number of retained samples; the stored
            waveform is decimated to at most this length.

    Returns:
        SimulationResult with one far-end waveform per line. The output
        is deterministic for identical inputs.

    Raises:
        InstabilityError: if any retained sample exceeds 10x the drive scale.
    """
    tau_min, tau_max = net.time_constants()
    if dt is None:
        dt = tau_min / DT_DIVISOR
    if dt > tau_min / DT_DIVISOR_MIN:
        raise ValueError(
            f"dt={dt!r} exceeds the fastest time constant {tau_min!r} "
            f"divided by {DT_DIVISOR_MIN}"
        )
    if t_end is None:
        t_end = T_END_FACTOR * tau_max
    if not t_end > 0.0:
        raise ValueError("t_end must be > 0")

    amps = np.array([drive.v_s1, drive.v_s2, drive.v_s3])
    b = np.zeros(net.node_count)
    mask = net.source_line >= 0
    b[mask] = net.source_conductance[mask] * amps[net.source_line[mask]]

    a_mat = np.linalg.solve(net.capacitance, -net._g_total())
    u = np.linalg.solve(net.capacitance, b)

    n_steps = max(1, int(np.ceil(t_end / dt)))
    decim = max(1, -(-(n_steps + 1) // max_samples))

    # One Runge-Kutta step of dV/dt = A V + u is V <- M V + k with
    # M = I + hA + (hA)^2/2 + (hA)^3/6 + (hA)^4/24 and the matching k.
    h = dt
    n = net.node_count
    eye = np.eye(n)
    ha = h * a_mat
    ha2 = ha @ ha
    ha3 = ha2 @ ha
    ha4 = ha3 @ ha
    m_step = eye + ha + ha2 / 2.0 + ha3 / 6.0 + ha4 / 24.0
    k_step = (h * (eye + ha / 2.0 + ha2 / 6.0 + ha3 / 24.0)) @ u

    limit = 10.0 * max(net.v_ref, float(np.max(np.abs(amps))))
    v = np.zeros(n)
    n_kept = n_steps // decim + 1
    kept = np.empty((n_kept, 3))
    kept[0] = v[list(net.observed)]
    idx = 1
    for step in range(1, n_steps + 1):
        v = m_step @ v + k_step
        if step % decim == 0:
            sample = v[list(net.observed)]
            if np.any(np.abs(sample) > limit):
                raise InstabilityError(
                    f"sample magnitude exceeded {limit!r} V at t={step * dt!r}"
                )
            kept[idx] = sample
            idx += 1
    kept = kept[:idx]

    dt_out = decim * dt
    return SimulationResult(
        line_a=Waveform(dt_out, np.ascontiguousarray(kept[:, 0]), "line_a"),
        line_b=Waveform(dt_out, np.ascontiguousarray(kept[:, 1]), "line_b"),
        line_c=Waveform(dt_out, np.ascontiguousarray(kept[:, 2]), "line_c"),
    )


def crossing_time(waveform: Waveform, threshold: float) -> float:
    """First time the waveform reaches the threshold, linearly interpolated.

    Raises:
        NoCrossingError: if no sample reaches the threshold.
    """
    values = waveform.values
    above = np.nonzero(values >= threshold)[0]
    if len(above) == 0:
        raise NoCrossingError(
            f"waveform {waveform.label!r} never reaches {threshold!r} V"
        )
    i = int(above[0])
    if i == 0:
        return 0.0
    v0, v1 = values[i - 1], values[i]
    frac = (threshold - v0) / (v1 - v0)
    return (i - 1 + frac) * waveform.dt


def victim_delay(
    line: LineRC,
    mode: CrosstalkMode,
    segments: int = 1,
    threshold_fraction: float = 0.5,
    dt: float | None = None,
    t_end: float | None = None,
) -> float:
    """Simulated time for the victim to reach the threshold voltage."""
    net = build_network(line, segments)
    drive = DrivePattern.for_mode(mode, line.v_dd)
    result = simulate_step(net, drive, dt=dt, t_end=t_end)
    return crossing_time(result.victim, threshold_fraction * line.v_dd)


def quiet_delay_ratio(
    line: LineRC, segments: int, threshold_fraction: float = 0.5
) -> float:
    """Distributed-over-lump quiet-mode delay ratio for one line model.

    Runs the oracle twice: once on the single-lump network and once with
    the line split into the requested number of segments. Splitting
    spreads the same totals along the line, so early segments charge
    through less series resistance and the far end crosses the threshold
    earlier; the ratio approaches one half as the segment count grows.
    The distributed run uses the coarsest permitted step (the fastest
    segment time constant shrinks quadratically with the segment count,
    so an over-resolved step would make the run needlessly long).
    """
    t_lump = victim_delay(line, CrosstalkMode.QUIET, 1, threshold_fraction)
    net = build_network(line, segments)
    tau_fast, _ = net.time_constants()
    drive = DrivePattern.for_mode(CrosstalkMode.QUIET, line.v_dd)
    result = simulate_step(
        net, drive, dt=tau_fast / DT_DIVISOR_MIN, t_end=1.5 * t_lump
    )
    t_dist = crossing_time(result.victim, threshold_fraction * line.v_dd)
    return t_dist / t_lump


def frequency_response(
    net: NetworkStateSpace, drive: DrivePattern, s: complex
) -> np.ndarray:
    """Laplace-domain node voltages (G + sC) X = b(s) for step drives.

    Solves the network equations directly at complex frequency s with
    Vs_i(s) = amplitude_i / s, giving an independent cross-check of the
    closed-form transfer functions. Returns all node voltages; index
    with net.observed for the far-end values.
    """
    if s == 0:
        raise ValueError("s must be nonzero for a step input")
    amps = np.array([drive.v_s1, drive.v_s2, drive.v_s3])
    b = np.zeros(net.node_count, dtype=complex)
    mask = net.source_line >= 0
    b[mask] = net.source_conductance[mask] * amps[net.source_line[mask]] / s
    lhs = net._g_total().astype(complex) + s * net.capacitance
    return np.linalg.solve(lhs, b)
