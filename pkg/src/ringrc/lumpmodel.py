"""Closed-form model of three identical coupled RC lines.

Each line is driven through a resistance R onto a node with capacitance C
to ground; adjacent nodes are tied by a coupling capacitance C_c. Line B
is the victim (middle), lines A and C are the aggressors. Writing
p = s*R*C and q = s*R*C_c, the node equations solve to

    V_A = [(1 + a1 s + a2 s^2) Vs1 + (a3 s + a4 s^2) Vs2 + a5 s^2 Vs3]
          / [(1 + b1 s)(1 + b2 s)(1 + b3 s)]
    V_B = [a6 s Vs1 + (1 + a7 s) Vs2 + a8 s Vs3]
          / [(1 + b4 s)(1 + b5 s)]

with V_C mirroring V_A (Vs1 and Vs3 swapped). The victim poles are
1/(R*C) and 1/(R*(C + 3*C_c)); the aggressor adds 1/(R*(C + C_c)).

For a rising victim step of amplitude V the victim waveform per
aggressor mode is:

    in-phase:      V * (1 - exp(-t/(R*C)))
    quiet:         V * (1 - (1/3) exp(-t/(R*C)) - (2/3) exp(-t/(R*(C+3*C_c))))
    out-of-phase:  V * (1 + (2/3) exp(-t/(R*C)) - (2/3) exp(-t/(R*(C+3*C_c))))

The out-of-phase form is kept exactly as the model algebra produces it.
Note that it evaluates to V at t = 0, so it does not describe the early
part of a rising edge; use the transient simulator (simulator module)
when an absolute out-of-phase waveform or delay is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .capacitance import CrosstalkMode
from .errors import DegenerateDelayError, NoCrossingError, PoleProximityError

#: |1 + b*s| below this is treated as an evaluation at a pole.
POLE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class LineRC:
    """Per-stage lumped line parameters.

    r is the total drive resistance (ohms), c the capacitance to ground
    (farads), c_c the coupling capacitance to each neighbour (farads) and
    v_dd the step amplitude (volts).
    """

    r: float
    c: float
    c_c: float
    v_dd: float

    def __post_init__(self):
        if not self.r > 0.0:
            raise ValueError(f"r must be > 0, got {self.r!r}")
        if not self.c > 0.0:
            raise ValueError(f"c must be > 0, got {self.c!r}")
        if not self.c_c >= 0.0:
            raise ValueError(f"c_c must be >= 0, got {self.c_c!r}")
        if not self.v_dd > 0.0:
            raise ValueError(f"v_dd must be > 0, got {self.v_dd!r}")

    @property
    def tau_ground(self) -> float:
        """R*C, the uncoupled (in-phase) time constant."""
        return self.r * self.c

    @property
    def tau_coupled(self) -> float:
        """R*(C + 3*C_c), the slow victim time constant."""
        return self.r * (self.c + 3.0 * self.c_c)


@dataclass(frozen=True)
class LumpCoefficients:
    """Numerator (a1..a8) and denominator (b1..b5) polynomial coefficients."""

    a1: float
    a2: float
    a3: float
    a4: float
    a5: float
    a6: float
    a7: float
    a8: float
    b1: float
    b2: float
    b3: float
    b4: float
    b5: float


@dataclass(frozen=True)
class DrivePattern:
    """Step amplitudes applied to lines A, B, C (volts)."""

    v_s1: float
    v_s2: float
    v_s3: float

    @classmethod
    def for_mode(cls, mode: CrosstalkMode, v_dd: float) -> "DrivePattern":
        """Canonical rising-victim pattern for an aggressor mode."""
        if mode is CrosstalkMode.QUIET:
            return cls(0.0, v_dd, 0.0)
        if mode is CrosstalkMode.IN_PHASE:
            return cls(v_dd, v_dd, v_dd)
        if mode is CrosstalkMode.OUT_OF_PHASE:
            return cls(-v_dd, v_dd, -v_dd)
        raise ValueError(f"unknown mode {mode!r}")


def lump_coefficients(line: LineRC) -> LumpCoefficients:
    """Polynomial coefficients of the three-line transfer functions.

    All coefficients are products of rc = R*C and rcc = R*C_c:

        a1 = 2 rc + 3 rcc          a2 = rc^2 + rcc^2 + 3 rc rcc
        a3 = rcc                   a4 = rcc^2 + rc rcc
        a5 = rcc^2                 a6 = a8 = rcc
        a7 = rc + rcc
        b1 = b4 = rc               b2 = rc + rcc
        b3 = b5 = rc + 3 rcc
    """
    rc = line.r * line.c
    rcc = line.r * line.c_c
    return LumpCoefficients(
        a1=2.0 * rc + 3.0 * rcc,
        a2=rc * rc + rcc * rcc + 3.0 * rc * rcc,
        a3=rcc,
        a4=rcc * rcc + rc * rcc,
        a5=rcc * rcc,
        a6=rcc,
        a7=rc + rcc,
        a8=rcc,
        b1=rc,
        b2=rc + rcc,
        b3=rc + 3.0 * rcc,
        b4=rc,
        b5=rc + 3.0 * rcc,
    )


def transfer_eval(
    coeffs: LumpCoefficients, drive: DrivePattern, s: complex
) -> tuple[complex, complex, complex]:
    """Evaluate the Laplace-domain node voltages for step drives.

    Each source enters as a step, Vs_i(s) = amplitude_i / s. The victim
    numerator couples the aggressor steps through a6*s*Vs1 and a8*s*Vs3
    so that every term carries the same dimensions as Vs2.

    Args:
        coeffs: polynomial coefficients from lump_coefficients().
        drive: step amplitudes for the three lines.
        s: complex frequency; must not coincide with a pole or s = 0.

    Returns:
        (V_A, V_B, V_C) as complex values.

    Raises:
        PoleProximityError: if s is within POLE_TOLERANCE of any pole of
            the transfer functions or of the step input itself.
    """
    c = coeffs
    for b in (c.b1, c.b2, c.b3):
        if abs(1.0 + b * s) < POLE_TOLERANCE:
            raise PoleProximityError(
                f"s={s!r} is within {POLE_TOLERANCE} of the pole -1/{b!r}"
            )
    if abs(s) * max(c.b1, c.b2, c.b3) < POLE_TOLERANCE:
        raise PoleProximityError(f"s={s!r} is too close to the step-input pole at 0")

    vs1 = drive.v_s1 / s
    vs2 = drive.v_s2 / s
    vs3 = drive.v_s3 / s
    den_a = (1.0 + c.b1 * s) * (1.0 + c.b2 * s) * (1.0 + c.b3 * s)
    den_b = (1.0 + c.b4 * s) * (1.0 + c.b5 * s)

    def aggressor(near: complex, victim: complex, far: complex) -> complex:
        return (
            (1.0 + c.a1 * s + c.a2 * s * s) * near
            + (c.a3 * s + c.a4 * s * s) * victim
            + c.a5 * s * s * far
        ) / den_a

    v_a = aggressor(vs1, vs2, vs3)
    v_c = aggressor(vs3, vs2, vs1)
    v_b = (c.a6 * s * vs1 + (1.0 + c.a7 * s) * vs2 + c.a8 * s * vs3) / den_b
    return v_a, v_b, v_c


def step_response_victim(mode: CrosstalkMode, line: LineRC, t):
    """Victim node voltage at time t for a rising step in the given mode.

    Accepts a scalar or an ndarray of times (seconds, >= 0) and returns
    volts with the same shape. See the module docstring for the three
    closed forms and the caveat on the out-of-phase one.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise ValueError("t must be >= 0")
    fast = np.exp(-t / line.tau_ground)
    if mode is CrosstalkMode.IN_PHASE:
        out = (1.0 - fast) * line.v_dd
    elif mode is CrosstalkMode.QUIET:
        slow = np.exp(-t / line.tau_coupled)
        out = (1.0 - fast / 3.0 - 2.0 * slow / 3.0) * line.v_dd
    elif mode is CrosstalkMode.OUT_OF_PHASE:
        slow = np.exp(-t / line.tau_coupled)
        out = (1.0 + 2.0 * fast / 3.0 - 2.0 * slow / 3.0) * line.v_dd
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return out if out.shape else float(out)


def threshold_delay(
    mode: CrosstalkMode, line: LineRC, threshold_fraction: float = 0.5
) -> float:
    """First time the victim response reaches threshold_fraction * v_dd.

    Brackets the crossing on [0, 100 * max time constant] with a linear
    scan, then bisects to 1e-6 relative precision. For the out-of-phase
    form, which starts at v_dd, the smallest such time is 0.

    Raises:
        NoCrossingError: if the response stays below the threshold over
            the whole bracket.
    """
    if not 0.0 < threshold_fraction < 1.0:
        raise ValueError("threshold_fraction must be in (0, 1)")
    target = threshold_fraction * line.v_dd
    if step_response_victim(mode, line, 0.0) >= target:
        return 0.0

    t_max = 100.0 * max(line.tau_ground, line.tau_coupled)
    grid = np.linspace(0.0, t_max, 4097)
    values = step_response_victim(mode, line, grid)
    above = np.nonzero(values >= target)[0]
    if len(above) == 0:
        raise NoCrossingError(
            f"{mode.value} response stays below {threshold_fraction} * v_dd "
            f"within 100 time constants"
        )
    hi = grid[above[0]]
    lo = grid[above[0] - 1]
    while (hi - lo) > 1e-6 * hi:
        mid = 0.5 * (lo + hi)
        if step_response_victim(mode, line, mid) >= target:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def first_order_delay(mode: CrosstalkMode, line: LineRC) -> float:
    """Half-swing delay of the linearized victim response.

    Expanding each exponential to first order (and folding C into the
    slow term's 3*C_c, which assumes C_c dominates C) gives

        in-phase:      (R*C) / 2
        quiet:         (1/2) / (1/(3*R*C) + 2/(9*R*C_c))
        out-of-phase:  (1/2) / (2/(3*R*C) - 2/(9*R*C_c))

    The quiet and out-of-phase forms require c_c > 0. The out-of-phase
    denominator changes sign when 3*C_c <= C; there the linearized model
    has no half-swing crossing.

    Raises:
        DegenerateDelayError: out-of-phase with a non-positive denominator.
    """
    rc = line.tau_ground
    if mode is CrosstalkMode.IN_PHASE:
        return rc / 2.0
    if line.c_c <= 0.0:
        raise ValueError(f"{mode.value} linearized delay requires c_c > 0")
    rcc = line.r * line.c_c
    if mode is CrosstalkMode.QUIET:
        return 0.5 / (1.0 / (3.0 * rc) + 2.0 / (9.0 * rcc))
    if mode is CrosstalkMode.OUT_OF_PHASE:
        denom = 2.0 / (3.0 * rc) - 2.0 / (9.0 * rcc)
        if denom <= 0.0:
            raise DegenerateDelayError(
                f"out-of-phase linearized delay is undefined for "
                f"c_c <= c/3 (c={line.c!r}, c_c={line.c_c!r})"
            )
        return 0.5 / denom
    raise ValueError(f"unknown mode {mode!r}")


def pole_time_constants(coeffs: LumpCoefficients) -> tuple[float, float, float]:
    """The three distinct network time constants {R*C, R*(C+C_c), R*(C+3*C_c)}."""
    return (coeffs.b1, coeffs.b2, coeffs.b3)


def taylor_inversion_reference(mode: CrosstalkMode, line: LineRC) -> float:
    """Linearized delay doubled, i.e. the delay whose pair inversion by the
    extraction formulas returns (c, c_c) unchanged. Used by the forward
    model that synthesizes quiet / out-of-phase measurements.
    """
    return 2.0 * first_order_delay(mode, line)
