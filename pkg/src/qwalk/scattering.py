"""Transmission and reflection amplitudes of the two-tail scattering problem.

For a plane wave of eigenphase ``theta`` incident on the entry tail, the
stationary state determines a transmission amplitude ``t(theta)`` onto the
exit tail and a reflection amplitude ``r(theta)`` back onto the entry tail.
Both are defined as amplitude ratios against the incident wave, referenced
at the edges adjacent to the attachment vertices:

    t(theta) = <first outgoing exit-tail edge>  / <incoming entry-tail edge>
    r(theta) = <first outgoing entry-tail edge> / <incoming entry-tail edge>

With this normalization the coefficient of ``z^n`` in ``t(z)``, the analytic
extension obtained by replacing ``exp(i theta)`` with a complex ``z`` inside
the unit disc, is the amplitude to first reach the monitored exit edge in
exactly ``n`` steps.  That makes ``|c_n|^2`` directly comparable with the
monitored walk's first-arrival probabilities, and the angular average of
``|t|^2`` equal to their sum.

The stationary condition is a square linear system over the internal
directed-edge amplitudes plus ``r`` and ``t`` (dimension ``2 E + 2``).  It
is solved by dense LU with partial pivoting; at eigenphases that coincide
with a bound-state eigenvalue the matrix is singular but the system stays
consistent (bound states carry no tail amplitude), and a least-squares
fallback recovers the unique ``t`` and ``r``.
"""

from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .engine import internal_block
from .graph import EdgeState, Graph

#: Residual tolerance (relative to solution scale) accepted for a solve.
RESIDUAL_TOL = 1e-10

#: Condition estimate above which a resonance warning is emitted.
CONDITION_WARN = 1e12

#: Largest sampled |t| tolerated before suspecting a pole near the circle.
POLE_GUARD = 1e6


class ScatteringSingularError(RuntimeError):
    """The stationary system is singular and inconsistent at this point."""

    def __init__(self, z: complex, residual: float):
        theta = float(np.angle(z))
        super().__init__(
            f"scattering system is singular at z = {z:.12g} "
            f"(theta = {theta:.12g}, possible resonance); residual {residual:.3e}"
        )
        self.z = z
        self.theta = theta
        self.residual = residual


class PoleProximityError(RuntimeError):
    """Sampled transmission values blew up; a pole is near the sample circle."""


class ResonanceWarning(UserWarning):
    """A solve ran close to a resonance (ill-conditioned system)."""


@dataclass
class ScatteringSolution:
    """Stationary scattering state at one eigenphase."""

    theta: float
    t: complex
    r: complex
    internal: np.ndarray
    states: tuple[EdgeState, ...]
    direction: str
    residual: float
    condition: float

    @property
    def flux_defect(self) -> float:
        """|  |t|^2 + |r|^2 - 1 |; zero on the unit circle by unitarity."""
        return abs(abs(self.t) ** 2 + abs(self.r) ** 2 - 1.0)

    def internal_amplitude(self, state: EdgeState) -> complex:
        try:
            return complex(self.internal[self.states.index(state)])
        except ValueError:
            raise ValueError(f"{state} is not an internal directed edge") from None


@dataclass
class TransmissionSeries:
    """Taylor coefficients of the analytically extended transmission amplitude.

    ``coefficients[n]`` approximates the ``z^n`` coefficient of ``t(z)``,
    recovered from ``sample_count`` samples on the circle of radius
    ``rho``.  ``q()[n] = |c_n|^2`` is the first-arrival probability at
    step ``n``.
    """

    coefficients: np.ndarray
    rho: float
    sample_count: int

    @property
    def n_max(self) -> int:
        return len(self.coefficients) - 1

    def q(self) -> np.ndarray:
        return np.abs(self.coefficients) ** 2

    @property
    def tail_estimate(self) -> float:
        """Convergence diagnostic: largest |c_n|^2 among the trailing coefficients.

        A window (up to the last 8 coefficients) rather than the very last
        one, because arrival series are often supported on an arithmetic
        progression and a single trailing coefficient can sit on a
        structural zero while mass remains nearby.
        """
        window = self.q()[-min(8, len(self.coefficients)):]
        return float(np.max(window))


def _assemble(graph: Graph, direction: str):
    """Stationary-system matrices: x = z K x + z b0 with x = (internal, r, t)."""
    if direction not in ("left", "right"):
        raise ValueError(f"direction must be 'left' or 'right', got {direction!r}")
    source, sink = (
        (graph.entry, graph.exit) if direction == "left" else (graph.exit, graph.entry)
    )
    block, states = internal_block(graph)
    index = {s: i for i, s in enumerate(states)}
    m0 = len(states)
    r_row, t_row = m0, m0 + 1

    k = np.zeros((m0 + 2, m0 + 2), dtype=complex)
    k[:m0, :m0] = block
    b0 = np.zeros(m0 + 2, dtype=complex)

    for vertex, out_row in ((source, r_row), (sink, t_row)):
        m = graph.coin_matrix(vertex)
        slots = graph.coin_slots(vertex)
        for a, slot in enumerate(slots):
            if slot.edge_id is None:
                continue
            k[out_row, index[EdgeState(slot.neighbor, vertex, slot.edge_id)]] = m[0, a]
        if vertex == source:
            b0[out_row] = m[0, 0]

    # incident amplitude feeding the internal edges that leave the source
    m = graph.coin_matrix(source)
    for c, slot in enumerate(graph.coin_slots(source)):
        if slot.edge_id is None:
            continue
        b0[index[EdgeState(source, slot.neighbor, slot.edge_id)]] = m[c, 0]

    return k, b0, states, r_row, t_row


def _solve_linear(a: np.ndarray, b: np.ndarray, z: complex) -> tuple[np.ndarray, float]:
    """LU solve with a least-squares fallback for singular-but-consistent systems.

    The residual criterion is absolute (scaled by the data, never by the
    solution): on the closed unit disc the true solution is bounded, so a
    huge solution with a small relative residual is a null-space-polluted
    LU artifact at a resonance, not an answer.  The SVD-based fallback
    discards the null component, which carries no tail amplitude, leaving
    ``t`` and ``r`` unique.
    """
    tol = RESIDUAL_TOL * (1.0 + float(np.max(np.abs(b), initial=0.0)))

    def residual(x: np.ndarray) -> float:
        return float(np.max(np.abs(a @ x - b)))

    x = None
    try:
        x = np.linalg.solve(a, b)
    except np.linalg.LinAlgError:
        pass
    if x is not None:
        res = residual(x)
        if np.isfinite(res) and res <= tol:
            return x, res
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    res = residual(x)
    if not np.isfinite(res) or res > tol:
        raise ScatteringSingularError(z, res)
    return x, res


def _solve_at(system, z: complex) -> tuple[complex, complex, np.ndarray, float]:
    k, b0, _, r_row, t_row = system
    a = z * k - np.eye(k.shape[0])
    x, res = _solve_linear(a, -z * b0, z)
    return complex(x[t_row]), complex(x[r_row]), x, res


def _thread_count() -> int:
    raw = os.environ.get("QWALK_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _sweep(graph: Graph, zs: np.ndarray, direction: str) -> tuple[np.ndarray, np.ndarray]:
    """Transmission and reflection at every sample point, in input order.

    Independent solves over the shared immutable system; parallelized over
    up to ``QWALK_THREADS`` threads.
    """
    system = _assemble(graph, direction)
    workers = min(_thread_count(), len(zs))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda z: _solve_at(system, z)[:2], zs))
    else:
        results = [_solve_at(system, z)[:2] for z in zs]
    ts = np.array([tr[0] for tr in results], dtype=complex)
    rs = np.array([tr[1] for tr in results], dtype=complex)
    return ts, rs


def solve_scattering(
    graph: Graph, theta: float, direction: str = "left"
) -> ScatteringSolution:
    """Solve the stationary scattering problem at eigenphase ``theta``.

    Parameters
    ----------
    graph:
        Validated graph.
    theta:
        Real eigenphase; the walk eigenvalue is ``exp(-i theta)``.
    direction:
        ``"left"`` for a wave incident on the entry tail, ``"right"`` for
        the exit tail (the roles of the two tails swap).

    Returns
    -------
    ScatteringSolution
        Amplitudes ``t``, ``r`` and all internal directed-edge amplitudes,
        normalized to unit incident amplitude on the tail edge entering the
        source vertex.

    Raises
    ------
    ScatteringSingularError
        If the stationary system is singular and genuinely inconsistent.
    """
    system = _assemble(graph, direction)
    z = complex(np.exp(1j * float(theta)))
    t, r, x, res = _solve_at(system, z)
    a = z * system[0] - np.eye(system[0].shape[0])
    condition = float(np.linalg.cond(a))
    if condition > CONDITION_WARN:
        warnings.warn(
            f"scattering solve at theta = {float(theta):.12g} is ill-conditioned "
            f"(estimate {condition:.3e}); eigenphase may sit on a resonance",
            ResonanceWarning,
            stacklevel=2,
        )
    m0 = len(system[2])
    return ScatteringSolution(
        theta=float(theta),
        t=t,
        r=r,
        internal=x[:m0],
        states=system[2],
        direction=direction,
        residual=res,
        condition=condition,
    )


def transmission_at(graph: Graph, z: complex, direction: str = "left") -> complex:
    """Analytically extended transmission amplitude at a complex point.

    Meaningful for ``|z| <= 1``; the extension is obtained by substituting
    ``z`` for ``exp(i theta)`` in the stationary system, whose coefficients
    are polynomial in that variable.
    """
    system = _assemble(graph, direction)
    return _solve_at(system, complex(z))[0]


def default_sample_count(n_max: int) -> int:
    """Smallest power of two usable for extracting ``n_max + 1`` coefficients."""
    n = 1024
    while n < 16 * n_max:
        n *= 2
    return n


def transmission_series(
    graph: Graph,
    n_max: int,
    rho: float = 1.0,
    samples: int | None = None,
    direction: str = "left",
) -> TransmissionSeries:
    """Taylor coefficients ``c_0 .. c_n_max`` of the extended transmission.

    ``t(z)`` is sampled at ``samples`` equispaced points on the circle of
    radius ``rho`` and the coefficients are read off the discrete Fourier
    transform, ``c_n = DFT_n / (samples rho^n)``.  Since the amplitude is
    analytic past the unit circle the aliasing error decays geometrically
    in the sample count; ``rho = 1`` is the default and shrinking it
    amplifies coefficient noise by ``rho^-n``.

    Raises
    ------
    PoleProximityError
        If a sampled value exceeds ``POLE_GUARD``, indicating a pole close
        to the sample circle; lower ``rho`` in that case.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be non-negative, got {n_max}")
    if not 0.0 < rho <= 1.0:
        raise ValueError(f"rho must be in (0, 1], got {rho}")
    n = default_sample_count(n_max) if samples is None else int(samples)
    if n & (n - 1) or n < max(1024, 16 * n_max):
        raise ValueError(
            f"samples must be a power of two >= max(1024, 16 n_max), got {n}"
        )
    zs = rho * np.exp(2j * np.pi * np.arange(n) / n)
    ts, _ = _sweep(graph, zs, direction)
    peak = float(np.max(np.abs(ts)))
    if peak > POLE_GUARD:
        raise PoleProximityError(
            f"sampled |t| reached {peak:.3e}; a pole of the extension is close "
            f"to the radius-{rho} circle, retry with a smaller rho"
        )
    coeffs = np.fft.fft(ts)[: n_max + 1] / n
    coeffs /= rho ** np.arange(n_max + 1)
    return TransmissionSeries(coefficients=coeffs, rho=rho, sample_count=n)


def converged_transmission_series(
    graph: Graph,
    n_max: int,
    rho: float = 1.0,
    direction: str = "left",
    tol: float = 1e-10,
    max_samples: int = 1 << 17,
) -> TransmissionSeries:
    """Coefficient extraction with the sample count grown until stable.

    Long-lived internal resonances make the coefficients decay slowly, so
    a fixed sample count can alias late arrivals into the early
    coefficients.  Doubling the count until two consecutive extractions
    agree to ``tol`` (in the probabilities) bounds that aliasing
    empirically.  Raises if ``max_samples`` is reached without agreement.
    """
    samples = default_sample_count(n_max)
    series = transmission_series(graph, n_max, rho=rho, samples=samples, direction=direction)
    while samples < max_samples:
        samples *= 2
        refined = transmission_series(graph, n_max, rho=rho, samples=samples, direction=direction)
        if float(np.max(np.abs(refined.q() - series.q()))) <= tol:
            return refined
        series = refined
    raise PoleProximityError(
        f"coefficient extraction did not stabilize below {tol:g} with "
        f"{max_samples} samples; a resonance sits too close to the unit circle"
    )


def scan_circle(
    graph: Graph, samples: int, rho: float = 1.0, direction: str = "left"
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Transmission and reflection at equispaced angles on a circle.

    Returns ``(thetas, t_values, r_values)`` with ``thetas[k] = 2 pi k / samples``
    and the amplitudes evaluated at ``rho * exp(i theta_k)``.
    """
    if samples < 1:
        raise ValueError(f"samples must be positive, got {samples}")
    if not 0.0 < rho <= 1.0:
        raise ValueError(f"rho must be in (0, 1], got {rho}")
    thetas = 2.0 * np.pi * np.arange(samples) / samples
    ts, rs = _sweep(graph, rho * np.exp(1j * thetas), direction)
    return thetas, ts, rs


def p_out_spectral(graph: Graph, samples: int = 1024, direction: str = "left") -> float:
    """Total transmission probability as the angular average of ``|t|^2``.

    Equispaced sampling integrates trigonometric polynomials exactly up to
    aliasing, and the integrand is analytic, so the default 1024 samples
    are far beyond desk-scale accuracy needs.
    """
    if samples < 1024:
        raise ValueError(f"samples must be >= 1024, got {samples}")
    zs = np.exp(2j * np.pi * np.arange(samples) / samples)
    ts, _ = _sweep(graph, zs, direction)
    return float(np.mean(np.abs(ts) ** 2))


def p_out_series(series: TransmissionSeries) -> float:
    """Total transmission probability as the summed first-arrival series.

    Sums ``|c_n|^2`` for ``n = 1 .. n_max``; compare
    ``series.tail_estimate`` against the working tolerance to judge
    convergence.
    """
    return float(np.sum(series.q()[1:]))


def left_right_defect(graph: Graph, samples: int = 64) -> float:
    """Max pointwise gap between left and right transmission amplitudes."""
    thetas = 2.0 * np.pi * np.arange(samples) / samples
    zs = np.exp(1j * thetas)
    t_left, _ = _sweep(graph, zs, "left")
    t_right, _ = _sweep(graph, zs, "right")
    return float(np.max(np.abs(t_left - t_right)))
