"""One-step unitary assembly and plain / monitored walk execution.

A step sends the state ``A>B`` to ``sum_C M_B[slot(C), slot(A)] B>C`` where
``M_B`` is the coin at the receiving endpoint ``B``.  Tail vertices of
degree 2 transmit freely and the outermost tail vertex reflects with phase
+1, so the operator is exactly unitary on the truncated basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.sparse as sp

from .graph import (
    EdgeBasis,
    EdgeState,
    Graph,
    TailConfig,
    build_edge_basis,
    internal_edge_states,
    vertex_coins,
)

#: Below this edge count the step operator is stored dense.
DENSE_EDGE_LIMIT = 64

_FREE_COIN = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


class TruncationError(ValueError):
    """The materialized tails are too short for the requested run."""


@dataclass
class WalkState:
    """Amplitude vector over the edge basis after ``step_count`` steps."""

    amplitudes: np.ndarray
    step_count: int

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def amplitude(self, basis: EdgeBasis, state: EdgeState) -> complex:
        return complex(self.amplitudes[basis.index(state)])


@dataclass
class FirstArrivalRecord:
    """First-arrival probabilities from a monitored walk.

    ``q[n]`` is the probability that the particle is found on the monitored
    edge at step ``n`` for the first time (``q[0]`` is always 0; monitoring
    happens after each step).  Because the monitored amplitude is projected
    out without renormalizing, ``q`` sums with the surviving norm to 1.
    """

    q: np.ndarray
    final: WalkState

    @property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.q)

    @property
    def total(self) -> float:
        return float(np.sum(self.q))

    def bookkeeping_defect(self) -> float:
        """|sum(q) + remaining norm^2 - 1|, zero for exact arithmetic."""
        return abs(self.total + self.final.norm**2 - 1.0)


class StepOperator:
    """The one-step unitary over a truncated edge basis."""

    def __init__(self, basis: EdgeBasis, matrix):
        self.basis = basis
        self.matrix = matrix

    @property
    def dim(self) -> int:
        return self.basis.size

    @property
    def is_dense(self) -> bool:
        return isinstance(self.matrix, np.ndarray)

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec

    def dense(self) -> np.ndarray:
        return self.matrix if self.is_dense else self.matrix.toarray()


def build_step_operator(graph: Graph, tails: TailConfig) -> StepOperator:
    """Assemble the one-step unitary for ``graph`` with truncated tails.

    Each column holds the image of one directed edge state; the column of
    ``A>B`` has exactly deg(B) nonzeros, one per edge leaving ``B``.
    Dense storage is used for small graphs, CSR above ``DENSE_EDGE_LIMIT``
    edges.
    """
    basis = build_edge_basis(graph, tails)
    coins = vertex_coins(graph)
    end_coin = np.array([[tails.boundary_phase]], dtype=complex)

    rows: list[int] = []
    cols: list[int] = []
    vals: list[complex] = []
    for ep in basis.endpoints():
        if ep.kind == "vertex":
            m = coins[ep.vertex]
        elif ep.kind == "free":
            m = _FREE_COIN
        else:
            m = end_coin
        for a, (in_idx, _) in enumerate(ep.slots):
            for c, (_, out_idx) in enumerate(ep.slots):
                v = m[c, a]
                if v != 0:
                    rows.append(out_idx)
                    cols.append(in_idx)
                    vals.append(v)

    if basis.num_edges < DENSE_EDGE_LIMIT:
        mat = np.zeros((basis.size, basis.size), dtype=complex)
        mat[rows, cols] = vals
    else:
        mat = sp.csr_matrix(
            (vals, (rows, cols)), shape=(basis.size, basis.size), dtype=complex
        )
    return StepOperator(basis, mat)


def unitarity_defect(op: StepOperator) -> float:
    """Max entrywise defect of ``U^H U`` from the identity."""
    if op.is_dense:
        d = op.matrix.conj().T @ op.matrix - np.eye(op.dim)
        return float(np.max(np.abs(d)))
    d = (op.matrix.getH() @ op.matrix - sp.identity(op.dim, format="csr")).tocoo()
    return float(np.max(np.abs(d.data))) if d.nnz else 0.0


def _initial_vector(op: StepOperator, initial: Union[EdgeState, np.ndarray]) -> np.ndarray:
    if isinstance(initial, EdgeState):
        return op.basis.basis_vector(initial)
    vec = np.asarray(initial, dtype=complex)
    if vec.shape != (op.dim,):
        raise ValueError(
            f"initial vector has shape {vec.shape}, basis size is {op.dim}"
        )
    return vec.copy()


def _check_truncation(op: StepOperator, steps: int) -> None:
    if steps < 0:
        raise ValueError(f"steps must be non-negative, got {steps}")
    length = op.basis.tails.truncation_length
    if length < steps + 1:
        raise TruncationError(
            f"truncation_length {length} is too short for {steps} steps; "
            f"need at least {steps + 1} so the dead end is never reached"
        )


def run_walk(
    op: StepOperator, initial: Union[EdgeState, np.ndarray], steps: int
) -> WalkState:
    """Apply ``steps`` walk steps to a basis state or amplitude vector.

    Refuses to run if the tails are shorter than ``steps + 1``; within that
    guard the truncated dynamics agree exactly with infinite tails.
    """
    _check_truncation(op, steps)
    psi = _initial_vector(op, initial)
    for _ in range(steps):
        psi = op.apply(psi)
    return WalkState(psi, steps)


def run_measured_walk(
    op: StepOperator,
    initial: Union[EdgeState, np.ndarray],
    steps: int,
    exit_edge: EdgeState | None = None,
) -> FirstArrivalRecord:
    """Walk with per-step monitoring of the first exit-tail edge.

    After each step the probability on the monitored edge is recorded and
    its amplitude is set to zero; the walk continues without renormalizing,
    so ``q[n]`` is the joint probability of first arrival at step ``n``.
    Only the designated exit edge may be monitored.
    """
    monitor = op.basis.exit_monitor_state()
    if exit_edge is not None and exit_edge != monitor:
        raise ValueError(
            f"monitored edge must be the first exit-tail edge {monitor}, got {exit_edge}"
        )
    _check_truncation(op, steps)
    idx = op.basis.index(monitor)
    psi = _initial_vector(op, initial)
    q = np.zeros(steps + 1)
    for n in range(1, steps + 1):
        psi = op.apply(psi)
        amp = psi[idx]
        q[n] = abs(amp) ** 2
        psi[idx] = 0.0
    return FirstArrivalRecord(q=q, final=WalkState(psi, steps))


def internal_block(graph: Graph) -> tuple[np.ndarray, tuple[EdgeState, ...]]:
    """Step operator restricted to internal directed edges (tails projected out).

    Returns the dense block and the ordered internal states it is indexed
    by.  Its unit-modulus eigenvectors are exactly the walk's bound states,
    since a unit-modulus eigenvalue forces the amplitude leaking onto the
    tails to vanish.
    """
    states = internal_edge_states(graph)
    index = {s: i for i, s in enumerate(states)}
    n = len(states)
    block = np.zeros((n, n), dtype=complex)
    for v in graph.vertices:
        m = graph.coin_matrix(v)
        slots = graph.coin_slots(v)
        for a, slot_a in enumerate(slots):
            if slot_a.edge_id is None:
                continue
            col = index[EdgeState(slot_a.neighbor, v, slot_a.edge_id)]
            for c, slot_c in enumerate(slots):
                if slot_c.edge_id is None:
                    continue
                if m[c, a] != 0:
                    block[index[EdgeState(v, slot_c.neighbor, slot_c.edge_id)], col] = m[c, a]
    return block, states
