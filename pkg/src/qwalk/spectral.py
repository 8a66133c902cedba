"""Bound states confined to the internal graph, and time-reversal checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .engine import build_step_operator, internal_block, run_walk
from .graph import EdgeState, Graph, TailConfig

#: Accepted deviation of a candidate eigenvalue from the unit circle.
MODULUS_TOL = 1e-8

#: Binding check: residual against the full step operator.
RESIDUAL_TOL = 1e-10


@dataclass
class BoundState:
    """Eigenstate of the walk supported entirely on internal edges."""

    eigenvalue: complex
    vector: np.ndarray
    states: tuple[EdgeState, ...]
    residual: float

    def amplitude(self, state: EdgeState) -> complex:
        try:
            return complex(self.vector[self.states.index(state)])
        except ValueError:
            raise ValueError(f"{state} is not an internal directed edge") from None


def _full_operator_residual(op, embedded: np.ndarray, eigenvalue: complex):
    image = op.apply(embedded)
    residual = float(np.linalg.norm(image - eigenvalue * embedded))
    leak = float(np.linalg.norm(image[op.basis.tail_state_indices()]))
    return residual, leak


def find_bound_states(graph: Graph) -> list[BoundState]:
    """All bound states of the walk on ``graph``.

    The step operator restricted to internal directed edges is a
    contraction whose unit-modulus eigenvectors leak nothing onto the
    tails, so its eigendecomposition yields every bound state.  Candidates
    within ``MODULUS_TOL`` of the unit circle are kept only if they pass
    the binding re-verification against the full truncated operator
    (eigen-residual and tail leakage both below ``RESIDUAL_TOL``).
    Degenerate eigenvalues return an orthonormal basis of the eigenspace.
    The result is independent of the tail truncation.
    """
    block, states = internal_block(graph)
    if block.size == 0:
        return []
    eigvals, eigvecs = np.linalg.eig(block)
    keep = np.abs(np.abs(eigvals) - 1.0) <= MODULUS_TOL
    if not np.any(keep):
        return []

    op = build_step_operator(graph, TailConfig(3))
    internal_idx = op.basis.internal_state_indices()

    def embed(vec: np.ndarray) -> np.ndarray:
        full = np.zeros(op.dim, dtype=complex)
        full[internal_idx] = vec
        return full

    # group candidate eigenvalues, orthonormalize within each group
    order = np.argsort(np.round(np.angle(eigvals[keep]), 9), kind="stable")
    grouped: list[tuple[complex, list[np.ndarray]]] = []
    for i in np.flatnonzero(keep)[order]:
        lam, vec = complex(eigvals[i]), eigvecs[:, i]
        for glam, gvecs in grouped:
            if abs(lam - glam) <= 10 * MODULUS_TOL:
                gvecs.append(vec)
                break
        else:
            grouped.append((lam, [vec]))

    found: list[BoundState] = []
    for _, gvecs in grouped:
        basis_q, _ = np.linalg.qr(np.column_stack(gvecs))
        for j in range(basis_q.shape[1]):
            vec = basis_q[:, j]
            vec = vec / np.linalg.norm(vec)
            lam = complex(vec.conj() @ (block @ vec))
            residual, leak = _full_operator_residual(op, embed(vec), lam)
            if residual <= RESIDUAL_TOL and leak <= RESIDUAL_TOL:
                found.append(
                    BoundState(
                        eigenvalue=lam, vector=vec, states=states, residual=residual
                    )
                )
    found.sort(key=lambda b: (round(np.angle(b.eigenvalue) % (2 * np.pi), 9)))
    return found


def check_time_reversal(graph: Graph) -> tuple[bool, float]:
    """Whether conjugating the step by edge reversal inverts it.

    The time-reversal map reverses every edge state and conjugates
    amplitudes.  Returns ``(holds, max_residual)`` where the residual is
    the max entrywise defect of ``T U T - U^H`` on a (small) truncated
    basis; tail coins are symmetric, so the verdict does not depend on the
    truncation.
    """
    op = build_step_operator(graph, TailConfig(2))
    u = op.dense()
    p = op.basis.reverse_perm
    tut = np.conj(u)[np.ix_(p, p)]
    residual = float(np.max(np.abs(tut - u.conj().T)))
    return residual <= RESIDUAL_TOL, residual


def bound_state_orthogonality(
    graph: Graph,
    steps: int,
    initial: Union[EdgeState, np.ndarray, None] = None,
) -> float:
    """Largest overlap between a tail-started walk and any bound state.

    Runs the unmonitored walk for ``steps`` steps from the first entry-tail
    edge (or a caller-supplied initial state, for diagnostics) and returns
    the max over steps and bound states of ``|<bound|psi_k>|``.  A graph
    with no bound states returns 0 by convention.
    """
    bound = find_bound_states(graph)
    if not bound:
        return 0.0
    op = build_step_operator(graph, TailConfig(steps + 1))
    internal_idx = op.basis.internal_state_indices()
    stack = np.zeros((len(bound), op.dim), dtype=complex)
    for i, b in enumerate(bound):
        stack[i, internal_idx] = b.vector
    if initial is None:
        initial = op.basis.entry_start_state()
    psi = run_walk(op, initial, 0).amplitudes
    worst = float(np.max(np.abs(stack.conj() @ psi)))
    for _ in range(steps):
        psi = op.apply(psi)
        worst = max(worst, float(np.max(np.abs(stack.conj() @ psi))))
    return worst
