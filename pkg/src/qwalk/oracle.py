"""Brute-force path-sum amplitudes, used as ground truth for small runs.

Enumerates every directed-edge path of a given length, multiplying the coin
entry picked up at each visited endpoint, and sums the products per final
state.  The dynamics are re-derived here from the transition rule alone,
on purpose sharing no machinery with the step operator, so agreement
between the two is evidence rather than tautology.  Tails are unbounded
(a path of length n can only ever reach tail vertex n), so no truncation
enters.

Cost is exponential in the step count; calls beyond ``MAX_STEPS`` are
refused.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .graph import EdgeState, Graph, vertex_coins

MAX_STEPS = 16

_TAIL_RE = re.compile(r"^(in|out)([1-9][0-9]*)$")

_State = tuple  # (src, dst, edge_id), endpoints int or tail label


@dataclass
class PathAmplitude:
    """Summed amplitude of all length-``n`` paths from a fixed start."""

    n: int
    target: EdgeState
    amplitude: complex
    path_count: int


def _successor_table(graph: Graph):
    """Per-vertex transitions keyed by (vertex, arrival edge id or None)."""
    coins = vertex_coins(graph)
    table: dict[tuple, list[tuple[_State, complex]]] = {}
    for v in graph.vertices:
        slots = graph.coin_slots(v)
        m = coins[v]
        side = "in" if v == graph.entry else "out"
        for a, slot_a in enumerate(slots):
            succ = []
            for c, slot_c in enumerate(slots):
                amp = m[c, a]
                if amp == 0:
                    continue
                if slot_c.edge_id is None:
                    succ.append(((v, f"{side}1", f"{side}:1"), complex(amp)))
                else:
                    succ.append(((v, slot_c.neighbor, slot_c.edge_id), complex(amp)))
            table[(v, slot_a.edge_id)] = succ
    return table


def _tail_successor(graph: Graph, state: _State) -> tuple[_State, complex]:
    # free propagation on a tail vertex: single outgoing continuation
    src, dst, _ = state
    side, k = _TAIL_RE.match(dst).groups()
    k = int(k)
    attach = graph.entry if side == "in" else graph.exit
    inner = attach if k == 1 else f"{side}{k - 1}"
    if src == inner:
        return (dst, f"{side}{k + 1}", f"{side}:{k + 1}"), 1.0 + 0j
    return (dst, inner, f"{side}:{k}"), 1.0 + 0j


def _validate_state(graph: Graph, state: EdgeState, what: str) -> _State:
    src, dst, eid = state.src, state.dst, state.edge_id
    for u, v, known in graph.edges:
        if known == eid:
            if {src, dst} != {u, v}:
                raise ValueError(f"{what} {state}: edge {eid!r} joins {u} and {v}")
            return (src, dst, eid)
    m = re.match(r"^(in|out):([1-9][0-9]*)$", eid)
    if m:
        side, k = m.group(1), int(m.group(2))
        attach = graph.entry if side == "in" else graph.exit
        inner = attach if k == 1 else f"{side}{k - 1}"
        outer = f"{side}{k}"
        if {src, dst} == {inner, outer}:
            return (src, dst, eid)
        raise ValueError(f"{what} {state}: tail edge {eid!r} joins {inner} and {outer}")
    raise ValueError(f"{what} {state}: unknown edge {eid!r}")


def path_amplitudes(graph: Graph, initial: EdgeState, n: int) -> dict[EdgeState, PathAmplitude]:
    """Amplitude and path count at every state reachable in exactly ``n`` steps.

    Paths whose coin factor vanishes exactly are pruned and not counted.
    """
    if n < 0:
        raise ValueError(f"step count must be non-negative, got {n}")
    if n > MAX_STEPS:
        raise ValueError(
            f"path enumeration grows exponentially; {n} steps exceeds the "
            f"guard of {MAX_STEPS}"
        )
    start = _validate_state(graph, initial, "initial state")
    table = _successor_table(graph)
    internal = set(graph.vertices)

    sums: dict[_State, complex] = {}
    counts: dict[_State, int] = {}
    stack: list[tuple[_State, complex, int]] = [(start, 1.0 + 0j, 0)]
    while stack:
        state, amp, depth = stack.pop()
        if depth == n:
            sums[state] = sums.get(state, 0j) + amp
            counts[state] = counts.get(state, 0) + 1
            continue
        dst = state[1]
        if dst in internal:
            eid = state[2]
            key = (dst, None if eid.startswith(("in:", "out:")) else eid)
            for nxt, factor in table[key]:
                stack.append((nxt, amp * factor, depth + 1))
        else:
            nxt, factor = _tail_successor(graph, state)
            stack.append((nxt, amp * factor, depth + 1))

    return {
        EdgeState(*state): PathAmplitude(
            n=n, target=EdgeState(*state), amplitude=total, path_count=counts[state]
        )
        for state, total in sums.items()
    }


def path_sum(graph: Graph, initial: EdgeState, target: EdgeState, n: int) -> PathAmplitude:
    """Summed amplitude of all length-``n`` paths from ``initial`` to ``target``."""
    tgt = EdgeState(*_validate_state(graph, target, "target state"))
    hits = path_amplitudes(graph, initial, n)
    if tgt in hits:
        return hits[tgt]
    return PathAmplitude(n=n, target=tgt, amplitude=0j, path_count=0)


def total_probability(graph: Graph, initial: EdgeState, n: int) -> float:
    """Sum of squared path-sum amplitudes over all endpoints; 1 if unitary."""
    hits = path_amplitudes(graph, initial, n)
    return float(sum(abs(p.amplitude) ** 2 for p in hits.values()))
