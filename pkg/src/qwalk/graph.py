"""Finite graphs with two semi-infinite tails, edge states, and vertex coins.

The walk lives on directed edge states: an undirected edge between endpoints
``A`` and ``B`` carries the two orthogonal states ``A>B`` and ``B>A``.  Two
half-infinite lines of freely transmitting vertices (the tails) are attached
at the distinguished ``entry`` and ``exit`` vertices; a run materializes a
finite stretch of each tail, long enough that the truncated end is never
reached.

Conventions used throughout the package:

- internal vertices are integers; materialized tail vertices are labeled
  ``in1 .. inL`` on the entry side and ``out1 .. outL`` on the exit side,
- edge ids are strings, unique across the graph; tail edges get synthetic
  ids ``in:k`` / ``out:k`` where edge ``k`` joins tail vertex ``k`` to its
  inner neighbor,
- the coin at a vertex of total degree ``n`` is an ``n x n`` unitary whose
  rows and columns are indexed by the incident edges sorted by
  ``(neighbor id, edge id)``; at the entry and exit vertex slot 0 is
  reserved for the tail edge,
- a coin entry ``M[c, a]`` is the amplitude to leave along the edge in
  slot ``c`` after arriving along the edge in slot ``a``.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

import numpy as np

EndpointId = Union[int, str]

#: Tolerance for coin unitarity and the two equal-transmission constraints.
UNITARITY_TOL = 1e-12

_TAIL_VERTEX_RE = re.compile(r"^(in|out)([1-9][0-9]*)$")


class GraphValidationError(ValueError):
    """A graph violates a structural invariant.

    ``field`` points at the offending part of the input (JSON-path style),
    so command-line callers can report it.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class CoinValidationError(ValueError):
    """A coin specification is inconsistent or not unitary.

    ``residuals`` carries the numeric defects that triggered the rejection;
    for an equal-transmission coin these are the two constraint residuals.
    """

    def __init__(self, message: str, residuals: tuple[float, ...] = ()):
        super().__init__(message)
        self.residuals = residuals


# ---------------------------------------------------------------------------
# Coins
# ---------------------------------------------------------------------------

class CoinSpec:
    """Base marker for per-vertex coin specifications."""

    __slots__ = ()


@dataclass(frozen=True)
class Grover(CoinSpec):
    """Equal-transmission coin with r = 2/n - 1 and t = 2/n.

    This is the unique real solution with positive transmission of the
    equal-transmission unitarity constraints, for every degree n.  For
    n = 2 it degenerates to free propagation.
    """


@dataclass(frozen=True)
class Free(CoinSpec):
    """Perfect transmission (t = 1, r = 0); only defined for degree 2."""


@dataclass(frozen=True)
class EqualTransmission(CoinSpec):
    """Coin that reflects with amplitude ``r`` and transmits with ``t``.

    The pair must satisfy the two unitarity constraints for the vertex's
    actual degree; see :func:`validate_coin_constraints`.
    """

    r: complex
    t: complex


class CustomMatrix(CoinSpec):
    """Arbitrary unitary coin with rows/columns in the declared slot order.

    The slot order is the one documented in the module docstring: incident
    edges sorted by (neighbor id, edge id), with slot 0 = tail edge at the
    entry and exit vertices.  This generalizes beyond vertices that treat
    all incident edges equivalently.
    """

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise CoinValidationError(
                f"custom coin must be a square matrix, got shape {m.shape}"
            )
        m.setflags(write=False)
        self.matrix = m

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"CustomMatrix(dim={self.matrix.shape[0]})"

    def __eq__(self, other) -> bool:
        return isinstance(other, CustomMatrix) and np.array_equal(
            self.matrix, other.matrix
        )


def validate_coin_constraints(r: complex, t: complex, n: int) -> tuple[float, float]:
    """Return the two equal-transmission unitarity residuals for degree ``n``.

    residual1 = (n-1)|t|^2 + |r|^2 - 1
    residual2 = (n-2)|t|^2 + 2 Re(conj(r) t)

    Both vanish exactly when the coin with ``r`` on the diagonal and ``t``
    everywhere else is unitary.
    """
    r = complex(r)
    t = complex(t)
    residual1 = (n - 1) * abs(t) ** 2 + abs(r) ** 2 - 1.0
    residual2 = (n - 2) * abs(t) ** 2 + 2.0 * (r.conjugate() * t).real
    return residual1, residual2


def equal_transmission_matrix(r: complex, t: complex, n: int) -> np.ndarray:
    """Dense n x n coin with ``r`` on the diagonal and ``t`` off it."""
    m = np.full((n, n), complex(t), dtype=complex)
    np.fill_diagonal(m, complex(r))
    return m


def unitarity_defect_matrix(m: np.ndarray) -> float:
    """Max-entry defect of ``m.conj().T @ m`` from the identity."""
    d = m.conj().T @ m - np.eye(m.shape[0])
    return float(np.max(np.abs(d))) if d.size else 0.0


def make_coin(spec: CoinSpec, degree: int) -> np.ndarray:
    """Build the unitary coin matrix for ``spec`` at the given total degree.

    Parameters
    ----------
    spec:
        One of :class:`Grover`, :class:`Free`, :class:`EqualTransmission`,
        :class:`CustomMatrix`.
    degree:
        Total degree of the vertex, counting the tail edge at the entry
        and exit vertices.

    Returns
    -------
    numpy.ndarray
        Read-only complex matrix of shape (degree, degree), unitary to
        ``UNITARITY_TOL``.

    Raises
    ------
    CoinValidationError
        If the specification is inconsistent with the degree or fails the
        unitarity constraints beyond tolerance.
    """
    if degree < 1:
        raise CoinValidationError(f"coin degree must be >= 1, got {degree}")

    if isinstance(spec, Grover):
        m = equal_transmission_matrix(2.0 / degree - 1.0, 2.0 / degree, degree)
    elif isinstance(spec, Free):
        if degree != 2:
            raise CoinValidationError(
                f"free coin requires degree 2, vertex has degree {degree}"
            )
        m = equal_transmission_matrix(0.0, 1.0, 2)
    elif isinstance(spec, EqualTransmission):
        if degree == 1:
            defect = abs(abs(complex(spec.r)) - 1.0)
            if defect > UNITARITY_TOL:
                raise CoinValidationError(
                    f"degree-1 coin needs |r| = 1, got |r| = {abs(complex(spec.r))}",
                    residuals=(defect,),
                )
            m = np.array([[complex(spec.r)]], dtype=complex)
        else:
            res1, res2 = validate_coin_constraints(spec.r, spec.t, degree)
            if abs(res1) > UNITARITY_TOL or abs(res2) > UNITARITY_TOL:
                raise CoinValidationError(
                    f"equal-transmission coin (r={spec.r}, t={spec.t}) violates "
                    f"unitarity for degree {degree}: residuals ({res1:.6g}, {res2:.6g})",
                    residuals=(res1, res2),
                )
            m = equal_transmission_matrix(spec.r, spec.t, degree)
    elif isinstance(spec, CustomMatrix):
        m = np.array(spec.matrix, dtype=complex)
        if m.shape != (degree, degree):
            raise CoinValidationError(
                f"custom coin has shape {m.shape}, vertex needs ({degree}, {degree})"
            )
    else:
        raise CoinValidationError(f"unknown coin specification {spec!r}")

    defect = unitarity_defect_matrix(m)
    if defect > UNITARITY_TOL:
        raise CoinValidationError(
            f"coin is not unitary: max |U^H U - I| = {defect:.3e}",
            residuals=(defect,),
        )
    m.setflags(write=False)
    return m


# ---------------------------------------------------------------------------
# Graph
# ---------------------------------------------------------------------------

class CoinSlot(NamedTuple):
    """One row/column slot of a vertex coin.

    ``edge_id`` is None for the tail slot at the entry/exit vertex;
    ``neighbor`` is the opposite endpoint for internal slots.
    """

    edge_id: str | None
    neighbor: int | None


@dataclass(frozen=True)
class Graph:
    """Finite undirected multigraph with entry/exit attachment vertices.

    Parameters are normalized on construction: vertices are sorted, edge
    endpoints are stored as (min, max), edge ids are coerced to strings and
    edges are sorted by id.  Structural invariants are checked eagerly;
    coin consistency is checked when matrices are built.
    """

    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int, str], ...]
    entry: int
    exit: int
    coins: Mapping[int, CoinSpec] = field(default_factory=dict)

    def __post_init__(self):
        verts = []
        for i, v in enumerate(self.vertices):
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool):
                raise GraphValidationError(
                    f"vertex ids must be integers, got {v!r}", field=f"vertices[{i}]"
                )
            verts.append(int(v))
        if len(set(verts)) != len(verts):
            raise GraphValidationError("duplicate vertex ids", field="vertices")
        vset = set(verts)

        norm_edges = []
        seen_ids = set()
        for i, e in enumerate(self.edges):
            if len(e) != 3:
                raise GraphValidationError(
                    f"edge must be (u, v, edge_id), got {e!r}", field=f"edges[{i}]"
                )
            u, v, eid = e
            u, v, eid = int(u), int(v), str(eid)
            if u == v:
                raise GraphValidationError(
                    f"self-loop at vertex {u} (edge {eid!r}) is not allowed",
                    field=f"edges[{i}]",
                )
            for w in (u, v):
                if w not in vset:
                    raise GraphValidationError(
                        f"edge {eid!r} references unknown vertex {w}",
                        field=f"edges[{i}]",
                    )
            if eid in seen_ids:
                raise GraphValidationError(
                    f"duplicate edge id {eid!r}", field=f"edges[{i}]"
                )
            seen_ids.add(eid)
            norm_edges.append((min(u, v), max(u, v), eid))
        norm_edges.sort(key=lambda e: e[2])

        entry, exit_ = int(self.entry), int(self.exit)
        if entry not in vset:
            raise GraphValidationError(f"entry vertex {entry} not in vertices", field="entry")
        if exit_ not in vset:
            raise GraphValidationError(f"exit vertex {exit_} not in vertices", field="exit")
        if entry == exit_:
            raise GraphValidationError(
                "entry and exit vertices must differ", field="exit"
            )

        coins = {}
        for k, spec in dict(self.coins).items():
            k = int(k)
            if k not in vset:
                raise GraphValidationError(
                    f"coin declared for unknown vertex {k}", field=f"coins.{k}"
                )
            if not isinstance(spec, CoinSpec):
                raise GraphValidationError(
                    f"coin for vertex {k} is not a CoinSpec: {spec!r}",
                    field=f"coins.{k}",
                )
            coins[k] = spec

        deg = {v: 0 for v in verts}
        for u, v, _ in norm_edges:
            deg[u] += 1
            deg[v] += 1
        for v in verts:
            if deg[v] == 0 and v not in (entry, exit_):
                raise GraphValidationError(
                    f"vertex {v} has no incident edges", field="vertices"
                )
        for v in (entry, exit_):
            if deg[v] == 0 and v not in coins:
                raise GraphValidationError(
                    f"attachment vertex {v} has no internal edges; a degree-1 coin "
                    "must be declared explicitly to allow a bare tail",
                    field="edges",
                )

        object.__setattr__(self, "vertices", tuple(sorted(verts)))
        object.__setattr__(self, "edges", tuple(norm_edges))
        object.__setattr__(self, "entry", entry)
        object.__setattr__(self, "exit", exit_)
        object.__setattr__(self, "coins", coins)

    # -- structure ---------------------------------------------------------

    def incident_edges(self, vertex: int) -> list[tuple[str, int]]:
        """Internal edges at ``vertex`` as (edge_id, neighbor), slot-sorted."""
        inc = []
        for u, v, eid in self.edges:
            if u == vertex:
                inc.append((eid, v))
            elif v == vertex:
                inc.append((eid, u))
        inc.sort(key=lambda p: (p[1], p[0]))
        return inc

    def has_tail(self, vertex: int) -> bool:
        return vertex in (self.entry, self.exit)

    def internal_degree(self, vertex: int) -> int:
        return sum(1 for u, v, _ in self.edges if vertex in (u, v))

    def coin_dimension(self, vertex: int) -> int:
        """Total degree of the vertex, tail edge included."""
        return self.internal_degree(vertex) + (1 if self.has_tail(vertex) else 0)

    def coin_slots(self, vertex: int) -> list[CoinSlot]:
        """Ordered coin slots at ``vertex``; the tail slot comes first."""
        slots = []
        if self.has_tail(vertex):
            slots.append(CoinSlot(None, None))
        slots.extend(CoinSlot(eid, nb) for eid, nb in self.incident_edges(vertex))
        return slots

    def coin_spec(self, vertex: int) -> CoinSpec:
        return self.coins.get(vertex, Grover())

    def coin_matrix(self, vertex: int) -> np.ndarray:
        return make_coin(self.coin_spec(vertex), self.coin_dimension(vertex))

    @property
    def num_edges(self) -> int:
        return len(self.edges)


def vertex_coins(graph: Graph) -> dict[int, np.ndarray]:
    """Build and validate every vertex coin once."""
    return {v: graph.coin_matrix(v) for v in graph.vertices}


# ---------------------------------------------------------------------------
# Edge states and the indexed basis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EdgeState:
    """Directed edge state: the particle is on ``edge_id`` moving src -> dst."""

    src: EndpointId
    dst: EndpointId
    edge_id: str

    def reverse(self) -> "EdgeState":
        return EdgeState(self.dst, self.src, self.edge_id)

    def __str__(self) -> str:
        return f"{self.src}>{self.dst}#{self.edge_id}"


@dataclass(frozen=True)
class TailConfig:
    """Truncation of the two tails.

    ``truncation_length`` is the number of tail vertices materialized per
    side.  The outermost tail vertex is a dead end reflecting with phase +1,
    which keeps the step operator exactly unitary; runs must satisfy
    ``truncation_length >= steps + 1`` so the dead end is never exercised.
    """

    truncation_length: int
    boundary_phase: float = 1.0

    def __post_init__(self):
        if self.truncation_length < 1:
            raise ValueError(
                f"truncation_length must be >= 1, got {self.truncation_length}"
            )
        if self.boundary_phase != 1.0:
            raise ValueError("the dead-end reflection phase is fixed to +1")


class _Endpoint(NamedTuple):
    """Slot table entry: per-slot (incoming index, outgoing index) pairs."""

    kind: str  # "vertex" | "free" | "end"
    vertex: EndpointId
    slots: tuple[tuple[int, int], ...]


class EdgeBasis:
    """Bijection between directed edge states and dense indices.

    States are ordered by edge (internal edges sorted by edge id, then the
    entry tail inner-to-outer, then the exit tail) with the two directions
    of edge ``(u, v)`` adjacent: ``u>v`` at an even index, ``v>u`` right
    after it.
    """

    def __init__(self, graph: Graph, tails: TailConfig):
        self.graph = graph
        self.tails = tails

        edges: list[tuple[EndpointId, EndpointId, str]] = [
            (u, v, eid) for u, v, eid in graph.edges
        ]
        self._num_internal_edges = len(edges)
        for side, attach in (("in", graph.entry), ("out", graph.exit)):
            inner: EndpointId = attach
            for k in range(1, tails.truncation_length + 1):
                outer = f"{side}{k}"
                edges.append((inner, outer, f"{side}:{k}"))
                inner = outer

        states: list[EdgeState] = []
        for u, v, eid in edges:
            states.append(EdgeState(u, v, eid))
            states.append(EdgeState(v, u, eid))
        self.edges = tuple(edges)
        self.states = tuple(states)
        self._index = {s: i for i, s in enumerate(states)}

        rev = np.arange(len(states))
        rev[0::2] += 1
        rev[1::2] -= 1
        rev.setflags(write=False)
        self.reverse_perm = rev

        self._endpoints = self._build_endpoints()

    def _build_endpoints(self) -> tuple[_Endpoint, ...]:
        g, L = self.graph, self.tails.truncation_length
        endpoints: list[_Endpoint] = []
        for v in g.vertices:
            slots = []
            for slot in g.coin_slots(v):
                if slot.edge_id is None:
                    side = "in" if v == g.entry else "out"
                    slots.append(
                        (self.index(EdgeState(f"{side}1", v, f"{side}:1")),
                         self.index(EdgeState(v, f"{side}1", f"{side}:1")))
                    )
                else:
                    slots.append(
                        (self.index(EdgeState(slot.neighbor, v, slot.edge_id)),
                         self.index(EdgeState(v, slot.neighbor, slot.edge_id)))
                    )
            endpoints.append(_Endpoint("vertex", v, tuple(slots)))
        for side, attach in (("in", g.entry), ("out", g.exit)):
            for k in range(1, L + 1):
                here = f"{side}{k}"
                inner: EndpointId = attach if k == 1 else f"{side}{k - 1}"
                inner_slot = (
                    self.index(EdgeState(inner, here, f"{side}:{k}")),
                    self.index(EdgeState(here, inner, f"{side}:{k}")),
                )
                if k == L:
                    endpoints.append(_Endpoint("end", here, (inner_slot,)))
                else:
                    outer = f"{side}{k + 1}"
                    outer_slot = (
                        self.index(EdgeState(outer, here, f"{side}:{k + 1}")),
                        self.index(EdgeState(here, outer, f"{side}:{k + 1}")),
                    )
                    endpoints.append(_Endpoint("free", here, (inner_slot, outer_slot)))
        return tuple(endpoints)

    # -- queries -----------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.states)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def index(self, state: EdgeState) -> int:
        try:
            return self._index[state]
        except KeyError:
            raise ValueError(f"edge state {state} is not in the basis") from None

    def state(self, i: int) -> EdgeState:
        return self.states[i]

    def endpoints(self) -> tuple[_Endpoint, ...]:
        return self._endpoints

    def internal_state_indices(self) -> np.ndarray:
        return np.arange(2 * self._num_internal_edges)

    def tail_state_indices(self) -> np.ndarray:
        return np.arange(2 * self._num_internal_edges, self.size)

    def entry_start_state(self) -> EdgeState:
        """The canonical initial state: first entry-tail edge moving inward."""
        return EdgeState("in1", self.graph.entry, "in:1")

    def exit_monitor_state(self) -> EdgeState:
        """The monitored state: first exit-tail edge moving outward."""
        return EdgeState(self.graph.exit, "out1", "out:1")

    def basis_vector(self, state: EdgeState) -> np.ndarray:
        vec = np.zeros(self.size, dtype=complex)
        vec[self.index(state)] = 1.0
        return vec


def build_edge_basis(graph: Graph, tails: TailConfig) -> EdgeBasis:
    """Index all directed edge states of ``graph`` plus truncated tails.

    The map is a bijection onto ``range(2 * (E_internal + 2 L))`` with a
    deterministic ordering; reversal is the involution pairing indices
    ``2j <-> 2j + 1``.
    """
    return EdgeBasis(graph, tails)


def internal_edge_states(graph: Graph) -> tuple[EdgeState, ...]:
    """Directed states of the internal edges only, in basis order."""
    states: list[EdgeState] = []
    for u, v, eid in graph.edges:
        states.append(EdgeState(u, v, eid))
        states.append(EdgeState(v, u, eid))
    return tuple(states)


def parse_edge_state(graph: Graph, text: str) -> EdgeState:
    """Parse ``SRC>DST`` or ``SRC>DST#EDGEID`` into an :class:`EdgeState`.

    Endpoints are integers for internal vertices or tail labels such as
    ``in1`` / ``out2``.  The edge id may be omitted whenever the endpoint
    pair identifies a unique edge (always true on the tails).
    """
    m = re.match(r"^([^>#]+)>([^>#]+?)(?:#(.+))?$", text.strip())
    if not m:
        raise ValueError(f"cannot parse edge state {text!r}; expected SRC>DST[#EDGE]")
    src_s, dst_s, eid = m.group(1).strip(), m.group(2).strip(), m.group(3)

    def endpoint(tok: str) -> EndpointId:
        if _TAIL_VERTEX_RE.match(tok):
            return tok
        try:
            return int(tok)
        except ValueError:
            raise ValueError(
                f"endpoint {tok!r} is neither a vertex id nor a tail label"
            ) from None

    src, dst = endpoint(src_s), endpoint(dst_s)
    if eid is not None:
        return EdgeState(src, dst, eid)

    pair = {src, dst}
    tail_ids = []
    for side, attach in (("in", graph.entry), ("out", graph.exit)):
        prev: EndpointId = attach
        k = 1
        # tails are unbounded here; only resolve labels actually mentioned
        labels = [p for p in (src, dst) if isinstance(p, str) and p.startswith(side)]
        if labels:
            kmax = max(int(_TAIL_VERTEX_RE.match(p).group(2)) for p in labels)
            for k in range(1, kmax + 1):
                here = f"{side}{k}"
                if {prev, here} == pair:
                    tail_ids.append(f"{side}:{k}")
                prev = here
    internal_ids = [eid for u, v, eid in graph.edges if {u, v} == pair]
    candidates = internal_ids + tail_ids
    if len(candidates) != 1:
        raise ValueError(
            f"edge between {src} and {dst} is "
            + ("ambiguous; give SRC>DST#EDGE" if candidates else "not in the graph")
        )
    return EdgeState(src, dst, candidates[0])


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------

def _complex_from_json(value, where: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)
    ):
        return complex(value[0], value[1])
    raise GraphValidationError(
        f"expected a number or [re, im] pair, got {value!r}", field=where
    )


def _coin_from_json(value, where: str) -> CoinSpec:
    if isinstance(value, str):
        name = value.lower()
        if name == "grover":
            return Grover()
        if name == "free":
            return Free()
        raise GraphValidationError(f"unknown coin name {value!r}", field=where)
    if isinstance(value, dict):
        if "matrix" in value:
            rows = value["matrix"]
            if not isinstance(rows, list) or not rows:
                raise GraphValidationError(
                    "matrix coin must be a non-empty list of rows",
                    field=f"{where}.matrix",
                )
            mat = [
                [_complex_from_json(x, f"{where}.matrix[{i}][{j}]") for j, x in enumerate(row)]
                for i, row in enumerate(rows)
            ]
            try:
                return CustomMatrix(mat)
            except (CoinValidationError, ValueError) as exc:
                raise GraphValidationError(str(exc), field=f"{where}.matrix") from exc
        if "r" in value and "t" in value:
            return EqualTransmission(
                _complex_from_json(value["r"], f"{where}.r"),
                _complex_from_json(value["t"], f"{where}.t"),
            )
    raise GraphValidationError(
        f"coin must be 'grover', 'free', {{'r':..,'t':..}} or {{'matrix':..}}, got {value!r}",
        field=where,
    )


def _complex_to_json(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _coin_to_json(spec: CoinSpec):
    if isinstance(spec, Grover):
        return "grover"
    if isinstance(spec, Free):
        return "free"
    if isinstance(spec, EqualTransmission):
        return {"r": _complex_to_json(spec.r), "t": _complex_to_json(spec.t)}
    if isinstance(spec, CustomMatrix):
        return {"matrix": [[_complex_to_json(z) for z in row] for row in spec.matrix]}
    raise TypeError(f"cannot serialize coin {spec!r}")


def graph_from_json(data: Union[str, bytes, dict]) -> Graph:
    """Build a validated :class:`Graph` from its JSON form.

    Expected shape::

        {"vertices": [0, 1, 2, 3],
         "edges": [[0, 1, "e0"], [1, 2, "e1"], [0, 3, "e2"], [3, 2, "e3"]],
         "entry": 0, "exit": 2,
         "coins": {"0": "grover", "1": "free"}}

    Any vertex without a coin entry defaults to ``grover``.
    """
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise GraphValidationError(f"invalid JSON: {exc}", field="") from exc
    if not isinstance(data, dict):
        raise GraphValidationError("graph document must be a JSON object", field="")

    for key in ("vertices", "edges", "entry", "exit"):
        if key not in data:
            raise GraphValidationError(f"missing required key {key!r}", field=key)
    unknown = set(data) - {"vertices", "edges", "entry", "exit", "coins"}
    if unknown:
        raise GraphValidationError(
            f"unknown keys {sorted(unknown)}", field=sorted(unknown)[0]
        )
    if not isinstance(data["vertices"], list):
        raise GraphValidationError("vertices must be a list", field="vertices")
    if not isinstance(data["edges"], list):
        raise GraphValidationError("edges must be a list", field="edges")

    coins = {}
    raw_coins = data.get("coins", {})
    if not isinstance(raw_coins, dict):
        raise GraphValidationError("coins must be an object", field="coins")
    for key, value in raw_coins.items():
        try:
            vid = int(key)
        except (TypeError, ValueError):
            raise GraphValidationError(
                f"coin key {key!r} is not a vertex id", field=f"coins.{key}"
            ) from None
        coins[vid] = _coin_from_json(value, f"coins.{key}")

    def as_int(value, where):
        if isinstance(value, bool) or not isinstance(value, int):
            raise GraphValidationError(f"expected an integer, got {value!r}", field=where)
        return value

    edges = []
    for i, e in enumerate(data["edges"]):
        if not isinstance(e, list) or len(e) != 3:
            raise GraphValidationError(
                f"edge must be [u, v, edge_id], got {e!r}", field=f"edges[{i}]"
            )
        edges.append(
            (as_int(e[0], f"edges[{i}][0]"), as_int(e[1], f"edges[{i}][1]"), str(e[2]))
        )

    return Graph(
        vertices=tuple(as_int(v, f"vertices[{i}]") for i, v in enumerate(data["vertices"])),
        edges=tuple(edges),
        entry=as_int(data["entry"], "entry"),
        exit=as_int(data["exit"], "exit"),
        coins=coins,
    )


def graph_to_json(graph: Graph) -> dict:
    """Canonical JSON form of a graph (inverse of :func:`graph_from_json`)."""
    return {
        "vertices": list(graph.vertices),
        "edges": [[u, v, eid] for u, v, eid in graph.edges],
        "entry": graph.entry,
        "exit": graph.exit,
        "coins": {str(v): _coin_to_json(spec) for v, spec in sorted(graph.coins.items())},
    }


def load_graph(path) -> Graph:
    """Read a graph JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        return graph_from_json(fh.read())


def graph_hash(graph: Graph) -> str:
    """Stable content hash of the canonical JSON form."""
    payload = json.dumps(graph_to_json(graph), sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(payload.encode("utf-8")).hexdigest()


def load_fixture(name: str) -> Graph:
    """Load one of the bundled example graphs (``diamond``, ``line``, ...)."""
    fname = name if name.endswith(".json") else f"{name}.json"
    ref = resources.files("qwalk").joinpath("data", fname)
    try:
        text = ref.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ValueError(f"no bundled graph named {name!r}") from None
    return graph_from_json(text)
