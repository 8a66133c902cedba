import json

import numpy as np
import pytest

from qwalk import (
    CoinValidationError,
    CustomMatrix,
    EdgeState,
    EqualTransmission,
    Free,
    Graph,
    GraphValidationError,
    Grover,
    TailConfig,
    build_edge_basis,
    graph_from_json,
    graph_hash,
    graph_to_json,
    load_fixture,
    make_coin,
    parse_edge_state,
    validate_coin_constraints,
)

SPEC_DIAMOND = (
    '{"vertices":[0,1,2,3], "edges":[[0,1,"e0"],[1,2,"e1"],[0,3,"e2"],[3,2,"e3"]],'
    ' "entry":0, "exit":2, "coins":{"0":"grover","2":"grover","1":"free","3":"free"}}'
)


# ---------------------------------------------------------------------------
# coins
# ---------------------------------------------------------------------------

def test_grover_three_edges():
    m = make_coin(Grover(), 3)
    assert m[0, 0] == pytest.approx(-1 / 3)
    assert m[1, 0] == pytest.approx(2 / 3)
    assert np.allclose(np.diag(m), -1 / 3)
    assert m[0, 1] == m[2, 1] == pytest.approx(2 / 3)


def test_grover_degree_two_is_free():
    assert np.allclose(make_coin(Grover(), 2), [[0, 1], [1, 0]])
    assert np.allclose(make_coin(Free(), 2), [[0, 1], [1, 0]])


def test_free_requires_degree_two():
    with pytest.raises(CoinValidationError):
        make_coin(Free(), 3)


def test_equal_transmission_rejects_bad_pair():
    with pytest.raises(CoinValidationError) as exc:
        make_coin(EqualTransmission(0.5, 0.5), 3)
    res1, res2 = exc.value.residuals
    assert res1 == pytest.approx(-0.25)
    assert res2 == pytest.approx(0.75)


def test_constraint_residuals_exact_values():
    assert validate_coin_constraints(-1 / 3, 2 / 3, 3) == (0.0, 0.0)
    assert validate_coin_constraints(0.0, 1.0, 2) == (0.0, 0.0)
    for n in (2, 3, 5, 9):
        assert validate_coin_constraints(1.0, 0.0, n) == (0.0, 0.0)


@pytest.mark.parametrize(
    "r,t,n",
    [
        (-1 / 3, 2 / 3, 3),
        (0.0, 1.0, 2),
        (1j * np.sin(0.4), np.cos(0.4), 2),
        (-0.3 + np.sqrt(0.19) * 1j, 0.6, 3),  # complex solution, t real
        (2 / 5 - 1, 2 / 5, 5),
    ],
)
def test_accepted_coins_are_unitary(r, t, n):
    m = make_coin(EqualTransmission(r, t), n)
    assert np.max(np.abs(m.conj().T @ m - np.eye(n))) <= 1e-12


def test_custom_matrix_checked():
    with pytest.raises(CoinValidationError):
        make_coin(CustomMatrix([[1, 0], [1, 1]]), 2)
    with pytest.raises(CoinValidationError):
        make_coin(CustomMatrix([[0, 1], [1, 0]]), 3)
    m = make_coin(CustomMatrix([[0, 1j], [1, 0]]), 2)
    assert m[0, 1] == 1j


def test_degree_one_coin_is_a_phase():
    assert make_coin(Grover(), 1)[0, 0] == pytest.approx(1.0)
    with pytest.raises(CoinValidationError):
        make_coin(EqualTransmission(0.5, 0.0), 1)


# ---------------------------------------------------------------------------
# graph validation
# ---------------------------------------------------------------------------

def test_rejects_self_loop():
    with pytest.raises(GraphValidationError):
        Graph(vertices=(0, 1), edges=((0, 0, "e0"),), entry=0, exit=1)


def test_rejects_equal_entry_exit():
    with pytest.raises(GraphValidationError):
        Graph(vertices=(0, 1), edges=((0, 1, "e0"),), entry=0, exit=0)


def test_rejects_unknown_edge_endpoint():
    with pytest.raises(GraphValidationError):
        Graph(vertices=(0, 1), edges=((0, 7, "e0"),), entry=0, exit=1)


def test_rejects_duplicate_edge_ids():
    with pytest.raises(GraphValidationError):
        Graph(vertices=(0, 1, 2), edges=((0, 1, "e"), (1, 2, "e")), entry=0, exit=2)


def test_rejects_isolated_internal_vertex():
    with pytest.raises(GraphValidationError):
        Graph(vertices=(0, 1, 2), edges=((0, 2, "e0"),), entry=0, exit=2)


def test_empty_edge_list_rejected_by_default():
    with pytest.raises(GraphValidationError):
        Graph(vertices=(0, 1), edges=(), entry=0, exit=1)


def test_bare_tail_allowed_with_explicit_coin(mirror):
    # entry carries only its tail edge, sealed by an explicit 1x1 coin
    assert mirror.internal_degree(0) == 0
    assert mirror.coin_dimension(0) == 1
    assert mirror.coin_matrix(0)[0, 0] == 1.0


def test_parallel_edges_supported():
    g = Graph(vertices=(0, 1), edges=((0, 1, "a"), (0, 1, "b")), entry=0, exit=1)
    assert g.coin_dimension(0) == 3
    slots = g.coin_slots(0)
    assert slots[0].edge_id is None
    assert [s.edge_id for s in slots[1:]] == ["a", "b"]


def test_unspecified_coin_defaults_to_grover(diamond):
    g = Graph(vertices=(0, 1), edges=((0, 1, "e0"),), entry=0, exit=1)
    assert g.coin_spec(0) == Grover()
    assert diamond.coin_spec(1) == Free()


# ---------------------------------------------------------------------------
# edge basis
# ---------------------------------------------------------------------------

def test_basis_size_diamond(diamond):
    basis = build_edge_basis(diamond, TailConfig(3))
    assert basis.size == 2 * (4 + 3 + 3) == 20


def test_basis_size_single_edge():
    g = Graph(vertices=(0, 1), edges=((0, 1, "e0"),), entry=0, exit=1)
    basis = build_edge_basis(g, TailConfig(1))
    assert basis.size == 6


def test_basis_is_a_bijection(diamond):
    basis = build_edge_basis(diamond, TailConfig(3))
    for i in range(basis.size):
        assert basis.index(basis.state(i)) == i
    assert len({basis.index(s) for s in basis.states}) == basis.size


def test_reversal_is_an_involution(diamond):
    basis = build_edge_basis(diamond, TailConfig(4))
    perm = basis.reverse_perm
    assert np.array_equal(perm[perm], np.arange(basis.size))
    for i in range(basis.size):
        assert basis.state(perm[i]) == basis.state(i).reverse()
        assert basis.state(i).reverse().reverse() == basis.state(i)


def test_basis_rejects_unknown_state(diamond):
    basis = build_edge_basis(diamond, TailConfig(2))
    with pytest.raises(ValueError):
        basis.index(EdgeState(0, 2, "nope"))


def test_tail_config_validation():
    with pytest.raises(ValueError):
        TailConfig(0)
    with pytest.raises(ValueError):
        TailConfig(3, boundary_phase=-1.0)


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------

def test_documented_schema_parses_to_bundled_diamond(diamond):
    assert graph_from_json(SPEC_DIAMOND) == diamond


def test_json_roundtrip(diamond, twisted, mirror):
    for g in (diamond, twisted, mirror):
        assert graph_from_json(json.dumps(graph_to_json(g))) == g


def test_json_error_points_at_field():
    with pytest.raises(GraphValidationError) as exc:
        graph_from_json('{"vertices":[0,1], "edges":[[0,1,"e0"]], "entry":0}')
    assert exc.value.field == "exit"
    with pytest.raises(GraphValidationError) as exc:
        graph_from_json(
            '{"vertices":[0,1], "edges":[[0,1,"e0"]], "entry":0, "exit":1,'
            ' "coins":{"0":"wat"}}'
        )
    assert exc.value.field == "coins.0"


def test_graph_hash_is_stable_and_content_sensitive(diamond, line):
    assert graph_hash(diamond) == graph_hash(graph_from_json(SPEC_DIAMOND))
    assert graph_hash(diamond) != graph_hash(line)


# ---------------------------------------------------------------------------
# edge state parsing
# ---------------------------------------------------------------------------

def test_parse_edge_state_variants(diamond):
    assert parse_edge_state(diamond, "in1>0") == EdgeState("in1", 0, "in:1")
    assert parse_edge_state(diamond, "2>out1") == EdgeState(2, "out1", "out:1")
    assert parse_edge_state(diamond, "0>1#e0") == EdgeState(0, 1, "e0")
    assert parse_edge_state(diamond, "1>0") == EdgeState(1, 0, "e0")
    assert parse_edge_state(diamond, "in2>in1") == EdgeState("in2", "in1", "in:2")


def test_parse_edge_state_rejects_ambiguity_and_gaps():
    g = Graph(vertices=(0, 1), edges=((0, 1, "a"), (0, 1, "b")), entry=0, exit=1)
    with pytest.raises(ValueError):
        parse_edge_state(g, "0>1")
    assert parse_edge_state(g, "0>1#b") == EdgeState(0, 1, "b")
    with pytest.raises(ValueError):
        parse_edge_state(g, "0>9")
    with pytest.raises(ValueError):
        parse_edge_state(g, "garbage")
