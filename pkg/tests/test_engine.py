import numpy as np
import pytest

from qwalk import (
    EdgeState,
    Graph,
    TailConfig,
    TruncationError,
    build_step_operator,
    internal_block,
    run_measured_walk,
    run_walk,
    unitarity_defect,
)


def free_chain(n_vertices):
    """Path graph whose interior vertices all transmit freely."""
    edges = tuple((i, i + 1, f"e{i}") for i in range(n_vertices - 1))
    return Graph(vertices=tuple(range(n_vertices)), edges=edges, entry=0,
                 exit=n_vertices - 1)


def test_free_line_moves_one_step_right(line):
    op = build_step_operator(line, TailConfig(4))
    state = run_walk(op, EdgeState(0, 1, "e0"), 1)
    assert state.amplitude(op.basis, EdgeState(1, 2, "e1")) == 1.0
    assert state.norm == pytest.approx(1.0, abs=1e-15)


def test_free_line_is_ballistic():
    g = free_chain(5)
    steps = 5  # in1 -> 0 -> 1 -> 2 -> 3 -> 4, then onto the exit tail
    op = build_step_operator(g, TailConfig(steps + 1))
    state = run_walk(op, op.basis.entry_start_state(), steps)
    assert state.amplitude(op.basis, op.basis.exit_monitor_state()) == 1.0


def test_zero_steps_is_identity(diamond):
    op = build_step_operator(diamond, TailConfig(1))
    initial = op.basis.entry_start_state()
    state = run_walk(op, initial, 0)
    assert np.array_equal(state.amplitudes, op.basis.basis_vector(initial))


def test_diamond_first_step_amplitudes(diamond):
    op = build_step_operator(diamond, TailConfig(2))
    state = run_walk(op, op.basis.entry_start_state(), 1)
    b = op.basis
    assert state.amplitude(b, EdgeState(0, "in1", "in:1")) == pytest.approx(-1 / 3)
    assert state.amplitude(b, EdgeState(0, 1, "e0")) == pytest.approx(2 / 3)
    assert state.amplitude(b, EdgeState(0, 3, "e2")) == pytest.approx(2 / 3)
    assert state.norm == pytest.approx(1.0, abs=1e-15)


def test_diamond_three_step_transmission_amplitude(diamond):
    # two arm paths, each contributing (2/3) * 1 * (2/3)
    op = build_step_operator(diamond, TailConfig(4))
    state = run_walk(op, op.basis.entry_start_state(), 3)
    amp = state.amplitude(op.basis, op.basis.exit_monitor_state())
    assert amp == pytest.approx(8 / 9, abs=1e-14)


def test_step_operator_unitary_dense_and_sparse(diamond):
    small = build_step_operator(diamond, TailConfig(3))
    large = build_step_operator(diamond, TailConfig(41))
    assert small.is_dense and not large.is_dense
    assert unitarity_defect(small) <= 1e-12
    assert unitarity_defect(large) <= 1e-12


def test_truncation_guard(diamond):
    op = build_step_operator(diamond, TailConfig(5))
    with pytest.raises(TruncationError):
        run_walk(op, op.basis.entry_start_state(), 5)
    run_walk(op, op.basis.entry_start_state(), 4)
    with pytest.raises(TruncationError):
        run_measured_walk(op, op.basis.entry_start_state(), 7)


def test_norm_conserved_over_ten_thousand_steps(diamond):
    op = build_step_operator(diamond, TailConfig(10001))
    psi = op.basis.basis_vector(op.basis.entry_start_state())
    worst = 0.0
    for _ in range(10000):
        psi = op.apply(psi)
        worst = max(worst, abs(np.linalg.norm(psi) - 1.0))
    assert worst <= 1e-12


def test_measured_walk_diamond_first_arrival(diamond):
    op = build_step_operator(diamond, TailConfig(41))
    record = run_measured_walk(op, op.basis.entry_start_state(), 40)
    assert record.q[3] == pytest.approx(64 / 81, abs=1e-12)
    assert record.q[7] == pytest.approx(64 / 6561, abs=1e-12)
    for n in range(41):
        if n % 4 != 3:
            assert record.q[n] <= 1e-12
    assert np.all(record.q >= 0.0)
    assert np.all(record.cumulative <= 1.0 + 1e-12)


def test_measured_walk_bookkeeping(diamond, line):
    for g in (diamond, line):
        op = build_step_operator(g, TailConfig(31))
        for steps in (1, 7, 30):
            record = run_measured_walk(op, op.basis.entry_start_state(), steps)
            assert record.bookkeeping_defect() <= 1e-10


def test_measured_walk_free_line_arrives_once(line):
    op = build_step_operator(line, TailConfig(11))
    record = run_measured_walk(op, op.basis.entry_start_state(), 10)
    assert record.q[3] == 1.0
    assert record.total == pytest.approx(1.0, abs=1e-14)
    assert np.sum(record.q > 1e-14) == 1


def test_measured_walk_rejects_other_monitor(diamond):
    op = build_step_operator(diamond, TailConfig(4))
    with pytest.raises(ValueError):
        run_measured_walk(op, op.basis.entry_start_state(), 2,
                          exit_edge=EdgeState(0, 1, "e0"))


def test_support_stays_within_reach(diamond):
    # after n steps the support sits inside the n-step ball of the start
    op = build_step_operator(diamond, TailConfig(8))
    pattern = (np.abs(op.dense()) > 0).astype(int)
    reach = np.zeros(op.dim, dtype=int)
    reach[op.basis.index(op.basis.entry_start_state())] = 1
    psi = op.basis.basis_vector(op.basis.entry_start_state())
    for _ in range(7):
        reach = (pattern @ reach > 0).astype(int)
        psi = op.apply(psi)
        assert np.all(np.abs(psi)[reach == 0] <= 1e-14)


def test_column_nonzeros_equal_receiving_degree(diamond):
    op = build_step_operator(diamond, TailConfig(3))
    u = op.dense()
    basis = op.basis
    degree = {v: diamond.coin_dimension(v) for v in diamond.vertices}
    for side in ("in", "out"):
        degree[f"{side}1"] = degree[f"{side}2"] = 2
        degree[f"{side}3"] = 1  # dead end
    for j in range(op.dim):
        receiver = basis.state(j).dst
        assert np.count_nonzero(u[:, j]) == degree[receiver]


def test_internal_block_matches_full_operator(diamond, twisted):
    for g in (diamond, twisted):
        op = build_step_operator(g, TailConfig(2))
        block, states = internal_block(g)
        idx = op.basis.internal_state_indices()
        assert np.allclose(op.dense()[np.ix_(idx, idx)], block)
        assert [op.basis.state(i) for i in idx] == list(states)
