import numpy as np
import pytest

from qwalk import (
    EdgeState,
    TailConfig,
    build_step_operator,
    path_amplitudes,
    path_sum,
    random_graph,
)
from qwalk.oracle import total_probability

START = EdgeState("in1", 0, "in:1")


def test_diamond_three_step_paths(diamond):
    result = path_sum(diamond, START, EdgeState(2, "out1", "out:1"), 3)
    assert result.amplitude == pytest.approx(8 / 9)
    assert result.path_count == 2


def test_diamond_four_steps_cancel(diamond):
    result = path_sum(diamond, START, EdgeState(2, "out1", "out:1"), 4)
    assert result.amplitude == 0
    assert result.path_count == 0


def test_zero_steps_identity(diamond):
    result = path_sum(diamond, START, START, 0)
    assert result.amplitude == 1.0
    assert result.path_count == 1
    assert path_sum(diamond, START, EdgeState(0, 1, "e0"), 0).amplitude == 0


def test_step_guard(diamond):
    with pytest.raises(ValueError):
        path_sum(diamond, START, START, 17)
    with pytest.raises(ValueError):
        path_sum(diamond, START, START, -1)


def test_rejects_bogus_states(diamond):
    with pytest.raises(ValueError):
        path_sum(diamond, EdgeState(0, 2, "e9"), START, 1)
    with pytest.raises(ValueError):
        path_sum(diamond, EdgeState(0, 2, "e0"), START, 1)  # e0 joins 0 and 1
    with pytest.raises(ValueError):
        path_sum(diamond, EdgeState("in2", 0, "in:1"), START, 1)


def test_oracle_reaches_the_tails(diamond):
    # the reflected branch walks back out along the entry tail
    result = path_sum(diamond, START, EdgeState("in3", "in4", "in:4"), 4)
    assert result.amplitude == pytest.approx(-1 / 3)
    assert result.path_count == 1


def test_oracle_matches_engine_on_fixtures(diamond, line, twisted):
    for g in (diamond, line, twisted):
        op = build_step_operator(g, TailConfig(9))
        start = op.basis.entry_start_state()
        psi = op.basis.basis_vector(start)
        for n in range(1, 9):
            psi = op.apply(psi)
            for state, p in path_amplitudes(g, start, n).items():
                assert abs(p.amplitude - psi[op.basis.index(state)]) <= 1e-10


def test_oracle_matches_engine_on_random_graphs(rng):
    for _ in range(10):
        g = random_graph(rng)
        op = build_step_operator(g, TailConfig(7))
        start = op.basis.entry_start_state()
        psi = op.basis.basis_vector(start)
        for n in range(1, 7):
            psi = op.apply(psi)
            hits = path_amplitudes(g, start, n)
            for state, p in hits.items():
                assert abs(p.amplitude - psi[op.basis.index(state)]) <= 1e-10
            # and every basis state the oracle skips carries no amplitude
            skipped = np.ones(op.dim, dtype=bool)
            for state in hits:
                skipped[op.basis.index(state)] = False
            assert np.max(np.abs(psi[skipped]), initial=0.0) <= 1e-10


def test_oracle_unitarity(diamond, rng):
    for n in (1, 4, 9):
        assert total_probability(diamond, START, n) == pytest.approx(1.0, abs=1e-9)
    g = random_graph(rng)
    start = EdgeState("in1", g.entry, "in:1")
    assert total_probability(g, start, 6) == pytest.approx(1.0, abs=1e-9)
