import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_balancing_instance
from fishline.balancing import BalancingInstance, ModelData, decode_balancing
from fishline.encoding import multiple_random_keys_decode
from fishline.sequencing import (SequencingInstance, SequencingProblem, completed_work,
                                 derive_process_times, evaluate_sequence, sequencing_fitness)
from oracles import distinct_sequences, simulate_paced_line


def test_hand_trace():
    inst = SequencingInstance([[1.5]], [3], station_length=2.0)
    ev = evaluate_sequence([1, 1, 1], inst)
    np.testing.assert_allclose(ev.start.ravel(), [0, 1.5, 3], atol=1e-12)
    np.testing.assert_allclose(ev.finish.ravel(), [1.5, 3, 4], atol=1e-12)
    np.testing.assert_allclose(ev.completed.ravel(), [1.5, 1.5, 1.0], atol=1e-12)
    assert abs(completed_work(ev) - 4.0) < 1e-9
    assert ev.total_workload == 4.5


def test_zero_work():
    inst = SequencingInstance(np.zeros((2, 3)), [2, 1], 0.95)
    ev = evaluate_sequence([1, 2, 1], inst)
    assert completed_work(ev) == 0.0 and np.all(ev.completed == 0)
    assert sequencing_fitness([0.3, 0.2, 0.1], inst) == 0.0


def test_no_overload_completes_everything(rng):
    for _ in range(50):
        p = rng.uniform(0, 1, size=(2, 3))
        inst = SequencingInstance(p, [3, 2], station_length=rng.uniform(1.0, 2.0))
        seq = rng.permutation([1, 1, 1, 2, 2])
        ev = evaluate_sequence(seq, inst)
        assert abs(ev.total_completed_work - ev.total_workload) < 1e-9
        assert ev.ratio == pytest.approx(1.0)
        np.testing.assert_array_equal(ev.completed, p[seq - 1])


def random_case(rng):
    n_models = int(rng.integers(1, 4))
    levels = rng.integers(0, 3, size=n_models)
    levels[rng.integers(n_models)] += 1
    while levels.sum() > 6:
        levels[np.argmax(levels)] -= 1
    k = int(rng.integers(1, 4))
    p = rng.uniform(0, 2.0, size=(n_models, k))
    p[rng.random(p.shape) < 0.1] = 0.0
    L = float(rng.choice([0.95, 1.5, 2.0]))
    seq = rng.permutation(np.repeat(np.arange(1, n_models + 1), levels))
    return SequencingInstance(p, levels, L), seq


def test_matches_discrete_event_simulation(rng):
    for _ in range(300):
        inst, seq = random_case(rng)
        ev = evaluate_sequence(seq, inst)
        ref = simulate_paced_line(np.asarray(seq) - 1, inst.process_times, inst.station_length)
        np.testing.assert_allclose(ev.completed, ref, rtol=0, atol=1e-9)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_recursion_invariants(seed):
    rng = np.random.default_rng(seed)
    inst, seq = random_case(rng)
    ev = evaluate_sequence(seq, inst)
    p = inst.process_times[np.asarray(seq) - 1]
    i = np.arange(len(seq))[:, None]
    assert np.all(ev.completed >= 0) and np.all(ev.completed <= p + 1e-12)
    assert np.all(ev.finish <= i + inst.station_length + 1e-12)
    assert np.all(ev.start >= i) and np.all(ev.start <= ev.finish + 1e-12)
    assert 0.0 <= ev.ratio <= 1.0 + 1e-12
    assert ev.total_completed_work <= ev.total_workload + 1e-9
    overloaded = np.any(ev.completed < p - 1e-12)
    assert overloaded == (ev.total_completed_work < ev.total_workload - 1e-12)


def test_swapping_adjacent_identical_jobs(rng):
    inst = SequencingInstance(rng.uniform(0, 2, size=(2, 3)), [3, 3], 1.5)
    seq = np.array([1, 1, 2, 1, 2, 2])
    swapped = seq.copy()
    swapped[[0, 1]] = swapped[[1, 0]]
    a, b = evaluate_sequence(seq, inst), evaluate_sequence(swapped, inst)
    np.testing.assert_array_equal(a.completed, b.completed)


def test_order_irrelevant_when_station_shorter_than_launch_interval(rng):
    # with L < 1 every job starts at its launch time, so CW = sum min(p, L)
    p = rng.uniform(0, 2, size=(3, 2))
    inst = SequencingInstance(p, [2, 2, 1], 0.95)
    expected = sum(np.minimum(p[m], 0.95).sum() * c for m, c in enumerate([2, 2, 1]))
    for seq in distinct_sequences([2, 2, 1]):
        assert abs(evaluate_sequence(seq, inst).total_completed_work - expected) < 1e-9


def test_sequencing_fitness_single_model_is_constant(rng):
    inst = SequencingInstance([[1.3, 0.4]], [5], 1.2)
    values = {sequencing_fitness(rng.normal(size=5), inst) for _ in range(10)}
    assert len(values) == 1


def test_overload_free_order_wins():
    # heavy model 1, light model 2: alternating avoids the overload
    inst = SequencingInstance([[1.5], [0.5]], [2, 2], 1.5)
    scores = {seq: evaluate_sequence(seq, inst).total_completed_work
              for seq in distinct_sequences([2, 2])}
    best = max(scores, key=scores.get)
    assert scores[best] == pytest.approx(4.0)
    assert scores[(1, 1, 2, 2)] < scores[best]
    assert scores[best] == pytest.approx(evaluate_sequence(best, inst).total_workload)


def test_fitness_equals_decode_then_evaluate(rng):
    inst = SequencingInstance(rng.uniform(0, 2, size=(3, 2)), [2, 3, 1], 1.5)
    problem = SequencingProblem(inst)
    assert problem.dimensions == 6
    for _ in range(50):
        x = rng.uniform(-1000, 1000, size=6)
        seq = multiple_random_keys_decode(x, [2, 3, 1])
        expected = evaluate_sequence(seq, inst).total_completed_work
        assert sequencing_fitness(x, inst) == pytest.approx(expected, abs=1e-12)
        assert problem(x) == pytest.approx(expected, abs=1e-12)
    with pytest.raises(ValueError):
        sequencing_fitness(np.zeros(5), inst)


def test_sequence_validation():
    inst = SequencingInstance([[1.0], [1.0]], [1, 1])
    with pytest.raises(ValueError):
        evaluate_sequence([1, 1], inst)
    with pytest.raises(ValueError):
        evaluate_sequence([1, 3], inst)
    with pytest.raises(ValueError):
        SequencingInstance([[1.0]], [1], station_length=0.0)
    with pytest.raises(ValueError):
        SequencingInstance([[1.0]], [1, 1])


# ----------------------------------------------------------------- process times

def two_task_instance(models, disp=None, zones=(1, 2)):
    levels = np.array([m.production_level for m in models], dtype=float)
    mean = levels @ np.vstack([m.task_times for m in models]) / levels.sum()
    disp = np.zeros((4, 4)) if disp is None else disp
    return BalancingInstance(mean, [], list(zones), disp, 1000.0, 1, models)


def test_single_model_process_times_are_loads_over_c():
    disp = np.zeros((4, 4))
    disp[0, 1] = disp[1, 0] = 30.0
    inst = two_task_instance([ModelData([300.0, 500.0], 4)], disp)
    sol = decode_balancing([1, 2], inst)
    seq_inst = derive_process_times(sol, inst)
    np.testing.assert_allclose(seq_inst.process_times, [sol.workplace_loads / 1000.0])
    assert seq_inst.production_levels.tolist() == [4]
    assert seq_inst.station_length == 0.95


def test_zero_time_model_pays_only_displacement():
    disp = np.zeros((4, 4))
    disp[0, 1] = disp[1, 0] = 30.0
    inst = two_task_instance([ModelData([300.0, 500.0], 1), ModelData([0.0, 0.0], 1)], disp)
    sol = decode_balancing([1, 2], inst)
    p = derive_process_times(sol, inst).process_times
    assert p[1].tolist() == [0.03]
    assert p[0].tolist() == [0.83]


def test_scaled_model_doubles_process_times():
    inst = two_task_instance([ModelData([100.0, 200.0], 1), ModelData([200.0, 400.0], 3)])
    sol = decode_balancing([1, 2], inst)
    p = derive_process_times(sol, inst, station_length=1.5).process_times
    np.testing.assert_allclose(p[1] / p[0], 2.0, rtol=1e-15)


def test_process_times_sum_over_workplaces(rng):
    inst = random_balancing_instance(rng, num_tasks=8, max_workplaces=3, num_models=3)
    sol = decode_balancing(rng.permutation(8) + 1, inst)
    p = derive_process_times(sol, inst).process_times
    for m, model in enumerate(inst.models):
        expected = model.task_times.sum() + sol.task_displacement.sum()
        assert p[m].sum() * inst.cycle_time == pytest.approx(expected, rel=1e-12)
