import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fishline.balancing import BalancingInstance, ModelData  # noqa: E402


def random_balancing_instance(rng, num_tasks=5, max_workplaces=2, cycle_time=1000.0,
                              displacement=True, num_models=1):
    times = rng.integers(100, 700, size=num_tasks).astype(float)
    pairs = [(a, b) for a in range(1, num_tasks + 1) for b in range(a + 1, num_tasks + 1)
             if rng.random() < 0.3]
    zones = rng.integers(1, 5, size=num_tasks)
    if displacement:
        upper = np.triu(rng.uniform(0, 80, size=(4, 4)), 1)
        disp = upper + upper.T
    else:
        disp = np.zeros((4, 4))
    models = [ModelData(times * rng.uniform(0.8, 1.2, size=num_tasks), int(rng.integers(1, 4)))
              for _ in range(num_models)]
    levels = np.array([m.production_level for m in models], dtype=float)
    mean = levels @ np.vstack([m.task_times for m in models]) / levels.sum()
    mean = np.minimum(mean, cycle_time)
    return BalancingInstance(mean, pairs, zones, disp, cycle_time, max_workplaces, models)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        passed, detail = results[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if passed else 'FAIL'} - {detail}")
