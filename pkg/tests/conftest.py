from __future__ import annotations

import pytest

from trajsketch.similarity import warm_kernels


@pytest.fixture(scope="session", autouse=True)
def compiled_distance_kernels() -> None:
    # JIT compile (or load the disk cache) up front so every timed check
    # in the suite measures steady-state kernel speed, not compilation.
    warm_kernels()
