from __future__ import annotations

import numpy as np
import pytest

from softpq import DiskGridSpec, LabelGrid, make_disk_grid


@pytest.fixture
def fixture_pair() -> tuple[LabelGrid, LabelGrid]:
    """The canonical 8x8 case: one 16-px GT square, two 7-px fragments.

    gt: 4x4 square covering rows 2-5, cols 2-5. pred: left 4x2 strip minus
    pixel (2,2) as id 1, right 4x2 strip minus pixel (2,5) as id 2. Both
    fragment IoUs are exactly 7/16 = 0.4375.
    """
    gt = np.zeros((8, 8), dtype=np.uint32)
    gt[2:6, 2:6] = 1
    pred = np.zeros((8, 8), dtype=np.uint32)
    pred[2:6, 2:4] = 1
    pred[2, 2] = 0
    pred[2:6, 4:6] = 2
    pred[2, 5] = 0
    return LabelGrid(gt), LabelGrid(pred)


@pytest.fixture(scope="session")
def disk_grid() -> LabelGrid:
    """The default 25-disk lattice (256x256, radius 18, spacing 51)."""
    return make_disk_grid(DiskGridSpec())


@pytest.fixture(scope="session")
def small_disk_grid() -> LabelGrid:
    """2x2 disks, radius 5, spacing 12 -- fast enough for per-test use."""
    return make_disk_grid(DiskGridSpec(rows=2, cols=2, radius=5, spacing=12))
