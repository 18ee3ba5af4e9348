import os
import sys

# Repository root on the import path (flat module layout)
ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, ROOT)

import numpy as np
import pytest

from envmodel import CueDefinition, CueKind, Environment, add_any_cue, load_environment
from fftbuild import GREEN_MEHR_SIGNS

FIXTURES = os.path.join(ROOT, "fixtures")
GREEN_MEHR_CSV = os.path.join(FIXTURES, "green_mehr.csv")


def make_env(values, criterion, directions=None, names=None) -> Environment:
    """Small hand-built environment; object ids o1..on, cue names c1..ck."""
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    n, k = values.shape
    directions = directions or [1] * k
    names = names or [f"c{j + 1}" for j in range(k)]
    cues = tuple(CueDefinition(name, CueKind.NUMERIC, d) for name, d in zip(names, directions))
    return Environment(tuple(f"o{i + 1}" for i in range(n)), cues, values, criterion)


@pytest.fixture
def green_mehr_env() -> Environment:
    env = load_environment(GREEN_MEHR_CSV, "ccu")
    return add_any_cue(env, "any_sign", GREEN_MEHR_SIGNS)


def green_mehr_rule(st_change: int, chest_pain_chief: int, signs) -> int:
    """Straight-line transcription of the coronary-care allocation rules."""
    if st_change == 1:
        return 1
    if chest_pain_chief == 0:
        return 0
    if any(s == 1 for s in signs):
        return 1
    return 0
