"""Shared hypothesis strategies for finite functions and diagrams."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from kanfin.finset import FinFunction, FinSetObj


@st.composite
def functions(draw, max_dom=4, max_cod=4, dom=None, cod=None):
    n = draw(st.integers(0, max_dom)) if dom is None else dom
    m = draw(st.integers(0 if n == 0 else 1, max_cod)) if cod is None else cod
    table = draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n)) if m else []
    return FinFunction(FinSetObj(n), FinSetObj(m), tuple(table))


@st.composite
def composable(draw, k=2, max_size=4):
    """k consecutive composable functions."""
    sizes = [draw(st.integers(1, max_size)) for _ in range(k + 1)]
    return [draw(functions(dom=sizes[i], cod=sizes[i + 1])) for i in range(k)]


seeds = st.integers(0, 2**32 - 1)


def rng_from(seed: int) -> random.Random:
    return random.Random(seed)
