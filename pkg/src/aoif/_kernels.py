"""Compiled sampling kernels shared by :mod:`phase_type` and :mod:`simulator`.

A PH law is encoded as jump-chain tables padded to a common width ``w``;
column ``w - 1`` is the absorbing state.
"""
import numpy as np
from numba import njit


def jump_tables(sigma, S, width=None):
    """Return ``(init_cum, rates, trans_cum)`` for a PH law ``(sigma, S)``."""
    m = len(sigma)
    width = m + 1 if width is None else width
    absorb = width - 1
    init = np.zeros(width)
    init[:m] = sigma
    init[absorb] = max(0.0, 1.0 - float(np.sum(sigma)))
    rates = np.ones(width - 1)
    trans = np.zeros((width - 1, width))
    trans[:, absorb] = 1.0
    nu = -S.sum(axis=1)
    for i in range(m):
        rate = -S[i, i]
        rates[i] = rate
        row = np.zeros(width)
        row[:m] = S[i] / rate
        row[i] = 0.0
        row[absorb] = max(nu[i], 0.0) / rate
        trans[i] = row
    init_cum = np.cumsum(init / init.sum())
    trans_cum = np.cumsum(trans / trans.sum(axis=1, keepdims=True), axis=1)
    init_cum[-1] = 1.0
    trans_cum[:, -1] = 1.0
    return init_cum, rates, trans_cum


@njit(cache=True)
def _pick(cum, u):
    k = 0
    while cum[k] <= u:
        k += 1
    return k


@njit(cache=True)
def draw_ph(rng, init_cum, rates, trans_cum):
    absorb = init_cum.shape[0] - 1
    k = _pick(init_cum, rng.random())
    t = 0.0
    while k < absorb:
        t += rng.exponential(1.0) / rates[k]
        k = _pick(trans_cum[k], rng.random())
    return t


@njit(cache=True)
def draw_ph_many(rng, init_cum, rates, trans_cum, size):
    out = np.empty(size)
    for i in range(size):
        out[i] = draw_ph(rng, init_cum, rates, trans_cum)
    return out
