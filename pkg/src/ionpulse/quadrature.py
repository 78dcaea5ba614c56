"""Composite Simpson quadrature on uniform grids.

Every integral in this package runs on a fixed uniform time grid, so only the
uniform-spacing rules are needed. Both routines accept real or complex
samples and operate along the last axis.
"""

import numpy as np


def simpson(y, dx):
    """Integrate sampled values over a uniform grid with an even interval count."""
    y = np.asarray(y)
    n = y.shape[-1] - 1
    if n < 2 or n % 2:
        raise ValueError(f"composite Simpson needs an even interval count, got {n}")
    return (dx / 3.0) * (
        y[..., 0]
        + y[..., -1]
        + 4.0 * y[..., 1:-1:2].sum(axis=-1)
        + 2.0 * y[..., 2:-1:2].sum(axis=-1)
    )


def simpson_weights(n_samples, dx):
    """Weight vector w such that w @ y == simpson(y, dx)."""
    if n_samples < 3 or n_samples % 2 == 0:
        raise ValueError(f"need an odd sample count, got {n_samples}")
    w = np.ones(n_samples)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (dx / 3.0)


def cumulative_simpson(y, dx):
    """Running integral of sampled values, fourth-order accurate at every node.

    Each interval [t_{j-1}, t_j] is integrated with the parabola through the
    sample triple ending at j (starting at j for the very first interval),
    then the per-interval pieces are cumulatively summed. The first output
    entry is 0.
    """
    y = np.asarray(y)
    if y.shape[-1] < 3:
        raise ValueError("cumulative Simpson needs at least 3 samples")
    out = np.empty(y.shape, dtype=np.result_type(y.dtype, np.float64))
    out[..., 0] = 0.0
    seg = np.empty_like(out[..., 1:])
    seg[..., 0] = (dx / 12.0) * (5.0 * y[..., 0] + 8.0 * y[..., 1] - y[..., 2])
    seg[..., 1:] = (dx / 12.0) * (-y[..., :-2] + 8.0 * y[..., 1:-1] + 5.0 * y[..., 2:])
    np.cumsum(seg, axis=-1, out=out[..., 1:])
    return out
