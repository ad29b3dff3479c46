"""Batched Dormand-Prince 5(4) integrator for complex linear systems.

All members of a batch share one step size; the error estimate is the worst
member's error measured against that member's own magnitude (max-abs over
its entries), so a badly scaled member cannot hide behind a large one.
"""

from __future__ import annotations

import numpy as np

from .errors import StepSizeError

RTOL = 1e-12
ATOL = 1e-12

_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))


def _member_size(y):
    return np.abs(y).reshape(y.shape[0], -1).max(axis=1)


def integrate_segment(rhs, y0, s0=0.0, s1=1.0, rtol=RTOL, atol=ATOL, h0=None,
                      max_steps=200_000, return_step=False):
    """Integrate ``dy/ds = rhs(s, y)`` from ``s0`` to ``s1``.

    ``y0`` has a leading batch axis. Returns the state at ``s1`` (and the last
    accepted step size if ``return_step``).
    """
    y = np.array(y0, dtype=complex, copy=True)
    span = s1 - s0
    if span == 0:
        return (y, h0) if return_step else y
    direction = 1.0 if span > 0 else -1.0
    length = abs(span)
    s = s0
    h = length if h0 is None else min(abs(h0), length)
    h_min = 1e-14 * max(1.0, abs(s0), abs(s1))
    k = [None] * 7
    k[0] = rhs(s, y)
    done = 0.0
    for _ in range(max_steps):
        if done >= length:
            break
        h = min(h, length - done)
        step = direction * h
        for i in range(1, 7):
            acc = y.copy()
            for j, aij in enumerate(_A[i]):
                if aij:
                    acc = acc + step * aij * k[j]
            k[i] = rhs(s + _C[i] * step, acc)
        y_new = acc  # stage 7 argument is the 5th-order solution (FSAL)
        err = step * sum(e * kk for e, kk in zip(_E, k) if e)
        scale = atol + rtol * np.maximum(_member_size(y), _member_size(y_new))
        ratio = float(np.max(_member_size(err) / scale))
        if not np.isfinite(ratio):
            ratio = np.inf
        if ratio <= 1.0:
            done += h
            s = s0 + direction * done
            y = y_new
            k[0] = k[6]
            factor = 5.0 if ratio == 0 else min(5.0, max(0.2, 0.9 * ratio ** -0.2))
            h_last = h
            h = h * factor
        else:
            h = h * max(0.1, 0.9 * ratio ** -0.2) if np.isfinite(ratio) else h * 0.1
            if h < h_min:
                raise StepSizeError(f"step size underflow at s = {s:.6g}")
    else:
        raise StepSizeError(f"more than {max_steps} steps")
    return (y, h_last) if return_step else y
