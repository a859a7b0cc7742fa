"""Perron roots and vectors of nonnegative matrices by power iteration.

Small dense matrices are iterated by repeated squaring, which is the power
method run on M, M^2, M^4, ...; larger ones use plain matrix-vector
iteration through caller-supplied products.
"""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from .shift_core import NumericalError

REL_TOL = 1e-13
MAX_ITER = 10**6
DENSE_LIMIT = 256


def _normalize(x):
    # every vector iterated here is nonnegative
    s = x.max()
    if not np.isfinite(s) or s <= 0.0:
        raise NumericalError("power iteration collapsed to zero or overflowed")
    return x / s


def _dense_vectors(M: np.ndarray, max_squarings=64):
    """Right and left Perron vectors of a primitive dense matrix."""
    Q = _normalize(M.copy())
    for _ in range(max_squarings):
        Q2 = _normalize(Q @ Q)
        if np.max(np.abs(Q2 - Q)) <= REL_TOL:
            Q = Q2
            break
        Q = Q2
    else:
        raise NumericalError("repeated squaring did not converge")
    r = _normalize(Q.sum(axis=1))
    l = _normalize(Q.sum(axis=0))
    return r, l


def _polish(apply: Callable, x: np.ndarray, steps=2):
    for _ in range(steps):
        x = _normalize(apply(x))
    return x


def _iterate(apply: Callable, n: int, x0=None, max_iter=MAX_ITER):
    x = np.ones(n) if x0 is None else _normalize(np.asarray(x0, float))
    lam = 0.0
    for it in range(max_iter):
        y = apply(x)
        lam_new = y.max()
        y = y / lam_new
        done = (
            abs(lam_new - lam) <= REL_TOL * lam_new
            and np.max(np.abs(y - x)) <= REL_TOL * 10
        )
        x, lam = y, lam_new
        if done and it > 0:
            return lam, x
    raise NumericalError(f"power iteration did not converge in {max_iter} steps")


def perron_root(
    n: int,
    right: Callable[[np.ndarray], np.ndarray],
    dense: Optional[np.ndarray] = None,
    shift: float = 0.0,
) -> float:
    """Spectral radius of a primitive nonnegative matrix."""
    lam, _, _ = perron_triple(n, right, None, dense, need_left=False, shift=shift)
    return lam


def perron_triple(
    n: int,
    right: Callable[[np.ndarray], np.ndarray],
    left: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    dense: Optional[np.ndarray] = None,
    need_left=True,
    shift: float = 0.0,
):
    """Return ``(rho, r, l)`` with ``M r = rho r`` and ``l M = rho l``.

    Vectors are scaled to max-norm 1.  ``dense`` (optional) enables the
    squaring path when ``n <= DENSE_LIMIT``.  With ``shift > 0`` the
    iteration runs on ``M + shift * I``, which has the same Perron vectors
    and no other eigenvalue on its spectral circle, even when ``M`` is
    (nearly) periodic.
    """
    if shift:
        lam, r, l = perron_triple(
            n,
            lambda x: right(x) + shift * x,
            None if left is None else (lambda y: left(y) + shift * y),
            None if dense is None else dense + shift * np.eye(len(dense)),
            need_left,
        )
        return lam - shift, r, l
    if dense is not None and n <= DENSE_LIMIT:
        r, l = _dense_vectors(dense)
        r = _polish(right, r)
        Mr = right(r)
        lam = float(np.max(Mr))
        if need_left:
            l = _polish(left, l)
        return lam, r, (l if need_left else None)
    lam, r = _iterate(right, n)
    l = None
    if need_left:
        _, l = _iterate(left, n)
    return float(lam), r, l
