"""Pure numpy implementations of the hot loops (fallback for the compiled core)."""

from __future__ import annotations

import numpy as np

_CHUNK = 2048


def re_laurent(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """``Re sum_j coeffs[j] * z**(-j)`` by Horner's rule in ``1/z``."""
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    w = 1.0 / np.ascontiguousarray(z, dtype=np.complex128)
    acc = np.zeros_like(w)
    for c in coeffs[::-1]:
        acc = acc * w + c
    return acc.real


def polyline_min_dist(px, py, ax, ay, bx, by) -> np.ndarray:
    """Distance from each point to the nearest of the segments ``a_k b_k``."""
    px = np.asarray(px, dtype=float)
    py = np.asarray(py, dtype=float)
    ax, ay, bx, by = (np.asarray(v, dtype=float) for v in (ax, ay, bx, by))
    dx, dy = bx - ax, by - ay
    len2 = dx * dx + dy * dy
    safe = np.where(len2 > 0, len2, 1.0)
    out = np.empty(px.shape[0])
    for s in range(0, px.shape[0], _CHUNK):
        qx = px[s:s + _CHUNK, None]
        qy = py[s:s + _CHUNK, None]
        t = ((qx - ax) * dx + (qy - ay) * dy) / safe
        t = np.clip(np.where(len2 > 0, t, 0.0), 0.0, 1.0)
        ex = ax + t * dx - qx
        ey = ay + t * dy - qy
        out[s:s + _CHUNK] = np.sqrt(np.min(ex * ex + ey * ey, axis=1))
    return out


def eta_invert(targets, eta_coeffs, v0, iters: int = 40, tol: float = 1e-14):
    """Newton solve ``eta(v) = target`` with ``eta(v) = sum_k eta_coeffs[k] v**k``.

    Returns ``(v, converged)``.
    """
    t = np.ascontiguousarray(targets, dtype=np.complex128)
    c = np.ascontiguousarray(eta_coeffs, dtype=np.complex128)
    v = np.array(v0, dtype=np.complex128, copy=True)
    dc = c[1:] * np.arange(1, c.shape[0])
    done = np.zeros(t.shape[0], dtype=bool)
    for _ in range(iters):
        f = np.zeros_like(v)
        for a in c[::-1]:
            f = f * v + a
        d = np.zeros_like(v)
        for a in dc[::-1]:
            d = d * v + a
        f -= t
        bad = d == 0
        step = np.where(bad, 0, f / np.where(bad, 1, d))
        v = np.where(done, v, v - step)
        done |= np.abs(step) <= tol * np.maximum(np.abs(v), 1e-300)
        if done.all():
            break
    return v, done
