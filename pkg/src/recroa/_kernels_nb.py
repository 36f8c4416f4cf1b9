"""Numba-compiled kernels: the accelerated evaluation backend.

Signatures and floating-point arithmetic order match ``_kernels_np``
exactly; only the execution strategy differs (scalar loops under njit,
with the batch kernels parallelized over independent points).
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

from .expr import OP_ADD, OP_CONST, OP_DIV, OP_MUL, OP_NEG, OP_POW, OP_SUB, OP_VAR

VERDICT_RECURRENT = 0
VERDICT_COUNTER_EXAMPLE = 1
VERDICT_DIVERGED = 2

_JIT = dict(cache=True, error_model="numpy", fastmath=False)


@njit(**_JIT)
def _eval_into(code, iarg, farg, starts, state, out, stack):
    d = starts.shape[0] - 1
    for i in range(d):
        sp = 0
        for j in range(starts[i], starts[i + 1]):
            op = code[j]
            if op == OP_CONST:
                stack[sp] = farg[j]
                sp += 1
            elif op == OP_VAR:
                stack[sp] = state[iarg[j]]
                sp += 1
            elif op == OP_NEG:
                stack[sp - 1] = -stack[sp - 1]
            elif op == OP_ADD:
                stack[sp - 2] = stack[sp - 2] + stack[sp - 1]
                sp -= 1
            elif op == OP_SUB:
                stack[sp - 2] = stack[sp - 2] - stack[sp - 1]
                sp -= 1
            elif op == OP_MUL:
                stack[sp - 2] = stack[sp - 2] * stack[sp - 1]
                sp -= 1
            elif op == OP_DIV:
                stack[sp - 2] = stack[sp - 2] / stack[sp - 1]
                sp -= 1
            else:  # OP_POW, by repeated multiplication
                e = iarg[j]
                if e == 0:
                    stack[sp - 1] = 1.0
                else:
                    x = stack[sp - 1]
                    acc = x
                    for _ in range(e - 1):
                        acc = acc * x
                    stack[sp - 1] = acc
        out[i] = stack[0]


@njit(**_JIT)
def _rk4_period(code, iarg, farg, starts, x, h, substeps, k1, k2, k3, k4, xt, stack):
    d = x.shape[0]
    for _ in range(substeps):
        _eval_into(code, iarg, farg, starts, x, k1, stack)
        for i in range(d):
            xt[i] = x[i] + (h * 0.5) * k1[i]
        _eval_into(code, iarg, farg, starts, xt, k2, stack)
        for i in range(d):
            xt[i] = x[i] + (h * 0.5) * k2[i]
        _eval_into(code, iarg, farg, starts, xt, k3, stack)
        for i in range(d):
            xt[i] = x[i] + h * k3[i]
        _eval_into(code, iarg, farg, starts, xt, k4, stack)
        for i in range(d):
            x[i] = x[i] + (h / 6.0) * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])


@njit(**_JIT)
def eval_batch(code, iarg, farg, starts, stack_size, states):
    m, d = states.shape
    out = np.empty((m, d), dtype=np.float64)
    stack = np.empty(max(stack_size, 1), dtype=np.float64)
    row = np.empty(d, dtype=np.float64)
    for p in range(m):
        _eval_into(code, iarg, farg, starts, states[p], row, stack)
        for i in range(d):
            out[p, i] = row[i]
    return out


@njit(**_JIT)
def rk4_batch(code, iarg, farg, starts, stack_size, states, h, substeps):
    m, d = states.shape
    out = states.astype(np.float64).copy()
    stack = np.empty(max(stack_size, 1), dtype=np.float64)
    k1 = np.empty(d, dtype=np.float64)
    k2 = np.empty(d, dtype=np.float64)
    k3 = np.empty(d, dtype=np.float64)
    k4 = np.empty(d, dtype=np.float64)
    xt = np.empty(d, dtype=np.float64)
    for p in range(m):
        _rk4_period(code, iarg, farg, starts, out[p], h, substeps, k1, k2, k3, k4, xt, stack)
    return out


@njit(**_JIT)
def _dist_to(x, center):
    acc = 0.0
    for j in range(x.shape[0]):
        diff = x[j] - center[j]
        acc = acc + diff * diff
    return np.sqrt(acc)


@njit(**_JIT)
def _diverged(x, r_max):
    finite = True
    acc = 0.0
    for j in range(x.shape[0]):
        if not np.isfinite(x[j]):
            finite = False
        acc = acc + x[j] * x[j]
    return (not finite) or np.sqrt(acc) > r_max


@njit(**_JIT)
def _in_spheres(x, centers, radii):
    for q in range(centers.shape[0]):
        if _dist_to(x, centers[q]) <= radii[q]:
            return True
    return False


@njit(**_JIT)
def _in_polys(x, centers, A, B):
    n = A.shape[0]
    d = A.shape[1]
    for q in range(centers.shape[0]):
        alive = True
        for l in range(n):
            if B[q, l] < 0.0:
                alive = False
                break
        if not alive:
            continue
        inside = True
        for l in range(n):
            proj = 0.0
            for j in range(d):
                proj = proj + (x[j] - centers[q, j]) * A[l, j]
            if proj > B[q, l]:
                inside = False
                break
        if inside:
            return True
    return False


@njit(**_JIT)
def simulate_spheres(code, iarg, farg, starts, stack_size, x0, k, substeps, h, r_max, centers, radii):
    d = x0.shape[0]
    stack = np.empty(max(stack_size, 1), dtype=np.float64)
    k1 = np.empty(d, dtype=np.float64)
    k2 = np.empty(d, dtype=np.float64)
    k3 = np.empty(d, dtype=np.float64)
    k4 = np.empty(d, dtype=np.float64)
    xt = np.empty(d, dtype=np.float64)
    x = x0.astype(np.float64).copy()
    for n in range(1, k + 1):
        _rk4_period(code, iarg, farg, starts, x, h, substeps, k1, k2, k3, k4, xt, stack)
        if _diverged(x, r_max):
            return VERDICT_DIVERGED, n
        if _in_spheres(x, centers, radii):
            return VERDICT_RECURRENT, n
    return VERDICT_COUNTER_EXAMPLE, k


@njit(**_JIT)
def simulate_polys(code, iarg, farg, starts, stack_size, x0, k, substeps, h, r_max, centers, A, B):
    d = x0.shape[0]
    stack = np.empty(max(stack_size, 1), dtype=np.float64)
    k1 = np.empty(d, dtype=np.float64)
    k2 = np.empty(d, dtype=np.float64)
    k3 = np.empty(d, dtype=np.float64)
    k4 = np.empty(d, dtype=np.float64)
    xt = np.empty(d, dtype=np.float64)
    x = x0.astype(np.float64).copy()
    for n in range(1, k + 1):
        _rk4_period(code, iarg, farg, starts, x, h, substeps, k1, k2, k3, k4, xt, stack)
        if _diverged(x, r_max):
            return VERDICT_DIVERGED, n
        if _in_polys(x, centers, A, B):
            return VERDICT_RECURRENT, n
    return VERDICT_COUNTER_EXAMPLE, k


@njit(cache=True, error_model="numpy", fastmath=False, parallel=True)
def simulate_spheres_batch(code, iarg, farg, starts, stack_size, x0s, k, substeps, h, r_max, centers, radii):
    m = x0s.shape[0]
    verdict = np.empty(m, dtype=np.int8)
    nidx = np.empty(m, dtype=np.int64)
    for p in prange(m):
        v, n = simulate_spheres(
            code, iarg, farg, starts, stack_size, x0s[p], k, substeps, h, r_max, centers, radii
        )
        verdict[p] = v
        nidx[p] = n
    return verdict, nidx


@njit(cache=True, error_model="numpy", fastmath=False, parallel=True)
def simulate_polys_batch(code, iarg, farg, starts, stack_size, x0s, k, substeps, h, r_max, centers, A, B):
    m = x0s.shape[0]
    verdict = np.empty(m, dtype=np.int8)
    nidx = np.empty(m, dtype=np.int64)
    for p in prange(m):
        v, n = simulate_polys(
            code, iarg, farg, starts, stack_size, x0s[p], k, substeps, h, r_max, centers, A, B
        )
        verdict[p] = v
        nidx[p] = n
    return verdict, nidx


@njit(cache=True, error_model="numpy", fastmath=False, parallel=True)
def grid_labels(code, iarg, farg, starts, stack_size, points, n_steps, substeps, h, tol, r_max, eq):
    m, d = points.shape
    labels = np.zeros(m, dtype=np.int8)
    for p in prange(m):
        stack = np.empty(max(stack_size, 1), dtype=np.float64)
        k1 = np.empty(d, dtype=np.float64)
        k2 = np.empty(d, dtype=np.float64)
        k3 = np.empty(d, dtype=np.float64)
        k4 = np.empty(d, dtype=np.float64)
        xt = np.empty(d, dtype=np.float64)
        x = points[p].astype(np.float64).copy()
        prev_in = _dist_to(x, eq) <= tol
        label = np.int8(1) if prev_in else np.int8(0)
        for _ in range(n_steps):
            _rk4_period(code, iarg, farg, starts, x, h, substeps, k1, k2, k3, k4, xt, stack)
            if _diverged(x, r_max):
                label = np.int8(0)
                break
            in_now = _dist_to(x, eq) <= tol
            if prev_in and in_now:
                label = np.int8(1)
                break
            prev_in = in_now
            label = np.int8(1) if in_now else np.int8(0)
        labels[p] = label
    return labels
