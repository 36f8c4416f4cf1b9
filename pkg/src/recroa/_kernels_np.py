"""Pure-numpy batch kernels: the fallback evaluation backend.

Every function here has a numba twin in ``_kernels_nb`` with the same
signature and, by construction, the same floating-point arithmetic
order, so the two backends produce identical results.
"""

from __future__ import annotations

import numpy as np

from .expr import OP_ADD, OP_CONST, OP_DIV, OP_MUL, OP_NEG, OP_POW, OP_SUB, OP_VAR

VERDICT_RECURRENT = 0
VERDICT_COUNTER_EXAMPLE = 1
VERDICT_DIVERGED = 2


def eval_batch(code, iarg, farg, starts, stack_size, states):
    """Evaluate the field program at each row of states (m, d) -> (m, d)."""
    states = np.asarray(states, dtype=np.float64)
    m, d = states.shape
    out = np.empty((m, d), dtype=np.float64)
    stack: list = [None] * max(stack_size, 1)
    with np.errstate(all="ignore"):
        for i in range(d):
            sp = 0
            for j in range(int(starts[i]), int(starts[i + 1])):
                op = code[j]
                if op == OP_CONST:
                    stack[sp] = farg[j]
                    sp += 1
                elif op == OP_VAR:
                    stack[sp] = states[:, iarg[j]]
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
                    e = int(iarg[j])
                    if e == 0:
                        stack[sp - 1] = np.float64(1.0)
                    else:
                        x = stack[sp - 1]
                        acc = x
                        for _ in range(e - 1):
                            acc = acc * x
                        stack[sp - 1] = acc
            out[:, i] = stack[0]
    return out


def rk4_batch(code, iarg, farg, starts, stack_size, states, h, substeps):
    """Advance each row one sampling period: `substeps` classical RK4 steps of size h."""
    x = np.array(states, dtype=np.float64, copy=True)
    with np.errstate(all="ignore"):
        for _ in range(int(substeps)):
            k1 = eval_batch(code, iarg, farg, starts, stack_size, x)
            k2 = eval_batch(code, iarg, farg, starts, stack_size, x + (h * 0.5) * k1)
            k3 = eval_batch(code, iarg, farg, starts, stack_size, x + (h * 0.5) * k2)
            k4 = eval_batch(code, iarg, farg, starts, stack_size, x + h * k3)
            x = x + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    return x


def _norms_to(x, center):
    # sequential sum of squares, matching the scalar kernels' loop order
    acc = np.zeros(x.shape[0], dtype=np.float64)
    for j in range(x.shape[1]):
        diff = x[:, j] - center[j]
        acc = acc + diff * diff
    return np.sqrt(acc)


def _sphere_membership(x, centers, radii):
    member = np.zeros(x.shape[0], dtype=bool)
    for q in range(centers.shape[0]):
        member |= _norms_to(x, centers[q]) <= radii[q]
    return member


def _poly_membership(x, centers, A, B):
    member = np.zeros(x.shape[0], dtype=bool)
    n, d = A.shape
    for q in range(centers.shape[0]):
        if np.any(B[q] < 0.0):  # failed member is empty
            continue
        proj = np.zeros((x.shape[0], n), dtype=np.float64)
        for j in range(d):
            proj = proj + (x[:, j] - centers[q, j])[:, None] * A[:, j][None, :]
        member |= np.all(proj <= B[q][None, :], axis=1)
    return member


def _simulate_batch(code, iarg, farg, starts, stack_size, x0s, k, substeps, h, r_max, membership):
    m = x0s.shape[0]
    verdict = np.full(m, VERDICT_COUNTER_EXAMPLE, dtype=np.int8)
    nidx = np.full(m, k, dtype=np.int64)
    x = np.array(x0s, dtype=np.float64, copy=True)
    active = np.arange(m)
    with np.errstate(all="ignore"):
        for n in range(1, int(k) + 1):
            x = rk4_batch(code, iarg, farg, starts, stack_size, x, h, substeps)
            nrm = _norms_to(x, np.zeros(x.shape[1]))
            bad = ~np.all(np.isfinite(x), axis=1) | (nrm > r_max)
            member = membership(x) & ~bad
            verdict[active[bad]] = VERDICT_DIVERGED
            nidx[active[bad]] = n
            verdict[active[member]] = VERDICT_RECURRENT
            nidx[active[member]] = n
            keep = ~(bad | member)
            if not keep.all():
                active = active[keep]
                x = x[keep]
            if active.size == 0:
                break
    return verdict, nidx


def simulate_spheres_batch(code, iarg, farg, starts, stack_size, x0s, k, substeps, h, r_max, centers, radii):
    return _simulate_batch(
        code, iarg, farg, starts, stack_size, x0s, k, substeps, h, r_max,
        lambda x: _sphere_membership(x, centers, radii),
    )


def simulate_polys_batch(code, iarg, farg, starts, stack_size, x0s, k, substeps, h, r_max, centers, A, B):
    return _simulate_batch(
        code, iarg, farg, starts, stack_size, x0s, k, substeps, h, r_max,
        lambda x: _poly_membership(x, centers, A, B),
    )


def simulate_spheres(code, iarg, farg, starts, stack_size, x0, k, substeps, h, r_max, centers, radii):
    verdict, nidx = simulate_spheres_batch(
        code, iarg, farg, starts, stack_size, x0[None, :], k, substeps, h, r_max, centers, radii
    )
    return int(verdict[0]), int(nidx[0])


def simulate_polys(code, iarg, farg, starts, stack_size, x0, k, substeps, h, r_max, centers, A, B):
    verdict, nidx = simulate_polys_batch(
        code, iarg, farg, starts, stack_size, x0[None, :], k, substeps, h, r_max, centers, A, B
    )
    return int(verdict[0]), int(nidx[0])


def grid_labels(code, iarg, farg, starts, stack_size, points, n_steps, substeps, h, tol, r_max, eq):
    """1 where the trajectory settles at eq (within tol for two consecutive
    sampling instants, or at the horizon), else 0."""
    m = points.shape[0]
    labels = np.zeros(m, dtype=np.int8)
    x = np.array(points, dtype=np.float64, copy=True)
    active = np.arange(m)
    prev_in = _norms_to(x, eq) <= tol
    final_in = prev_in.copy()
    with np.errstate(all="ignore"):
        for _ in range(int(n_steps)):
            x = rk4_batch(code, iarg, farg, starts, stack_size, x, h, substeps)
            nrm = _norms_to(x, np.zeros(x.shape[1]))
            bad = ~np.all(np.isfinite(x), axis=1) | (nrm > r_max)
            in_now = (_norms_to(x, eq) <= tol) & ~bad
            settled = prev_in & in_now
            labels[active[settled]] = 1
            keep = ~(bad | settled)
            final_in = in_now
            if not keep.all():
                active = active[keep]
                x = x[keep]
                final_in = in_now[keep]
            prev_in = final_in
            if active.size == 0:
                break
    if active.size:
        labels[active] = final_in.astype(np.int8)
    return labels
