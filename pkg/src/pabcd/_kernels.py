"""Compiled inner loops: one serial cycle and one asynchronous worker.

The asynchronous worker shares ``x``, ``r`` and ``v`` with its siblings.
Residual entries are bumped with an atomic floating add and the coordinate
itself is committed with a compare-and-swap, so a coordinate can never be
pushed below zero by two workers racing on it. Gradient reads of ``r`` are
plain loads and may see a partially applied sibling update.
"""

import numpy as np
from llvmlite import ir
from numba import njit, types
from numba.core import cgutils
from numba.extending import intrinsic


def _item_pointer(context, builder, aryty, arr, idx):
    ary = context.make_array(aryty)(context, builder, arr)
    return cgutils.get_item_pointer(context, builder, aryty, ary, [idx])


@intrinsic
def atomic_add(typingctx, arr, idx, val):
    """``arr[idx] += val`` as one relaxed atomic read-modify-write."""
    sig = types.float64(arr, idx, val)

    def codegen(context, builder, signature, args):
        ptr = _item_pointer(context, builder, signature.args[0], args[0], args[1])
        return builder.atomic_rmw("fadd", ptr, args[2], "monotonic")

    return sig, codegen


@intrinsic
def compare_and_swap(typingctx, arr, idx, expected, new):
    """Store ``new`` at ``arr[idx]`` iff it still holds ``expected`` (bitwise)."""
    sig = types.boolean(arr, idx, expected, new)

    def codegen(context, builder, signature, args):
        ptr = _item_pointer(context, builder, signature.args[0], args[0], args[1])
        i64 = ir.IntType(64)
        iptr = builder.bitcast(ptr, i64.as_pointer())
        res = builder.cmpxchg(
            iptr,
            builder.bitcast(args[2], i64),
            builder.bitcast(args[3], i64),
            "seq_cst",
            "seq_cst",
        )
        return builder.extract_value(res, 1)

    return sig, codegen


@njit(nogil=True, cache=True)
def _pick(u, q, delta, I, J):
    n_i = I.size
    t = u * q
    if t < delta * n_i:
        k = np.int64(t / delta)
        if k >= n_i:
            k = n_i - 1
        return I[k]
    k = np.int64(t - delta * n_i)
    if k >= J.size:
        k = J.size - 1
    return J[k]


@njit(nogil=True, cache=True)
def _column_dot(col_ptr, row_idx, vals, c, r):
    g = 0.0
    for p in range(col_ptr[c], col_ptr[c + 1]):
        g += vals[p] * r[row_idx[p]]
    return g


@njit(nogil=True, cache=True)
def serial_cycle(col_ptr, row_idx, vals, lip, n, lam, beta, x, r, v, I, J, delta, u, seq):
    """Apply ``len(u)`` sampled coordinate steps in place; blocks go to ``seq``."""
    q = delta * I.size + J.size
    for k in range(u.size):
        j = _pick(u[k], q, delta, I, J)
        seq[k] = j
        c = j if j < n else j - n
        g = _column_dot(col_ptr, row_idx, vals, c, r)
        if j >= n:
            g = -g
        xo = x[j]
        h = -(g + lam) / (beta * lip[j])
        if h < -xo:
            h = -xo
        v[j] = h
        if h != 0.0:
            x[j] = xo + h
            d = h if j < n else -h
            for p in range(col_ptr[c], col_ptr[c + 1]):
                r[row_idx[p]] += vals[p] * d


@njit(nogil=True, cache=True)
def async_worker(col_ptr, row_idx, vals, lip, n, lam, beta, x, r, v, I, J, delta, u, seq):
    """Same steps as :func:`serial_cycle`, safe to run concurrently on shared state."""
    q = delta * I.size + J.size
    for k in range(u.size):
        j = _pick(u[k], q, delta, I, J)
        seq[k] = j
        c = j if j < n else j - n
        g = _column_dot(col_ptr, row_idx, vals, c, r)
        if j >= n:
            g = -g
        while True:
            xo = x[j]
            h = -(g + lam) / (beta * lip[j])
            if h < -xo:
                h = -xo
            if h == 0.0:
                v[j] = h
                break
            if compare_and_swap(x, j, xo, xo + h):
                v[j] = h
                d = h if j < n else -h
                for p in range(col_ptr[c], col_ptr[c + 1]):
                    atomic_add(r, row_idx[p], vals[p] * d)
                break
