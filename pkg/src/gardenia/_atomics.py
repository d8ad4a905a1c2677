"""Atomic read-modify-write primitives for numba-compiled kernels.

Kernels run as ``nogil`` chunk functions on several OS threads at once, so
shared arrays (distances, visited bitmaps, queue tails) need real atomics.
Each primitive returns the value held *before* the update.

Float distances use ``atomic_min`` on an ``int64`` view of a ``float64``
array: for non-negative IEEE doubles (including +inf) the bit patterns order
exactly like the values.
"""

import numpy as np
from numba import njit, types
from numba.core import cgutils
from numba.extending import intrinsic


def _rmw(op):
    @intrinsic
    def _impl(typingctx, arr, idx, val):
        if not isinstance(arr, types.Array) or not isinstance(idx, types.Integer):
            return None
        sig = arr.dtype(arr, idx, arr.dtype)

        def codegen(context, builder, signature, args):
            aryty, idxty, valty = signature.args
            ary, i, v = args
            a = context.make_array(aryty)(context, builder, ary)
            i = context.cast(builder, i, idxty, types.intp)
            v = context.cast(builder, v, valty, aryty.dtype)
            ptr = cgutils.get_item_pointer(context, builder, aryty, a, [i])
            return builder.atomic_rmw(op, ptr, v, "seq_cst")

        return sig, codegen

    return _impl


atomic_add = _rmw("add")
atomic_min = _rmw("min")
atomic_or = _rmw("or")


@njit(nogil=True, inline="always")
def test_and_set(words, v):
    """Set bit ``v`` of a uint64 bitmap; True if it was already set."""
    bit = np.uint64(1) << np.uint64(v & 63)
    if words[v >> 6] & bit:
        return True
    old = atomic_or(words, v >> 6, bit)
    return (old & bit) != 0


@njit(nogil=True, inline="always")
def bit_is_set(words, v):
    return (words[v >> 6] >> np.uint64(v & 63)) & np.uint64(1) != 0


@intrinsic
def float_bits(typingctx, x):
    """Reinterpret a float64 as int64 (for ``atomic_min`` on distance views)."""
    if not isinstance(x, types.Float) or x.bitwidth != 64:
        return None

    def codegen(context, builder, signature, args):
        return builder.bitcast(args[0], context.get_value_type(types.int64))

    return types.int64(x), codegen


@intrinsic
def bits_float(typingctx, x):
    if not isinstance(x, types.Integer) or x.bitwidth != 64:
        return None

    def codegen(context, builder, signature, args):
        return builder.bitcast(args[0], context.get_value_type(types.float64))

    return types.float64(x), codegen
