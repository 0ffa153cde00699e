"""Lock-free array primitives for numba kernels (LLVM ``atomicrmw``/``cmpxchg``)."""
from numba import types
from numba.core import cgutils
from numba.extending import intrinsic


def _item_pointer(context, builder, arrty, arr, idx):
    ary = context.make_array(arrty)(context, builder, arr)
    return cgutils.get_item_pointer(context, builder, arrty, ary, [idx], wraparound=False)


@intrinsic
def atomic_add(typingctx, arr, idx, val):
    """``arr[idx] += val`` atomically; returns the previous value."""
    if not isinstance(arr, types.Array):
        return None

    def codegen(context, builder, sig, args):
        arrty, _, valty = sig.args
        a, i, v = args
        ptr = _item_pointer(context, builder, arrty, a, i)
        v = context.cast(builder, v, valty, arrty.dtype)
        op = "fadd" if isinstance(arrty.dtype, types.Float) else "add"
        return builder.atomic_rmw(op, ptr, v, "monotonic")

    return arr.dtype(arr, idx, val), codegen


@intrinsic
def atomic_cas(typingctx, arr, idx, expected, new):
    """Compare-and-swap ``arr[idx]``; returns the value seen before the swap."""
    if not isinstance(arr, types.Array) or isinstance(arr.dtype, types.Float):
        return None

    def codegen(context, builder, sig, args):
        arrty = sig.args[0]
        a, i, e, n = args
        ptr = _item_pointer(context, builder, arrty, a, i)
        e = context.cast(builder, e, sig.args[2], arrty.dtype)
        n = context.cast(builder, n, sig.args[3], arrty.dtype)
        res = builder.cmpxchg(ptr, e, n, "monotonic", "monotonic")
        return builder.extract_value(res, 0)

    return arr.dtype(arr, idx, expected, new), codegen
