"""Pure-Python local-move sweep; reference twin of ``_kernel.pyx``.

Both implementations perform the same floating-point operations in the same
order and must return identical module assignments.
"""
from math import log2

MIN_IMPROVEMENT = 1e-10


def _plogp(x):
    return x * log2(x) if x > 0.0 else 0.0


def sweep(order, node_flow, out_ptr, out_idx, out_flow, in_ptr, in_idx, in_flow,
          module, mod_flow, mod_exit, mod_enter, mod_size):
    """Move each node in ``order`` to the neighbouring (or an empty) module that
    lowers the map equation most. Module arrays are updated in place.

    Returns the number of moves made.
    """
    n = len(node_flow)
    order = order.tolist()
    nf = node_flow.tolist()
    optr, oidx, ofl = out_ptr.tolist(), out_idx.tolist(), out_flow.tolist()
    iptr, iidx, ifl = in_ptr.tolist(), in_idx.tolist(), in_flow.tolist()
    mod = module.tolist()
    mflow, mexit, menter = mod_flow.tolist(), mod_exit.tolist(), mod_enter.tolist()
    msize = mod_size.tolist()

    sum_enter = 0.0
    for i in range(n):
        sum_enter += menter[i]
    free = [i for i in range(n - 1, -1, -1) if msize[i] == 0]

    out_to = [0.0] * n
    in_from = [0.0] * n
    mark = [False] * n
    moves = 0

    for node in order:
        a = mod[node]
        touched = []
        out_a = 0.0
        for e in range(optr[node], optr[node + 1]):
            m = mod[oidx[e]]
            if not mark[m]:
                mark[m] = True
                touched.append(m)
            out_to[m] += ofl[e]
            out_a += ofl[e]
        in_a = 0.0
        for e in range(iptr[node], iptr[node + 1]):
            m = mod[iidx[e]]
            if not mark[m]:
                mark[m] = True
                touched.append(m)
            in_from[m] += ifl[e]
            in_a += ifl[e]
        touched.sort()

        p = nf[node]
        exit_a = mexit[a] - out_a + out_to[a] + in_from[a]
        enter_a = menter[a] - in_a + in_from[a] + out_to[a]
        flow_a = mflow[a] - p
        delta_a = ((-_plogp(enter_a) - _plogp(exit_a) + _plogp(exit_a + flow_a))
                   - (-_plogp(menter[a]) - _plogp(mexit[a]) + _plogp(mexit[a] + mflow[a])))
        sum_enter_a = sum_enter + (enter_a - menter[a])

        best = a
        best_delta = -MIN_IMPROVEMENT
        best_exit = best_enter = best_sum = 0.0
        cands = [b for b in touched if b != a]
        if msize[a] > 1 and free:
            cands.append(free[-1])
        for b in cands:
            exit_b = mexit[b] + out_a - out_to[b] - in_from[b]
            enter_b = menter[b] + in_a - in_from[b] - out_to[b]
            new_sum = sum_enter_a + (enter_b - menter[b])
            delta = (_plogp(new_sum) - _plogp(sum_enter) + delta_a
                     + (-_plogp(enter_b) - _plogp(exit_b) + _plogp(exit_b + mflow[b] + p))
                     - (-_plogp(menter[b]) - _plogp(mexit[b]) + _plogp(mexit[b] + mflow[b])))
            if delta < best_delta:
                best, best_delta = b, delta
                best_exit, best_enter, best_sum = exit_b, enter_b, new_sum

        if best != a:
            mexit[a], menter[a], mflow[a] = exit_a, enter_a, flow_a
            msize[a] -= 1
            if free and best == free[-1] and msize[best] == 0:
                free.pop()
            mexit[best], menter[best] = best_exit, best_enter
            mflow[best] = mflow[best] + p
            msize[best] += 1
            if msize[a] == 0:
                mexit[a] = menter[a] = mflow[a] = 0.0
                free.append(a)
            mod[node] = best
            sum_enter = best_sum
            moves += 1

        for m in touched:
            out_to[m] = 0.0
            in_from[m] = 0.0
            mark[m] = False

    module[:] = mod
    mod_flow[:] = mflow
    mod_exit[:] = mexit
    mod_enter[:] = menter
    mod_size[:] = msize
    return moves
