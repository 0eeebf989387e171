# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled local-move sweep; mirrors ``_kernel_py.sweep`` operation for operation."""
import numpy as np
cimport numpy as cnp
from libc.math cimport log2

cnp.import_array()

cdef double MIN_IMPROVEMENT = 1e-10


cdef inline double _plogp(double x) noexcept nogil:
    return x * log2(x) if x > 0.0 else 0.0


def sweep(const cnp.int64_t[::1] order, const double[::1] node_flow,
          const cnp.int64_t[::1] out_ptr, const cnp.int64_t[::1] out_idx, const double[::1] out_flow,
          const cnp.int64_t[::1] in_ptr, const cnp.int64_t[::1] in_idx, const double[::1] in_flow,
          cnp.int64_t[::1] module, double[::1] mod_flow, double[::1] mod_exit,
          double[::1] mod_enter, cnp.int64_t[::1] mod_size):
    cdef Py_ssize_t n = node_flow.shape[0]
    cdef Py_ssize_t i, k, e, node, a, b, m, best, ntouched, nfree = 0, ncand
    cdef double sum_enter = 0.0, out_a, in_a, p, exit_a, enter_a, flow_a, delta_a
    cdef double sum_enter_a, best_delta, best_exit = 0.0, best_enter = 0.0, best_sum = 0.0
    cdef double exit_b, enter_b, new_sum, delta
    cdef long moves = 0

    cdef double[::1] out_to = np.zeros(n)
    cdef double[::1] in_from = np.zeros(n)
    cdef cnp.uint8_t[::1] mark = np.zeros(n, dtype=np.uint8)
    cdef cnp.int64_t[::1] touched = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] free = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] cands = np.empty(n + 1, dtype=np.int64)

    with nogil:
        for i in range(n):
            sum_enter += mod_enter[i]
        for i in range(n - 1, -1, -1):
            if mod_size[i] == 0:
                free[nfree] = i
                nfree += 1

        for k in range(n):
            node = order[k]
            a = module[node]
            ntouched = 0
            out_a = 0.0
            for e in range(out_ptr[node], out_ptr[node + 1]):
                m = module[out_idx[e]]
                if not mark[m]:
                    mark[m] = 1
                    touched[ntouched] = m
                    ntouched += 1
                out_to[m] += out_flow[e]
                out_a += out_flow[e]
            in_a = 0.0
            for e in range(in_ptr[node], in_ptr[node + 1]):
                m = module[in_idx[e]]
                if not mark[m]:
                    mark[m] = 1
                    touched[ntouched] = m
                    ntouched += 1
                in_from[m] += in_flow[e]
                in_a += in_flow[e]
            _isort(touched, ntouched)

            p = node_flow[node]
            exit_a = mod_exit[a] - out_a + out_to[a] + in_from[a]
            enter_a = mod_enter[a] - in_a + in_from[a] + out_to[a]
            flow_a = mod_flow[a] - p
            delta_a = ((-_plogp(enter_a) - _plogp(exit_a) + _plogp(exit_a + flow_a))
                       - (-_plogp(mod_enter[a]) - _plogp(mod_exit[a]) + _plogp(mod_exit[a] + mod_flow[a])))
            sum_enter_a = sum_enter + (enter_a - mod_enter[a])

            best = a
            best_delta = -MIN_IMPROVEMENT
            ncand = 0
            for i in range(ntouched):
                if touched[i] != a:
                    cands[ncand] = touched[i]
                    ncand += 1
            if mod_size[a] > 1 and nfree > 0:
                cands[ncand] = free[nfree - 1]
                ncand += 1
            for i in range(ncand):
                b = cands[i]
                exit_b = mod_exit[b] + out_a - out_to[b] - in_from[b]
                enter_b = mod_enter[b] + in_a - in_from[b] - out_to[b]
                new_sum = sum_enter_a + (enter_b - mod_enter[b])
                delta = (_plogp(new_sum) - _plogp(sum_enter) + delta_a
                         + (-_plogp(enter_b) - _plogp(exit_b) + _plogp(exit_b + mod_flow[b] + p))
                         - (-_plogp(mod_enter[b]) - _plogp(mod_exit[b]) + _plogp(mod_exit[b] + mod_flow[b])))
                if delta < best_delta:
                    best = b
                    best_delta = delta
                    best_exit = exit_b
                    best_enter = enter_b
                    best_sum = new_sum

            if best != a:
                mod_exit[a] = exit_a
                mod_enter[a] = enter_a
                mod_flow[a] = flow_a
                mod_size[a] -= 1
                if nfree > 0 and best == free[nfree - 1] and mod_size[best] == 0:
                    nfree -= 1
                mod_exit[best] = best_exit
                mod_enter[best] = best_enter
                mod_flow[best] = mod_flow[best] + p
                mod_size[best] += 1
                if mod_size[a] == 0:
                    mod_exit[a] = 0.0
                    mod_enter[a] = 0.0
                    mod_flow[a] = 0.0
                    free[nfree] = a
                    nfree += 1
                module[node] = best
                sum_enter = best_sum
                moves += 1

            for i in range(ntouched):
                m = touched[i]
                out_to[m] = 0.0
                in_from[m] = 0.0
                mark[m] = 0
    return moves


cdef inline void _isort(cnp.int64_t[::1] a, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef cnp.int64_t x
    for i in range(1, n):
        x = a[i]
        j = i - 1
        while j >= 0 and a[j] > x:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = x
