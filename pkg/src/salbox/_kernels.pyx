# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled rectangle kernel.

Line-for-line equivalent to _kernels_py.largest_rectangle; both backends
must return identical rectangles, so the scan order, the strictly-greater
pop condition, and the strict area improvement are the same.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def largest_rectangle(mask):
    """Largest all-ones axis-aligned rectangle in a {0,1} mask.

    Returns (x1, y1, x2, y2) half-open, or None when the mask has no ones.
    """
    cdef const cnp.uint8_t[:, ::1] m = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef Py_ssize_t h = m.shape[0]
    cdef Py_ssize_t w = m.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] heights_arr = np.zeros(w + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] heights = heights_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=1] stack_arr = np.empty(w + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] stack = stack_arr
    cdef Py_ssize_t y, x, sp, top, left
    cdef cnp.int64_t cur, bar, area
    cdef cnp.int64_t best_area = 0
    cdef Py_ssize_t bx1 = 0, by1 = 0, bx2 = 0, by2 = 0

    for y in range(h):
        for x in range(w):
            if m[y, x]:
                heights[x] = heights[x] + 1
            else:
                heights[x] = 0
        sp = 0
        for x in range(w + 1):
            cur = heights[x]  # heights[w] stays 0 as a sentinel
            while sp > 0 and heights[stack[sp - 1]] > cur:
                sp -= 1
                top = stack[sp]
                bar = heights[top]
                left = stack[sp - 1] + 1 if sp > 0 else 0
                area = bar * (x - left)
                if area > best_area:
                    best_area = area
                    bx1 = left
                    by1 = y - bar + 1
                    bx2 = x
                    by2 = y + 1
            stack[sp] = x
            sp += 1

    if best_area == 0:
        return None
    return (bx1, by1, bx2, by2)
