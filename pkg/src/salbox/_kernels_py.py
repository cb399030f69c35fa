"""Pure-Python rectangle kernel, used when the compiled extension is absent.

Must stay line-for-line equivalent to _kernels.pyx: both backends have to
return identical rectangles, not merely equal areas, so tie-breaking (row
scan order, histogram pop order, strict area improvement) is shared.
"""

import numpy as np


def largest_rectangle(mask):
    """Largest all-ones axis-aligned rectangle in a {0,1} mask.

    Returns (x1, y1, x2, y2) half-open, or None when the mask has no ones.
    Row-by-row histogram of consecutive ones, largest-rectangle-under-
    histogram via a monotonic index stack.
    """
    mask = np.asarray(mask, dtype=np.uint8)
    h, w = mask.shape
    heights = [0] * (w + 1)  # heights[w] stays 0 as a sentinel
    stack = []
    best_area = 0
    best = None
    for y in range(h):
        row = mask[y].tolist()
        for x in range(w):
            heights[x] = heights[x] + 1 if row[x] else 0
        stack.clear()
        for x in range(w + 1):
            cur = heights[x]
            while stack and heights[stack[-1]] > cur:
                top = stack.pop()
                bar = heights[top]
                left = stack[-1] + 1 if stack else 0
                area = bar * (x - left)
                if area > best_area:
                    best_area = area
                    best = (left, y - bar + 1, x, y + 1)
            stack.append(x)
    return best
