"""Compiled raster kernels.

All distances in here are in cell units and kept as integers, so the results
are exact.  Masks are ``(ny, nx)`` boolean arrays indexed ``[j, i]``.

Foreground is handed to the row kernels as per-column runs (CSR layout:
``ptr``, ``starts``, ``ends``), which lets every kernel stream one row at a
time instead of materialising a full column-distance array.
"""

import numpy as np
from numba import njit

INF = np.int64(1) << 62
NO_SITE = np.int64(-1)


@njit(cache=True)
def column_runs(mask, invert):
    """Per-column runs of foreground (or of background when ``invert``)."""
    ny, nx = mask.shape
    ptr = np.zeros(nx + 1, np.int64)
    prev = np.zeros(nx, np.bool_)
    for j in range(ny):
        for i in range(nx):
            v = mask[j, i] != invert
            if v and not prev[i]:
                ptr[i + 1] += 1
            prev[i] = v
    for i in range(nx):
        ptr[i + 1] += ptr[i]
    total = ptr[nx]
    starts = np.empty(total, np.int64)
    ends = np.empty(total, np.int64)
    cursor = ptr[:nx].copy()
    prev[:] = False
    for j in range(ny):
        for i in range(nx):
            v = mask[j, i] != invert
            if v and not prev[i]:
                starts[cursor[i]] = j
            elif prev[i] and not v:
                ends[cursor[i]] = j - 1
                cursor[i] += 1
            prev[i] = v
    for i in range(nx):
        if prev[i]:
            ends[cursor[i]] = ny - 1
    return ptr, starts, ends


@njit(cache=True)
def _column_gaps(ptr, starts, ends, p, j, g):
    """Vertical distance from row ``j`` to the nearest run in every column.

    ``p`` holds the per-column cursor and must only ever see increasing ``j``.
    """
    nx = g.shape[0]
    for i in range(nx):
        lo = ptr[i]
        hi = ptr[i + 1]
        k = p[i]
        while k < hi and ends[k] < j:
            k += 1
        p[i] = k
        if k < hi and starts[k] <= j:
            g[i] = 0
            continue
        best = INF
        if k < hi:
            best = starts[k] - j
        if k > lo:
            above = j - ends[k - 1]
            if above < best:
                best = above
        g[i] = best


@njit(cache=True)
def _row_envelope(g, v, F, zn, zd, out):
    """Exact squared distance along one row (lower envelope of parabolas).

    Breakpoints between parabolas are kept as integer fractions ``zn / zd`` so
    no comparison ever rounds.  Returns the number of sites; when it is zero
    ``out`` is left untouched.
    """
    nx = g.shape[0]
    k = -1
    for q in range(nx):
        gq = g[q]
        if gq >= INF:
            continue
        fq = gq * gq + q * q
        if k < 0:
            k = 0
            v[0] = q
            F[0] = fq
            continue
        a = np.int64(0)
        b = np.int64(0)
        while True:
            a = fq - F[k]
            b = 2 * (q - v[k])
            if k > 0 and a * zd[k] <= zn[k] * b:
                k -= 1
            else:
                break
        k += 1
        v[k] = q
        F[k] = fq
        zn[k] = a
        zd[k] = b
    if k < 0:
        return 0
    m = 0
    for x in range(nx):
        while m < k and zn[m + 1] < x * zd[m + 1]:
            m += 1
        dx = x - v[m]
        gv = g[v[m]]
        out[x] = dx * dx + gv * gv
    return k + 1


@njit(cache=True)
def edt_sq(ptr, starts, ends, ny, nx):
    """Full squared-distance field, ``NO_SITE`` everywhere if no foreground."""
    d2 = np.empty((ny, nx), np.int64)
    g = np.empty(nx, np.int64)
    p = ptr[:nx].copy()
    v = np.empty(nx, np.int64)
    F = np.empty(nx, np.int64)
    zn = np.empty(nx, np.int64)
    zd = np.empty(nx, np.int64)
    row = np.empty(nx, np.int64)
    for j in range(ny):
        _column_gaps(ptr, starts, ends, p, j, g)
        if _row_envelope(g, v, F, zn, zd, row) == 0:
            d2[j, :] = NO_SITE
        else:
            d2[j, :] = row
    return d2


@njit(cache=True)
def edt_threshold(ptr, starts, ends, ny, nx, t2, above):
    """``d2 > t2`` (``above``) or ``d2 <= t2`` computed row by row.

    Cells with no site at all count as infinitely far.
    """
    out = np.empty((ny, nx), np.bool_)
    g = np.empty(nx, np.int64)
    p = ptr[:nx].copy()
    v = np.empty(nx, np.int64)
    F = np.empty(nx, np.int64)
    zn = np.empty(nx, np.int64)
    zd = np.empty(nx, np.int64)
    row = np.empty(nx, np.int64)
    for j in range(ny):
        _column_gaps(ptr, starts, ends, p, j, g)
        if _row_envelope(g, v, F, zn, zd, row) == 0:
            out[j, :] = above
            continue
        for i in range(nx):
            if above:
                out[j, i] = row[i] > t2
            else:
                out[j, i] = row[i] <= t2
    return out


@njit(cache=True)
def directed_max_sq(a_mask, ptr, starts, ends):
    """max over foreground of ``a_mask`` of the squared distance to the runs.

    Returns -1 when ``a_mask`` is empty and ``INF`` when there are no runs.
    """
    ny, nx = a_mask.shape
    g = np.empty(nx, np.int64)
    p = ptr[:nx].copy()
    v = np.empty(nx, np.int64)
    F = np.empty(nx, np.int64)
    zn = np.empty(nx, np.int64)
    zd = np.empty(nx, np.int64)
    row = np.empty(nx, np.int64)
    best = np.int64(-1)
    for j in range(ny):
        has_a = False
        for i in range(nx):
            if a_mask[j, i]:
                has_a = True
                break
        # the column cursors must still advance on skipped rows
        _column_gaps(ptr, starts, ends, p, j, g)
        if not has_a:
            continue
        if _row_envelope(g, v, F, zn, zd, row) == 0:
            return INF
        for i in range(nx):
            if a_mask[j, i] and row[i] > best:
                best = row[i]
    return best


@njit(cache=True)
def isqrt_table(r2):
    """w[g] = floor(sqrt(r2 - g*g)) for g in 0..floor(sqrt(r2))."""
    R = np.int64(np.sqrt(np.float64(r2)))
    while R * R > r2:
        R -= 1
    while (R + 1) * (R + 1) <= r2:
        R += 1
    w = np.empty(R + 1, np.int64)
    for gi in range(R + 1):
        rem = r2 - gi * gi
        s = np.int64(np.sqrt(np.float64(rem)))
        while s * s > rem:
            s -= 1
        while (s + 1) * (s + 1) <= rem:
            s += 1
        w[gi] = s
    return w


@njit(cache=True)
def dilate_sq(ptr, starts, ends, ny, nx, r2):
    """Cells within squared distance ``r2`` of the runs (closed digital disk).

    Uses interval reach instead of the parabola envelope: a site at column
    ``i`` with vertical gap ``g`` covers ``|x - i| <= isqrt(r2 - g^2)``.
    """
    w = isqrt_table(r2)
    R = w.shape[0] - 1
    out = np.empty((ny, nx), np.bool_)
    g = np.empty(nx, np.int64)
    p = ptr[:nx].copy()
    width = np.empty(nx, np.int64)
    for j in range(ny):
        _column_gaps(ptr, starts, ends, p, j, g)
        for i in range(nx):
            width[i] = w[g[i]] if g[i] <= R else -1
        reach = np.int64(-1)
        for x in range(nx):
            if width[x] >= 0 and x + width[x] > reach:
                reach = x + width[x]
            out[j, x] = reach >= x
        lo = np.int64(nx)
        for x in range(nx - 1, -1, -1):
            if width[x] >= 0 and x - width[x] < lo:
                lo = x - width[x]
            if lo <= x:
                out[j, x] = True
    return out


@njit(cache=True)
def label8(mask):
    """Two-pass union-find labelling with 8-connectivity.

    Labels are dense and numbered by first visit in row-major order.
    """
    ny, nx = mask.shape
    labels = np.zeros((ny, nx), np.int32)
    parent = np.zeros(ny * ((nx + 1) // 2) + 2, np.int32)
    nlab = 0
    for j in range(ny):
        for i in range(nx):
            if not mask[j, i]:
                continue
            best = 0
            # already-visited neighbours: W, NW, N, NE
            for dj, di in ((0, -1), (-1, -1), (-1, 0), (-1, 1)):
                jj = j + dj
                ii = i + di
                if jj < 0 or ii < 0 or ii >= nx:
                    continue
                lab = labels[jj, ii]
                if lab == 0:
                    continue
                while parent[lab] != lab:
                    lab = parent[lab]
                if best == 0:
                    best = lab
                elif lab != best:
                    if lab < best:
                        parent[best] = lab
                        best = lab
                    else:
                        parent[lab] = best
            if best == 0:
                nlab += 1
                parent[nlab] = nlab
                best = nlab
            labels[j, i] = best
    final = np.zeros(nlab + 1, np.int32)
    count = 0
    for lab in range(1, nlab + 1):
        root = lab
        while parent[root] != root:
            root = parent[root]
        if root == lab:
            count += 1
            final[lab] = count
        else:
            final[lab] = final[root]
    for j in range(ny):
        for i in range(nx):
            if labels[j, i]:
                labels[j, i] = final[labels[j, i]]
    return labels, count


@njit(cache=True)
def _isqrt(x):
    """floor(sqrt(x)) for a non-negative int64."""
    r = np.int64(np.sqrt(np.float64(x)))
    while r * r > x:
        r -= 1
    while (r + 1) * (r + 1) <= x:
        r += 1
    return r


@njit(cache=True)
def _find(parent, a):
    while parent[a] != a:
        parent[a] = parent[parent[a]]
        a = parent[a]
    return a


@njit(cache=True)
def _row_lookup(ci_list, lo, hi, i):
    """Position of column ``i`` in the sorted slice ``ci_list[lo:hi]``, or -1."""
    end = hi
    while lo < hi:
        mid = (lo + hi) >> 1
        if ci_list[mid] < i:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo < end and ci_list[lo] == i else -1


@njit(cache=True)
def near_nearest_split(mask, labels, d2, cj, ci, sep2, slack):
    """Inspect the foreground cells within one cell of the minimum distance.

    Returns 2 if they touch at least two components, 1 if they fall into more
    than one cluster, else 0.  Two near-nearest cells share a cluster when
    they are within ``sqrt(sep2)`` cells of each other or are joined by an
    8-path of foreground cells no farther than ``dmin + slack`` from the
    probe; the path rule bridges the staircase gaps of a digitized smooth arc.
    Only the thin shell ``dmin <= dist <= dmin + slack`` is visited.
    """
    ny, nx = mask.shape
    dmin = np.sqrt(np.float64(d2))
    lim_near = (dmin + 1.0) * (dmin + 1.0)
    shell = np.int64(np.floor((dmin + slack) * (dmin + slack)))
    R = _isqrt(shell)
    nrows = 2 * R + 1
    row_ptr = np.zeros(nrows + 1, np.int64)
    pj = np.empty(0, np.int64)
    pi = np.empty(0, np.int64)
    near = np.empty(0, np.bool_)
    fill = np.empty(0, np.int64)
    # two passes over the shell: count, then fill in row-major order
    for rep in range(2):
        if rep == 1:
            for k in range(nrows):
                row_ptr[k + 1] += row_ptr[k]
            m = row_ptr[nrows]
            pj = np.empty(m, np.int64)
            pi = np.empty(m, np.int64)
            near = np.zeros(m, np.bool_)
            fill = row_ptr[:nrows].copy()
        for k in range(nrows):
            dj = k - R
            j = cj + dj
            if j < 0 or j >= ny:
                continue
            outer = _isqrt(shell - dj * dj)
            rest = d2 - dj * dj - 1
            # |di| <= inner is strictly closer than dmin, hence background
            inner = _isqrt(rest) if rest >= 0 else np.int64(-1)
            for di in range(-outer, outer + 1):
                if -inner <= di <= inner:
                    continue
                i = ci + di
                if i < 0 or i >= nx or not mask[j, i]:
                    continue
                if rep == 0:
                    row_ptr[k + 1] += 1
                else:
                    q = fill[k]
                    pj[q] = j
                    pi[q] = i
                    near[q] = dj * dj + di * di <= lim_near
                    fill[k] += 1
    m = row_ptr[nrows]
    first = -1
    k_near = 0
    for q in range(m):
        if near[q]:
            k_near += 1
            lab = labels[pj[q], pi[q]]
            if first < 0:
                first = lab
            elif lab != first:
                return 2
    if k_near < 2:
        return 0
    parent = np.arange(m)
    for k in range(nrows):
        for q in range(row_ptr[k], row_ptr[k + 1]):
            # left neighbour in this row
            if q > row_ptr[k] and pi[q - 1] == pi[q] - 1:
                a, b = _find(parent, q), _find(parent, q - 1)
                if a != b:
                    parent[a] = b
            if k == 0:
                continue
            for di in (-1, 0, 1):
                t = _row_lookup(pi, row_ptr[k - 1], row_ptr[k], pi[q] + di)
                if t >= 0:
                    a, b = _find(parent, q), _find(parent, t)
                    if a != b:
                        parent[a] = b
    idx = np.empty(k_near, np.int64)
    c = 0
    for q in range(m):
        if near[q]:
            idx[c] = q
            c += 1
    for x in range(k_near):
        for y in range(x + 1, k_near):
            a, b = idx[x], idx[y]
            ddj = pj[a] - pj[b]
            ddi = pi[a] - pi[b]
            if ddj * ddj + ddi * ddi <= sep2:
                ra, rb = _find(parent, a), _find(parent, b)
                if ra != rb:
                    parent[ra] = rb
    root = _find(parent, idx[0])
    for x in range(1, k_near):
        if _find(parent, idx[x]) != root:
            return 1
    return 0


@njit(cache=True)
def scan_band(mask, labels, d2, lo2, hi2, sep2, slack):
    """First background cell (row-major) with ``lo2 <= d2 <= hi2`` whose
    near-nearest foreground set is split; returns ``(j, i, reason)`` or
    ``(-1, -1, 0)``.
    """
    ny, nx = mask.shape
    for j in range(ny):
        for i in range(nx):
            d = d2[j, i]
            if d <= 0 or d < lo2 or d > hi2:
                continue
            res = near_nearest_split(mask, labels, d, j, i, sep2, slack)
            if res > 0:
                return j, i, res
    return -1, -1, 0
