"""Numba-compiled hot kernels. Loop order keeps the channel axis innermost
so LLVM can vectorize it; no fastmath, so float semantics match run to run."""

import numpy as np
from numba import njit


@njit(cache=True)
def conv2d_forward(x, w, b):
    n, h, wd, ci = x.shape
    k = w.shape[0]
    co = w.shape[3]
    r = k // 2
    out = np.empty((n, h, wd, co), dtype=x.dtype)
    for im in range(n):
        for y in range(h):
            for xx in range(wd):
                for c in range(co):
                    out[im, y, xx, c] = b[c]
                for ky in range(k):
                    yy = y + ky - r
                    if yy < 0 or yy >= h:
                        continue
                    for kx in range(k):
                        xi = xx + kx - r
                        if xi < 0 or xi >= wd:
                            continue
                        for c_in in range(ci):
                            a = x[im, yy, xi, c_in]
                            for c in range(co):
                                out[im, y, xx, c] += a * w[ky, kx, c_in, c]
    return out


@njit(cache=True)
def conv2d_backward_input(g, w):
    n, h, wd, co = g.shape
    k = w.shape[0]
    ci = w.shape[2]
    r = k // 2
    gx = np.zeros((n, h, wd, ci), dtype=g.dtype)
    for im in range(n):
        for y in range(h):
            for xx in range(wd):
                for ky in range(k):
                    yy = y + ky - r
                    if yy < 0 or yy >= h:
                        continue
                    for kx in range(k):
                        xi = xx + kx - r
                        if xi < 0 or xi >= wd:
                            continue
                        for c in range(co):
                            a = g[im, y, xx, c]
                            for c_in in range(ci):
                                gx[im, yy, xi, c_in] += a * w[ky, kx, c_in, c]
    return gx


@njit(cache=True)
def conv2d_backward_kernel_k(x, g, k):
    n, h, wd, ci = x.shape
    co = g.shape[3]
    r = k // 2
    gw = np.zeros((k, k, ci, co), dtype=x.dtype)
    for im in range(n):
        for y in range(h):
            for xx in range(wd):
                for ky in range(k):
                    yy = y + ky - r
                    if yy < 0 or yy >= h:
                        continue
                    for kx in range(k):
                        xi = xx + kx - r
                        if xi < 0 or xi >= wd:
                            continue
                        for c_in in range(ci):
                            a = x[im, yy, xi, c_in]
                            for c in range(co):
                                gw[ky, kx, c_in, c] += a * g[im, y, xx, c]
    return gw


@njit(cache=True)
def roi_align_forward(fmap, boxes, s):
    h, w, c = fmap.shape
    n = boxes.shape[0]
    out = np.empty((n, s, s, c), dtype=fmap.dtype)
    for b in range(n):
        x1 = boxes[b, 0]
        y1 = boxes[b, 1]
        bw = (boxes[b, 2] - x1) / s
        bh = (boxes[b, 3] - y1) / s
        for i in range(s):
            py = y1 + (i + 0.5) * bh
            v = min(max(py - 0.5, 0.0), h - 1.0)
            r0 = int(v)
            if r0 > h - 2:
                r0 = max(h - 2, 0)
            r1 = min(r0 + 1, h - 1)
            fv = v - r0
            for j in range(s):
                px = x1 + (j + 0.5) * bw
                u = min(max(px - 0.5, 0.0), w - 1.0)
                c0 = int(u)
                if c0 > w - 2:
                    c0 = max(w - 2, 0)
                c1 = min(c0 + 1, w - 1)
                fu = u - c0
                w00 = (1.0 - fv) * (1.0 - fu)
                w01 = (1.0 - fv) * fu
                w10 = fv * (1.0 - fu)
                w11 = fv * fu
                for ch in range(c):
                    out[b, i, j, ch] = (
                        fmap[r0, c0, ch] * w00
                        + fmap[r0, c1, ch] * w01
                        + fmap[r1, c0, ch] * w10
                        + fmap[r1, c1, ch] * w11
                    )
    return out


@njit(cache=True)
def roi_align_backward(g, boxes, h, w):
    n, s, _, c = g.shape
    gf = np.zeros((h, w, c), dtype=g.dtype)
    for b in range(n):
        x1 = boxes[b, 0]
        y1 = boxes[b, 1]
        bw = (boxes[b, 2] - x1) / s
        bh = (boxes[b, 3] - y1) / s
        for i in range(s):
            py = y1 + (i + 0.5) * bh
            v = min(max(py - 0.5, 0.0), h - 1.0)
            r0 = int(v)
            if r0 > h - 2:
                r0 = max(h - 2, 0)
            r1 = min(r0 + 1, h - 1)
            fv = v - r0
            for j in range(s):
                px = x1 + (j + 0.5) * bw
                u = min(max(px - 0.5, 0.0), w - 1.0)
                c0 = int(u)
                if c0 > w - 2:
                    c0 = max(w - 2, 0)
                c1 = min(c0 + 1, w - 1)
                fu = u - c0
                w00 = (1.0 - fv) * (1.0 - fu)
                w01 = (1.0 - fv) * fu
                w10 = fv * (1.0 - fu)
                w11 = fv * fu
                for ch in range(c):
                    gv = g[b, i, j, ch]
                    gf[r0, c0, ch] += gv * w00
                    gf[r0, c1, ch] += gv * w01
                    gf[r1, c0, ch] += gv * w10
                    gf[r1, c1, ch] += gv * w11
    return gf
