"""Pure-numpy implementations of the hot kernels.

The convolutions are expressed as one matmul per kernel offset, which keeps
them direct (no im2col buffer) while still hitting BLAS. RoI align is
vectorized gather/scatter; the scatter in the backward pass relies on
``np.add.at`` and is the main reason the numba backend exists.
"""

import numpy as np


def conv2d_forward(x, w, b):
    # x (N,H,W,Ci), w (k,k,Ci,Co), b (Co,); 'same' zero padding, odd k
    n, h, wd, _ = x.shape
    k = w.shape[0]
    co = w.shape[3]
    r = k // 2
    if r == 0:
        out = x @ w[0, 0]
        out += b
        return out
    xp = np.zeros((n, h + 2 * r, wd + 2 * r, x.shape[3]), dtype=x.dtype)
    xp[:, r : r + h, r : r + wd, :] = x
    out = np.empty((n, h, wd, co), dtype=x.dtype)
    out[...] = b
    for ky in range(k):
        for kx in range(k):
            out += xp[:, ky : ky + h, kx : kx + wd, :] @ w[ky, kx]
    return out


def conv2d_backward_input(g, w):
    # g (N,H,W,Co) -> gx (N,H,W,Ci); correlation backward = scatter per offset
    n, h, wd, _ = g.shape
    k = w.shape[0]
    ci = w.shape[2]
    r = k // 2
    if r == 0:
        return g @ w[0, 0].T
    gxp = np.zeros((n, h + 2 * r, wd + 2 * r, ci), dtype=g.dtype)
    for ky in range(k):
        for kx in range(k):
            gxp[:, ky : ky + h, kx : kx + wd, :] += g @ w[ky, kx].T
    return np.ascontiguousarray(gxp[:, r : r + h, r : r + wd, :])


def conv2d_backward_kernel(x, g):
    # x (N,H,W,Ci), g (N,H,W,Co) -> gw (k,k,Ci,Co) for k inferred by caller
    raise NotImplementedError("use conv2d_backward_kernel_k")


def conv2d_backward_kernel_k(x, g, k):
    n, h, wd, ci = x.shape
    co = g.shape[3]
    r = k // 2
    gflat = g.reshape(-1, co)
    if r == 0:
        return (x.reshape(-1, ci).T @ gflat).reshape(1, 1, ci, co)
    xp = np.zeros((n, h + 2 * r, wd + 2 * r, ci), dtype=x.dtype)
    xp[:, r : r + h, r : r + wd, :] = x
    gw = np.empty((k, k, ci, co), dtype=x.dtype)
    for ky in range(k):
        for kx in range(k):
            patch = xp[:, ky : ky + h, kx : kx + wd, :].reshape(-1, ci)
            gw[ky, kx] = patch.T @ gflat
    return gw


def _bilinear_coords(boxes, s, h, w):
    # bin-center sample points in pixel-center coordinates, clamped to borders
    n = boxes.shape[0]
    x1, y1, x2, y2 = boxes[:, 0], boxes[:, 1], boxes[:, 2], boxes[:, 3]
    bw = (x2 - x1) / s
    bh = (y2 - y1) / s
    idx = np.arange(s, dtype=boxes.dtype) + boxes.dtype.type(0.5)
    px = x1[:, None] + idx[None, :] * bw[:, None]  # (n,s)
    py = y1[:, None] + idx[None, :] * bh[:, None]
    u = np.clip(px - 0.5, 0.0, w - 1.0)
    v = np.clip(py - 0.5, 0.0, h - 1.0)
    c0 = np.minimum(np.floor(u), w - 2.0) if w > 1 else np.zeros_like(u)
    r0 = np.minimum(np.floor(v), h - 2.0) if h > 1 else np.zeros_like(v)
    fu = u - c0
    fv = v - r0
    return n, c0.astype(np.int64), r0.astype(np.int64), fu, fv


def roi_align_forward(fmap, boxes, s):
    # fmap (H,W,C), boxes (n,4) in feature coords -> (n,s,s,C)
    h, w, c = fmap.shape
    n, c0, r0, fu, fv = _bilinear_coords(boxes, s, h, w)
    c1 = np.minimum(c0 + 1, w - 1)
    r1 = np.minimum(r0 + 1, h - 1)
    # grids (n,s,s)
    C0 = np.broadcast_to(c0[:, None, :], (n, s, s))
    C1 = np.broadcast_to(c1[:, None, :], (n, s, s))
    R0 = np.broadcast_to(r0[:, :, None], (n, s, s))
    R1 = np.broadcast_to(r1[:, :, None], (n, s, s))
    FU = np.broadcast_to(fu[:, None, :], (n, s, s))[..., None]
    FV = np.broadcast_to(fv[:, :, None], (n, s, s))[..., None]
    out = (
        fmap[R0, C0] * (1 - FV) * (1 - FU)
        + fmap[R0, C1] * (1 - FV) * FU
        + fmap[R1, C0] * FV * (1 - FU)
        + fmap[R1, C1] * FV * FU
    )
    return np.ascontiguousarray(out, dtype=fmap.dtype)


def roi_align_backward(g, boxes, h, w):
    # g (n,s,s,C) -> gfmap (H,W,C); scatter bilinear weights back
    n_, s, _, c = g.shape
    n, c0, r0, fu, fv = _bilinear_coords(boxes, s, h, w)
    c1 = np.minimum(c0 + 1, w - 1)
    r1 = np.minimum(r0 + 1, h - 1)
    gf = np.zeros((h, w, c), dtype=g.dtype)
    C0 = np.broadcast_to(c0[:, None, :], (n, s, s))
    C1 = np.broadcast_to(c1[:, None, :], (n, s, s))
    R0 = np.broadcast_to(r0[:, :, None], (n, s, s))
    R1 = np.broadcast_to(r1[:, :, None], (n, s, s))
    FU = np.broadcast_to(fu[:, None, :], (n, s, s))[..., None]
    FV = np.broadcast_to(fv[:, :, None], (n, s, s))[..., None]
    np.add.at(gf, (R0, C0), g * (1 - FV) * (1 - FU))
    np.add.at(gf, (R0, C1), g * (1 - FV) * FU)
    np.add.at(gf, (R1, C0), g * FV * (1 - FU))
    np.add.at(gf, (R1, C1), g * FV * FU)
    return gf
