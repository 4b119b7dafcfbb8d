"""Pure-numpy window scan, used when the compiled kernel is unavailable.

For every row of sorted samples ``ys`` the scan visits each contiguous
window of sizes ``m..k`` and reports

* the clipped interval ``[max(mu - 2 sigma), min(mu + 2 sigma)]`` with the
  windows attaining each endpoint,
* the window of smallest mean absolute deviation (smallest size, then
  leftmost, on ties),
* when a point ``p`` is given, the largest slab ratio ``|p - mu| / (2 sigma)``
  and its window (slabs no wider than ``tol_eq`` count as zero-width and
  give 0 within ``tol_eq``, else inf).

Output is ``(out, iout)`` with ``out[:, :5] = lo, hi, ms_mu, ms_sigma,
worst_ratio`` and ``iout[:, :8] = lo_start, lo_size, hi_start, hi_size,
ms_start, ms_size, wr_start, wr_size``.
"""

import numpy as np


def _scan_row(y, m, p, tol_eq):
    k = y.shape[0]
    c = y[k // 2]
    yc = y - c
    pre = np.concatenate(([0.0], np.cumsum(yc)))
    have_p = not np.isnan(p)
    tie = 1e-12 * (y[-1] - y[0])  # sigma ties within rounding keep the earlier window
    dp = p - c

    lo, hi = -np.inf, np.inf
    lo_w = hi_w = ms_w = wr_w = (0, k)
    ms_sig, ms_mu, wr = np.inf, 0.0, -1.0
    for s in range(m, k + 1):
        a = np.arange(0, k - s + 1)
        e = a + s
        mu = (pre[e] - pre[a]) / s
        j = np.searchsorted(yc, mu, side="left")
        j = np.clip(j, a, e)
        t = ((j - a) * mu - (pre[j] - pre[a])) + ((pre[e] - pre[j]) - (e - j) * mu)
        sig = np.maximum(t / s, 0.0)
        const = y[a] == y[e - 1]
        mu = np.where(const, yc[a], mu)
        sig = np.where(const, 0.0, sig)

        lo_v = mu - 2.0 * sig
        i = int(np.argmax(lo_v))
        if lo_v[i] > lo:
            lo, lo_w = lo_v[i], (i, s)
        hi_v = mu + 2.0 * sig
        i = int(np.argmin(hi_v))
        if hi_v[i] < hi:
            hi, hi_w = hi_v[i], (i, s)
        i = int(np.argmax(sig <= sig.min() + tie))
        if sig[i] < ms_sig - tie:
            ms_sig, ms_mu, ms_w = sig[i], mu[i], (i, s)
        if have_p:
            dev = np.abs(dp - mu)
            hw = 2.0 * sig
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(hw > tol_eq, dev / np.where(hw > tol_eq, hw, 1.0),
                                 np.where(dev <= tol_eq, 0.0, np.inf))
            i = int(np.argmax(ratio))
            if ratio[i] > wr:
                wr, wr_w = ratio[i], (i, s)

    lo = max(lo, yc[0])
    hi = min(hi, yc[-1])
    out = (lo + c, hi + c, ms_mu + c, ms_sig, wr if have_p else np.nan)
    iout = (*lo_w, *hi_w, *ms_w, *wr_w)
    return out, iout


def scan_windows(ys, m, p=None, tol_eq=0.0):
    Y = np.ascontiguousarray(ys, dtype=np.float64)
    if Y.ndim != 2 or Y.shape[1] < 1:
        raise ValueError("empty sample")
    K, k = Y.shape
    if m < 1 or m > k:
        raise ValueError(f"window size m={m} outside [1, {k}]")
    P = np.full(K, np.nan) if p is None else np.asarray(p, dtype=np.float64).reshape(K)
    out = np.empty((K, 5))
    iout = np.empty((K, 8), dtype=np.intp)
    for r in range(K):
        out[r], iout[r] = _scan_row(Y[r], m, P[r], tol_eq)
    return out, iout
