"""Independent reference implementations used as test oracles."""

import numpy as np


def ssim_direct(ref, test, win=7):
    """Loop-over-windows SSIM with the same constants and sample covariance."""
    data_range = ref.max()
    c1, c2 = (0.01 * data_range) ** 2, (0.03 * data_range) ** 2
    vals = []
    n = win * win
    for i in range(ref.shape[0] - win + 1):
        for j in range(ref.shape[1] - win + 1):
            a = ref[i : i + win, j : j + win].ravel()
            b = test[i : i + win, j : j + win].ravel()
            ma, mb = a.sum() / n, b.sum() / n
            va = ((a - ma) ** 2).sum() / (n - 1)
            vb = ((b - mb) ** 2).sum() / (n - 1)
            cov = ((a - ma) * (b - mb)).sum() / (n - 1)
            vals.append((2 * ma * mb + c1) * (2 * cov + c2) / ((ma**2 + mb**2 + c1) * (va + vb + c2)))
    return float(np.mean(vals))
