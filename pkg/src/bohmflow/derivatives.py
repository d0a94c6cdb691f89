"""Finite-difference stencils and quadrature shared by the field and diagnostics layers.

Interior points use 4th-order central stencils so that derivative truncation
error sits well below the identity-check tolerances; the outermost points fall
back to 2nd-order one-sided formulas. All operators assume a uniform grid.
"""

import numpy as np


def gradient(f: np.ndarray, dx: float) -> np.ndarray:
    """First derivative: 4th-order central in the interior, 2nd-order at edges."""
    f = np.asarray(f)
    if f.shape[-1] < 6:
        raise ValueError("need at least 6 points for the derivative stencils")
    g = np.empty_like(f)
    # 4th-order central: (f[-2] - 8 f[-1] + 8 f[+1] - f[+2]) / 12 dx
    g[..., 2:-2] = (f[..., :-4] - 8.0 * f[..., 1:-3]
                    + 8.0 * f[..., 3:-1] - f[..., 4:]) / (12.0 * dx)
    # 2nd-order central one point in from each edge
    g[..., 1] = (f[..., 2] - f[..., 0]) / (2.0 * dx)
    g[..., -2] = (f[..., -1] - f[..., -3]) / (2.0 * dx)
    # 2nd-order one-sided at the edges
    g[..., 0] = (-3.0 * f[..., 0] + 4.0 * f[..., 1] - f[..., 2]) / (2.0 * dx)
    g[..., -1] = (3.0 * f[..., -1] - 4.0 * f[..., -2] + f[..., -3]) / (2.0 * dx)
    return g


def second_derivative(f: np.ndarray, dx: float) -> np.ndarray:
    """Second derivative: 4th-order central in the interior, 2nd-order at edges."""
    f = np.asarray(f)
    if f.shape[-1] < 6:
        raise ValueError("need at least 6 points for the derivative stencils")
    h = np.empty_like(f)
    inv12 = 1.0 / (12.0 * dx * dx)
    h[..., 2:-2] = (-f[..., :-4] + 16.0 * f[..., 1:-3] - 30.0 * f[..., 2:-2]
                    + 16.0 * f[..., 3:-1] - f[..., 4:]) * inv12
    invdx2 = 1.0 / (dx * dx)
    h[..., 1] = (f[..., 0] - 2.0 * f[..., 1] + f[..., 2]) * invdx2
    h[..., -2] = (f[..., -3] - 2.0 * f[..., -2] + f[..., -1]) * invdx2
    h[..., 0] = (2.0 * f[..., 0] - 5.0 * f[..., 1] + 4.0 * f[..., 2] - f[..., 3]) * invdx2
    h[..., -1] = (2.0 * f[..., -1] - 5.0 * f[..., -2] + 4.0 * f[..., -3] - f[..., -4]) * invdx2
    return h


def trapezoid(f: np.ndarray, dx: float) -> float:
    """Trapezoid quadrature on a uniform grid; the single rule for all spatial integrals."""
    f = np.asarray(f)
    return float((f[..., 1:] + f[..., :-1]).sum(axis=-1) * (0.5 * dx))


def masked_trapezoid(f: np.ndarray, mask: np.ndarray, dx: float) -> float:
    """Trapezoid quadrature with masked points contributing zero."""
    g = np.where(mask, f, 0.0)
    return trapezoid(g, dx)
