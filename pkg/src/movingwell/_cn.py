"""Crank-Nicolson kernels for tridiagonal Hamiltonians (interior points only)."""

import numba
import numpy as np


@numba.njit(cache=True)
def _thomas(lower, diag, upper, rhs, out, work):
    n = diag.shape[0]
    work[0] = upper[0] / diag[0]
    out[0] = rhs[0] / diag[0]
    for i in range(1, n):
        denom = diag[i] - lower[i - 1] * work[i - 1]
        if i < n - 1:
            work[i] = upper[i] / denom
        out[i] = (rhs[i] - lower[i - 1] * out[i - 1]) / denom
    for i in range(n - 2, -1, -1):
        out[i] -= work[i] * out[i + 1]


@numba.njit(cache=True)
def _step(psi, d, up, lo, c, rhs, a_lo, a_d, a_up, work):
    # (1 + c H) psi_new = (1 - c H) psi, H = tridiag(lo, d, up)
    n = psi.shape[0]
    for i in range(n):
        r = psi[i] - c * d[i] * psi[i]
        if i > 0:
            r -= c * lo[i - 1] * psi[i - 1]
        if i < n - 1:
            r -= c * up[i] * psi[i + 1]
        rhs[i] = r
        a_d[i] = 1.0 + c * d[i]
    for i in range(n - 1):
        a_up[i] = c * up[i]
        a_lo[i] = c * lo[i]
    _thomas(a_lo, a_d, a_up, rhs, psi, work)


@numba.njit(cache=True)
def run_mapped(psi, kin_diag, kin_off, dil_off, rates, dtau, hbar):
    """Steps of H = K + i hbar rate(tau) D with D the antisymmetric dilation stencil."""
    n = psi.shape[0]
    d = np.full(n, kin_diag + 0j)
    up = np.empty(n - 1, np.complex128)
    lo = np.empty(n - 1, np.complex128)
    rhs = np.empty(n, np.complex128)
    a_lo = np.empty(n - 1, np.complex128)
    a_d = np.empty(n, np.complex128)
    a_up = np.empty(n - 1, np.complex128)
    work = np.empty(n, np.complex128)
    c = 0.5j * dtau / hbar
    for s in range(rates.shape[0]):
        g = 1j * hbar * rates[s]
        for i in range(n - 1):
            up[i] = kin_off + g * dil_off[i]
            lo[i] = kin_off - g * dil_off[i]
        _step(psi, d, up, lo, c, rhs, a_lo, a_d, a_up, work)


@numba.njit(cache=True)
def ramp_potential(x, left, right, height, h):
    """height outside [left, right]; edges smeared linearly over one cell."""
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        sl = min(max((x[i] - left) / h + 0.5, 0.0), 1.0)
        sr = min(max((right - x[i]) / h + 0.5, 0.0), 1.0)
        out[i] = height * (1.0 - min(sl, sr))
    return out


@numba.njit(cache=True)
def run_lab(psi, x, kin_diag, kin_off, height, left, rights, h, dt, hbar):
    """Steps of H = K + V(x; right edge) with the right edge sampled at each midpoint."""
    n = psi.shape[0]
    up = np.full(n - 1, kin_off + 0j)
    lo = np.full(n - 1, kin_off + 0j)
    d = np.empty(n, np.complex128)
    rhs = np.empty(n, np.complex128)
    a_lo = np.empty(n - 1, np.complex128)
    a_d = np.empty(n, np.complex128)
    a_up = np.empty(n - 1, np.complex128)
    work = np.empty(n, np.complex128)
    c = 0.5j * dt / hbar
    for s in range(rights.shape[0]):
        pot = ramp_potential(x, left, rights[s], height, h)
        for i in range(n):
            d[i] = kin_diag + pot[i]
        _step(psi, d, up, lo, c, rhs, a_lo, a_d, a_up, work)
