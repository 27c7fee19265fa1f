"""In-place statevector gate kernels (pure-numpy fallback).

Same contract as the compiled extension: qubit q occupies bit (n - 1 - q)
of the basis index (q0 is the most significant bit).
"""

BACKEND_NAME = "python"


def apply_single(amp, n, target, u00, u01, u10, u11):
    v = amp.reshape((2,) * n)
    sl0 = (slice(None),) * target + (0,)
    sl1 = (slice(None),) * target + (1,)
    a0 = v[sl0].copy()
    a1 = v[sl1].copy()
    v[sl0] = u00 * a0 + u01 * a1
    v[sl1] = u10 * a0 + u11 * a1


def apply_controlled_single(amp, n, control, target, u00, u01, u10, u11):
    v = amp.reshape((2,) * n)
    base = [slice(None)] * n
    base[control] = 1
    lo = list(base)
    hi = list(base)
    lo[target] = 0
    hi[target] = 1
    lo, hi = tuple(lo), tuple(hi)
    a0 = v[lo].copy()
    a1 = v[hi].copy()
    v[lo] = u00 * a0 + u01 * a1
    v[hi] = u10 * a0 + u11 * a1


def apply_cz(amp, n, qa, qb):
    v = amp.reshape((2,) * n)
    idx = [slice(None)] * n
    idx[qa] = 1
    idx[qb] = 1
    v[tuple(idx)] *= -1.0
