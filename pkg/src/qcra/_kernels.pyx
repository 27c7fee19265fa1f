# cython: boundscheck=False, wraparound=False, cdivision=True
"""In-place statevector gate kernels (compiled path).

Index convention: qubit q occupies bit (n - 1 - q) of the basis index, so
q0 is the most significant bit and the index spells the ket left to right.
"""

BACKEND_NAME = "compiled"


def apply_single(double complex[::1] amp, int n, int target,
                 double complex u00, double complex u01,
                 double complex u10, double complex u11):
    cdef Py_ssize_t dim = 1 << n
    cdef Py_ssize_t mask = 1 << (n - 1 - target)
    cdef Py_ssize_t i, j
    cdef double complex a0, a1
    for i in range(dim):
        if not (i & mask):
            j = i | mask
            a0 = amp[i]
            a1 = amp[j]
            amp[i] = u00 * a0 + u01 * a1
            amp[j] = u10 * a0 + u11 * a1


def apply_controlled_single(double complex[::1] amp, int n, int control, int target,
                            double complex u00, double complex u01,
                            double complex u10, double complex u11):
    cdef Py_ssize_t dim = 1 << n
    cdef Py_ssize_t cmask = 1 << (n - 1 - control)
    cdef Py_ssize_t tmask = 1 << (n - 1 - target)
    cdef Py_ssize_t i, j
    cdef double complex a0, a1
    for i in range(dim):
        if (i & cmask) and not (i & tmask):
            j = i | tmask
            a0 = amp[i]
            a1 = amp[j]
            amp[i] = u00 * a0 + u01 * a1
            amp[j] = u10 * a0 + u11 * a1


def apply_cz(double complex[::1] amp, int n, int qa, int qb):
    cdef Py_ssize_t dim = 1 << n
    cdef Py_ssize_t mask = (1 << (n - 1 - qa)) | (1 << (n - 1 - qb))
    cdef Py_ssize_t i
    for i in range(dim):
        if (i & mask) == mask:
            amp[i] = -amp[i]
