# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the hot loops in ``_pykernels`` (same signatures)."""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, sqrt, fabs

cnp.import_array()

cdef enum:
    MAXDIM = 8


def rk4_propagate(H, psi0, double dt):
    cdef const double complex[:, :, ::1] h = np.ascontiguousarray(H, dtype=np.complex128)
    cdef Py_ssize_t n = h.shape[1]
    if n > MAXDIM or h.shape[2] != n:
        raise ValueError("Hamiltonian samples must be square and at most 8x8")
    cdef Py_ssize_t nsteps = (h.shape[0] - 1) // 2
    out_arr = np.empty((nsteps + 1, n), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef double complex psi[MAXDIM]
    cdef double complex k1[MAXDIM]
    cdef double complex k2[MAXDIM]
    cdef double complex k3[MAXDIM]
    cdef double complex k4[MAXDIM]
    cdef double complex tmp[MAXDIM]
    cdef const double complex[::1] p0 = np.ascontiguousarray(psi0, dtype=np.complex128)
    cdef Py_ssize_t i, j, k
    cdef double half = 0.5 * dt
    cdef double sixth = dt / 6.0
    cdef double complex acc
    cdef double complex mi = -1j
    for i in range(n):
        psi[i] = p0[i]
        out[0, i] = psi[i]
    with nogil:
        for k in range(nsteps):
            for i in range(n):
                acc = 0
                for j in range(n):
                    acc = acc + (mi * h[2 * k, i, j]) * psi[j]
                k1[i] = acc
            for i in range(n):
                tmp[i] = psi[i] + half * k1[i]
            for i in range(n):
                acc = 0
                for j in range(n):
                    acc = acc + (mi * h[2 * k + 1, i, j]) * tmp[j]
                k2[i] = acc
            for i in range(n):
                tmp[i] = psi[i] + half * k2[i]
            for i in range(n):
                acc = 0
                for j in range(n):
                    acc = acc + (mi * h[2 * k + 1, i, j]) * tmp[j]
                k3[i] = acc
            for i in range(n):
                tmp[i] = psi[i] + dt * k3[i]
            for i in range(n):
                acc = 0
                for j in range(n):
                    acc = acc + (mi * h[2 * k + 2, i, j]) * tmp[j]
                k4[i] = acc
            for i in range(n):
                psi[i] = psi[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                out[k + 1, i] = psi[i]
    return out_arr


cdef inline void _rotate(double a[3][3], double v[3][3], int p, int q) noexcept nogil:
    cdef double apq = a[p][q]
    if apq == 0.0:
        return
    cdef double theta = (a[q][q] - a[p][p]) / (2.0 * apq)
    cdef double t
    if fabs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    cdef double c = 1.0 / sqrt(t * t + 1.0)
    cdef double s = t * c
    cdef double g, hh
    cdef int k
    for k in range(3):
        g = a[k][p]
        hh = a[k][q]
        a[k][p] = c * g - s * hh
        a[k][q] = s * g + c * hh
    for k in range(3):
        g = a[p][k]
        hh = a[q][k]
        a[p][k] = c * g - s * hh
        a[q][k] = s * g + c * hh
    a[p][q] = 0.0
    a[q][p] = 0.0
    for k in range(3):
        g = v[k][p]
        hh = v[k][q]
        v[k][p] = c * g - s * hh
        v[k][q] = s * g + c * hh


cdef void _jacobi3(double a[3][3], double v[3][3]) noexcept nogil:
    cdef int i, j, sweep
    cdef double off, scale
    for i in range(3):
        for j in range(3):
            v[i][j] = 1.0 if i == j else 0.0
    for sweep in range(64):
        off = fabs(a[0][1]) + fabs(a[0][2]) + fabs(a[1][2])
        scale = fabs(a[0][0]) + fabs(a[1][1]) + fabs(a[2][2]) + off
        if off == 0.0 or off <= 1e-18 * scale:
            break
        _rotate(a, v, 0, 1)
        _rotate(a, v, 0, 2)
        _rotate(a, v, 1, 2)


def half_step_unitaries(V, double l1, double l2, double tau):
    cdef const double[:, ::1] pot = np.ascontiguousarray(V, dtype=np.float64)
    if pot.shape[0] != 3:
        raise ValueError("expected three channel potentials")
    cdef Py_ssize_t n = pot.shape[1]
    U_arr = np.empty((n, 3, 3), dtype=np.complex128)
    cdef double complex[:, :, ::1] U = U_arr
    cdef double a[3][3]
    cdef double v[3][3]
    cdef double complex ph[3]
    cdef double complex acc
    cdef Py_ssize_t x
    cdef int i, j, m
    with nogil:
        for x in range(n):
            a[0][0] = pot[0, x]
            a[1][1] = pot[1, x]
            a[2][2] = pot[2, x]
            a[0][1] = l1
            a[1][0] = l1
            a[1][2] = l2
            a[2][1] = l2
            a[0][2] = 0.0
            a[2][0] = 0.0
            _jacobi3(a, v)
            for m in range(3):
                ph[m] = cos(tau * a[m][m]) - 1j * sin(tau * a[m][m])
            for i in range(3):
                for j in range(3):
                    acc = 0
                    for m in range(3):
                        acc = acc + v[i][m] * ph[m] * v[j][m]
                    U[x, i, j] = acc
    return U_arr


def apply_channel_unitaries(U, psi):
    cdef const double complex[:, :, ::1] u = U
    cdef double complex[:, ::1] p = psi
    cdef Py_ssize_t n = p.shape[1]
    cdef Py_ssize_t x
    cdef double complex p0, p1, p2
    with nogil:
        for x in range(n):
            p0 = p[0, x]
            p1 = p[1, x]
            p2 = p[2, x]
            p[0, x] = u[x, 0, 0] * p0 + u[x, 0, 1] * p1 + u[x, 0, 2] * p2
            p[1, x] = u[x, 1, 0] * p0 + u[x, 1, 1] * p1 + u[x, 1, 2] * p2
            p[2, x] = u[x, 2, 0] * p0 + u[x, 2, 1] * p1 + u[x, 2, 2] * p2
