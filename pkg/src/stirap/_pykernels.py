"""Reference numpy implementations of the hot loops.

Used when the compiled ``_ckernels`` extension is unavailable, and by the test
suite as the cross-check for it. Signatures match ``_ckernels`` exactly.
"""
import numpy as np


def rk4_propagate(H, psi0, dt):
    """Fixed-step RK4 for ``i dpsi/dt = H(t) psi``.

    ``H`` holds ``2N + 1`` Hamiltonian samples on the half-step grid
    ``t0 + j*dt/2``; the result has ``N + 1`` rows, one per full step.
    """
    H = np.ascontiguousarray(H, dtype=complex)
    psi = np.array(psi0, dtype=complex)
    nsteps = (H.shape[0] - 1) // 2
    out = np.empty((nsteps + 1, psi.shape[0]), dtype=complex)
    out[0] = psi
    gen = -1j * H
    half = 0.5 * dt
    sixth = dt / 6.0
    for k in range(nsteps):
        a, b, c = gen[2 * k], gen[2 * k + 1], gen[2 * k + 2]
        k1 = a @ psi
        k2 = b @ (psi + half * k1)
        k3 = b @ (psi + half * k2)
        k4 = c @ (psi + dt * k3)
        psi = psi + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = psi
    return out


def half_step_unitaries(V, l1, l2, tau):
    """Per-point ``exp(-1j * tau * (diag(V[:, x]) + couplings))`` as an ``(n, 3, 3)`` array."""
    V = np.asarray(V, dtype=float)
    n = V.shape[1]
    M = np.zeros((n, 3, 3))
    M[:, 0, 0] = V[0]
    M[:, 1, 1] = V[1]
    M[:, 2, 2] = V[2]
    M[:, 0, 1] = M[:, 1, 0] = l1
    M[:, 1, 2] = M[:, 2, 1] = l2
    w, Q = np.linalg.eigh(M)
    return np.matmul(Q * np.exp(-1j * tau * w)[:, None, :], np.swapaxes(Q, 1, 2))


def apply_channel_unitaries(U, psi):
    """In place: ``psi[:, x] = U[x] @ psi[:, x]``."""
    psi[...] = np.einsum("xcd,dx->cx", U, psi)
