"""Hot numeric kernels, each with a numba path and a pure-numpy path.

Three operations dominate the package's runtime and live here:

* ``alt_product_minimize`` -- alternating local eigenvector descent of
  <phi|H|phi> over three-qubit product states, batched over restarts;
* ``purity_sum_batch``     -- sum of single-party reduced purities
  (doubled, using complement symmetry) for batches of pure states;
* ``nm_concurrence``       -- Nelder-Mead minimization of the pure-state
  concurrence over the unit sphere of a subspace, batched over restarts.

Both paths implement the same arithmetic in the same order, so results
agree to rounding noise; within one backend they are fully deterministic.
The generic :func:`nelder_mead` at the bottom is the reference simplex
used for arbitrary Python objectives.
"""

from __future__ import annotations

import math

import numpy as np

from . import backend

_MONOTONE_SLACK = 1e-12


# --------------------------------------------------------------------------
# shared scalar pieces (plain Python; the numba path compiles its own copies)
# --------------------------------------------------------------------------

def _min_eig2(m00: float, m01: complex, m11: float, cur0: complex, cur1: complex):
    """Smallest eigenvalue and unit eigenvector of [[m00, m01], [m01*, m11]].

    Falls back to the current vector when the matrix is (numerically) a
    multiple of the identity, where every vector is an eigenvector.
    """
    t = 0.5 * (m00 + m11)
    d = 0.5 * (m00 - m11)
    r = math.sqrt(d * d + m01.real * m01.real + m01.imag * m01.imag)
    lam = t - r
    if r < 1e-300:
        return lam, cur0, cur1
    if d >= 0.0:
        v0 = m01
        v1 = complex(-(d + r), 0.0)
    else:
        v0 = complex(d - r, 0.0)
        v1 = m01.conjugate()
    nn = math.sqrt(v0.real * v0.real + v0.imag * v0.imag + v1.real * v1.real + v1.imag * v1.imag)
    if nn < 1e-150:
        return lam, cur0, cur1
    return lam, v0 / nn, v1 / nn


# --------------------------------------------------------------------------
# pure-numpy implementations
# --------------------------------------------------------------------------

def _alt_sweep_np(tens, a, b, c, obj, slack_ok):
    """One a,b,c sweep via einsum; returns updated state and objective."""
    m = np.einsum("ikljmn,k,l,m,n->ij", tens, b.conj(), c.conj(), b, c)
    lam, v0, v1 = _min_eig2(m[0, 0].real, m[0, 1], m[1, 1].real, a[0], a[1])
    slack_ok &= lam <= obj + _MONOTONE_SLACK
    a = np.array([v0, v1])
    m = np.einsum("kilmjn,k,l,m,n->ij", tens, a.conj(), c.conj(), a, c)
    lam2, v0, v1 = _min_eig2(m[0, 0].real, m[0, 1], m[1, 1].real, b[0], b[1])
    slack_ok &= lam2 <= lam + _MONOTONE_SLACK
    b = np.array([v0, v1])
    m = np.einsum("klimnj,k,l,m,n->ij", tens, a.conj(), b.conj(), a, b)
    lam3, v0, v1 = _min_eig2(m[0, 0].real, m[0, 1], m[1, 1].real, c[0], c[1])
    slack_ok &= lam3 <= lam2 + _MONOTONE_SLACK
    c = np.array([v0, v1])
    return a, b, c, lam3, slack_ok


def _alt_minimize_batch_np(h, starts, max_iter, ftol):
    tens = h.reshape(2, 2, 2, 2, 2, 2)
    n = starts.shape[0]
    values = np.empty(n)
    factors = np.empty((n, 3, 2), dtype=np.complex128)
    iters = np.zeros(n, dtype=np.int64)
    converged = np.zeros(n, dtype=bool)
    monotone = np.ones(n, dtype=bool)
    for r in range(n):
        a, b, c = starts[r, 0].copy(), starts[r, 1].copy(), starts[r, 2].copy()
        psi = np.kron(a, np.kron(b, c))
        obj = float(np.real(psi.conj() @ h @ psi))
        ok = True
        for it in range(1, max_iter + 1):
            prev = obj
            a, b, c, obj, ok = _alt_sweep_np(tens, a, b, c, obj, ok)
            iters[r] = it
            if prev - obj < ftol:
                converged[r] = True
                break
        values[r] = obj
        factors[r, 0], factors[r, 1], factors[r, 2] = a, b, c
        monotone[r] = ok
    return values, factors, iters, converged, monotone


def _purity_sum_batch_np(psis):
    t = psis.reshape(-1, 2, 2, 2)
    total = np.zeros(t.shape[0])
    for ax in (1, 2, 3):
        m = np.moveaxis(t, ax, 1).reshape(t.shape[0], 2, 4)
        red = m @ m.conj().transpose(0, 2, 1)
        total += np.einsum("nij,nji->n", red, red).real
    return 2.0 * total


def _concurrence_objective_np(basis, x):
    k = basis.shape[1]
    c = x[:k] + 1j * x[k:]
    nrm = np.linalg.norm(c)
    psi = basis @ (c / nrm)
    rad = 6.0 - _purity_sum_batch_np(psi[None, :])[0]
    if rad < 0.0:
        rad = 0.0
    return math.sqrt(0.5 * rad) + (nrm - 1.0) ** 2


def _nm_concurrence_batch_np(basis, starts, max_iter, ftol):
    n = starts.shape[0]
    values = np.empty(n)
    xs = np.empty_like(starts)
    iters = np.zeros(n, dtype=np.int64)
    converged = np.zeros(n, dtype=bool)
    for r in range(n):
        f = lambda x: _concurrence_objective_np(basis, x)  # noqa: E731
        values[r], xs[r], iters[r], converged[r] = nelder_mead(
            f, starts[r], max_iter, ftol
        )
    return values, xs, iters, converged


# --------------------------------------------------------------------------
# numba implementations (same arithmetic, explicit loops)
# --------------------------------------------------------------------------

if backend.NUMBA_AVAILABLE:
    from numba import njit

    _min_eig2_nb = njit(cache=True)(_min_eig2)

    @njit(cache=True)
    def _alt_minimize_batch_nb(h, starts, max_iter, ftol):
        n = starts.shape[0]
        values = np.empty(n)
        factors = np.empty((n, 3, 2), dtype=np.complex128)
        iters = np.zeros(n, dtype=np.int64)
        converged = np.zeros(n, dtype=np.bool_)
        monotone = np.ones(n, dtype=np.bool_)
        for r in range(n):
            a0, a1 = starts[r, 0, 0], starts[r, 0, 1]
            b0, b1 = starts[r, 1, 0], starts[r, 1, 1]
            c0, c1 = starts[r, 2, 0], starts[r, 2, 1]
            # initial objective <abc|h|abc>
            acc = 0.0j
            for ia in range(2):
                for ib in range(2):
                    for ic in range(2):
                        wi = (a1 if ia else a0) * (b1 if ib else b0) * (c1 if ic else c0)
                        for ja in range(2):
                            for jb in range(2):
                                for jc in range(2):
                                    wj = (a1 if ja else a0) * (b1 if jb else b0) * (c1 if jc else c0)
                                    acc += wi.conjugate() * h[4 * ia + 2 * ib + ic, 4 * ja + 2 * jb + jc] * wj
            obj = acc.real
            ok = True
            for it in range(1, max_iter + 1):
                prev = obj
                # --- update a
                e00 = 0.0j
                e01 = 0.0j
                e11 = 0.0j
                for ib in range(2):
                    for ic in range(2):
                        wi = ((b1 if ib else b0) * (c1 if ic else c0)).conjugate()
                        for jb in range(2):
                            for jc in range(2):
                                w = wi * (b1 if jb else b0) * (c1 if jc else c0)
                                e00 += w * h[2 * ib + ic, 2 * jb + jc]
                                e01 += w * h[2 * ib + ic, 4 + 2 * jb + jc]
                                e11 += w * h[4 + 2 * ib + ic, 4 + 2 * jb + jc]
                lam, a0, a1 = _min_eig2_nb(e00.real, e01, e11.real, a0, a1)
                if lam > obj + _MONOTONE_SLACK:
                    ok = False
                obj = lam
                # --- update b
                e00 = 0.0j
                e01 = 0.0j
                e11 = 0.0j
                for ia in range(2):
                    for ic in range(2):
                        wi = ((a1 if ia else a0) * (c1 if ic else c0)).conjugate()
                        for ja in range(2):
                            for jc in range(2):
                                w = wi * (a1 if ja else a0) * (c1 if jc else c0)
                                e00 += w * h[4 * ia + ic, 4 * ja + jc]
                                e01 += w * h[4 * ia + ic, 4 * ja + 2 + jc]
                                e11 += w * h[4 * ia + 2 + ic, 4 * ja + 2 + jc]
                lam, b0, b1 = _min_eig2_nb(e00.real, e01, e11.real, b0, b1)
                if lam > obj + _MONOTONE_SLACK:
                    ok = False
                obj = lam
                # --- update c
                e00 = 0.0j
                e01 = 0.0j
                e11 = 0.0j
                for ia in range(2):
                    for ib in range(2):
                        wi = ((a1 if ia else a0) * (b1 if ib else b0)).conjugate()
                        for ja in range(2):
                            for jb in range(2):
                                w = wi * (a1 if ja else a0) * (b1 if jb else b0)
                                e00 += w * h[4 * ia + 2 * ib, 4 * ja + 2 * jb]
                                e01 += w * h[4 * ia + 2 * ib, 4 * ja + 2 * jb + 1]
                                e11 += w * h[4 * ia + 2 * ib + 1, 4 * ja + 2 * jb + 1]
                lam, c0, c1 = _min_eig2_nb(e00.real, e01, e11.real, c0, c1)
                if lam > obj + _MONOTONE_SLACK:
                    ok = False
                obj = lam
                iters[r] = it
                if prev - obj < ftol:
                    converged[r] = True
                    break
            values[r] = obj
            factors[r, 0, 0], factors[r, 0, 1] = a0, a1
            factors[r, 1, 0], factors[r, 1, 1] = b0, b1
            factors[r, 2, 0], factors[r, 2, 1] = c0, c1
            monotone[r] = ok
        return values, factors, iters, converged, monotone

    @njit(cache=True)
    def _purity_sum_one_nb(psi):
        pa = 0.0
        for i in range(2):
            for j in range(2):
                acc = 0.0j
                for r in range(4):
                    acc += psi[4 * i + r] * psi[4 * j + r].conjugate()
                pa += acc.real * acc.real + acc.imag * acc.imag
        pb = 0.0
        for i in range(2):
            for j in range(2):
                acc = 0.0j
                for a in range(2):
                    for c in range(2):
                        acc += psi[4 * a + 2 * i + c] * psi[4 * a + 2 * j + c].conjugate()
                pb += acc.real * acc.real + acc.imag * acc.imag
        pc = 0.0
        for i in range(2):
            for j in range(2):
                acc = 0.0j
                for r in range(4):
                    acc += psi[2 * r + i] * psi[2 * r + j].conjugate()
                pc += acc.real * acc.real + acc.imag * acc.imag
        return 2.0 * (pa + pb + pc)

    @njit(cache=True)
    def _purity_sum_batch_nb(psis):
        out = np.empty(psis.shape[0])
        for r in range(psis.shape[0]):
            out[r] = _purity_sum_one_nb(psis[r])
        return out

    @njit(cache=True)
    def _concurrence_objective_nb(basis, x):
        k = basis.shape[1]
        nrm2 = 0.0
        for i in range(2 * k):
            nrm2 += x[i] * x[i]
        nrm = math.sqrt(nrm2)
        psi = np.zeros(8, dtype=np.complex128)
        for i in range(8):
            acc = 0.0j
            for j in range(k):
                acc += basis[i, j] * complex(x[j], x[k + j])
            psi[i] = acc / nrm
        rad = 6.0 - _purity_sum_one_nb(psi)
        if rad < 0.0:
            rad = 0.0
        return math.sqrt(0.5 * rad) + (nrm - 1.0) ** 2

    @njit(cache=True)
    def _nm_concurrence_one_nb(basis, x0, max_iter, ftol):
        n = x0.size
        sim = np.empty((n + 1, n))
        fv = np.empty(n + 1)
        sim[0] = x0
        fv[0] = _concurrence_objective_nb(basis, x0)
        for i in range(n):
            for j in range(n):
                sim[i + 1, j] = x0[j]
            sim[i + 1, i] += 0.1
            fv[i + 1] = _concurrence_objective_nb(basis, sim[i + 1])
        xc = np.empty(n)
        xr = np.empty(n)
        xx = np.empty(n)
        it = 0
        converged = False
        for it in range(1, max_iter + 1):
            # stable insertion sort of the simplex by objective
            for i in range(1, n + 1):
                fkey = fv[i]
                row = sim[i].copy()
                j = i - 1
                while j >= 0 and fv[j] > fkey:
                    fv[j + 1] = fv[j]
                    sim[j + 1] = sim[j]
                    j -= 1
                fv[j + 1] = fkey
                sim[j + 1] = row
            if fv[n] - fv[0] < ftol:
                converged = True
                break
            for j in range(n):
                s = 0.0
                for i in range(n):
                    s += sim[i, j]
                xc[j] = s / n
            for j in range(n):
                xr[j] = 2.0 * xc[j] - sim[n, j]
            fr = _concurrence_objective_nb(basis, xr)
            if fr < fv[0]:
                for j in range(n):
                    xx[j] = 3.0 * xc[j] - 2.0 * sim[n, j]
                fe = _concurrence_objective_nb(basis, xx)
                if fe < fr:
                    sim[n] = xx
                    fv[n] = fe
                else:
                    sim[n] = xr
                    fv[n] = fr
            elif fr < fv[n - 1]:
                sim[n] = xr
                fv[n] = fr
            else:
                if fr < fv[n]:
                    for j in range(n):
                        xx[j] = xc[j] + 0.5 * (xr[j] - xc[j])
                else:
                    for j in range(n):
                        xx[j] = xc[j] + 0.5 * (sim[n, j] - xc[j])
                fk = _concurrence_objective_nb(basis, xx)
                worst = fr if fr < fv[n] else fv[n]
                if fk < worst:
                    sim[n] = xx
                    fv[n] = fk
                else:
                    for i in range(1, n + 1):
                        for j in range(n):
                            sim[i, j] = sim[0, j] + 0.5 * (sim[i, j] - sim[0, j])
                        fv[i] = _concurrence_objective_nb(basis, sim[i])
        best = 0
        for i in range(1, n + 1):
            if fv[i] < fv[best]:
                best = i
        return fv[best], sim[best], it, converged

    @njit(cache=True)
    def _nm_concurrence_batch_nb(basis, starts, max_iter, ftol):
        n = starts.shape[0]
        values = np.empty(n)
        xs = np.empty_like(starts)
        iters = np.zeros(n, dtype=np.int64)
        converged = np.zeros(n, dtype=np.bool_)
        for r in range(n):
            v, x, it, conv = _nm_concurrence_one_nb(basis, starts[r], max_iter, ftol)
            values[r] = v
            xs[r] = x
            iters[r] = it
            converged[r] = conv
        return values, xs, iters, converged


# --------------------------------------------------------------------------
# generic reference Nelder-Mead (plain Python; arbitrary objectives)
# --------------------------------------------------------------------------

def nelder_mead(f, x0, max_iter: int, ftol: float):
    """Standard simplex descent with coefficients (1, 2, 1/2, 1/2).

    Returns ``(fmin, xmin, iterations, converged)``.  Convergence means
    the objective spread across the simplex fell below ``ftol``.  The
    numba concurrence kernel implements this exact algorithm.
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    sim = np.empty((n + 1, n))
    fv = np.empty(n + 1)
    sim[0] = x0
    fv[0] = f(x0)
    for i in range(n):
        sim[i + 1] = x0
        sim[i + 1, i] += 0.1
        fv[i + 1] = f(sim[i + 1])
    it = 0
    converged = False
    for it in range(1, max_iter + 1):
        order = np.argsort(fv, kind="stable")
        sim, fv = sim[order], fv[order]
        if fv[-1] - fv[0] < ftol:
            converged = True
            break
        xc = sim[:-1].mean(axis=0)
        xr = 2.0 * xc - sim[-1]
        fr = f(xr)
        if fr < fv[0]:
            xe = 3.0 * xc - 2.0 * sim[-1]
            fe = f(xe)
            if fe < fr:
                sim[-1], fv[-1] = xe, fe
            else:
                sim[-1], fv[-1] = xr, fr
        elif fr < fv[-2]:
            sim[-1], fv[-1] = xr, fr
        else:
            if fr < fv[-1]:
                xk = xc + 0.5 * (xr - xc)
            else:
                xk = xc + 0.5 * (sim[-1] - xc)
            fk = f(xk)
            if fk < min(fr, fv[-1]):
                sim[-1], fv[-1] = xk, fk
            else:
                for i in range(1, n + 1):
                    sim[i] = sim[0] + 0.5 * (sim[i] - sim[0])
                    fv[i] = f(sim[i])
    best = int(np.argmin(fv))
    return float(fv[best]), sim[best].copy(), it, converged


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------

def alt_product_minimize(h, starts, max_iter: int, ftol: float, backend_name=None):
    """Batched alternating minimization of <phi|h|phi> over product states.

    ``h`` is an (8, 8) Hermitian array, ``starts`` an (R, 3, 2) complex
    array of per-restart factor initializations.  Returns per-restart
    ``(values, factors, iterations, converged, monotone)``.
    """
    h = np.ascontiguousarray(h, dtype=np.complex128)
    starts = np.ascontiguousarray(starts, dtype=np.complex128)
    if backend.resolve(backend_name) == "numba":
        return _alt_minimize_batch_nb(h, starts, max_iter, ftol)
    return _alt_minimize_batch_np(h, starts, max_iter, ftol)


def purity_sum_batch(psis, backend_name=None):
    """Doubled sum of the three single-party purities for each pure state row."""
    psis = np.ascontiguousarray(np.atleast_2d(psis), dtype=np.complex128)
    if backend.resolve(backend_name) == "numba":
        return _purity_sum_batch_nb(psis)
    return _purity_sum_batch_np(psis)


def nm_concurrence(basis, starts, max_iter: int, ftol: float, backend_name=None):
    """Batched simplex minimization of the concurrence over a subspace sphere.

    ``basis`` is an (8, k) column-orthonormal complex array, ``starts`` an
    (R, 2k) real array of coordinate initializations (re parts then im
    parts).  Returns per-restart ``(values, coords, iterations, converged)``
    where values include the norm penalty; re-evaluate at the normalized
    coordinates for the pure objective.
    """
    basis = np.ascontiguousarray(basis, dtype=np.complex128)
    starts = np.ascontiguousarray(starts, dtype=np.float64)
    if backend.resolve(backend_name) == "numba":
        return _nm_concurrence_batch_nb(basis, starts, max_iter, ftol)
    return _nm_concurrence_batch_np(basis, starts, max_iter, ftol)


def warmup():
    """Trigger jit compilation of the numba kernels on tiny inputs."""
    if backend.ACTIVE_BACKEND != "numba":
        return
    h = np.eye(8, dtype=np.complex128)
    starts = np.full((1, 3, 2), 1 / math.sqrt(2), dtype=np.complex128)
    alt_product_minimize(h, starts, 2, 1e-6)
    purity_sum_batch(np.eye(8, dtype=np.complex128)[:1])
    basis = np.eye(8, dtype=np.complex128)[:, :4]
    nm_concurrence(basis, np.ones((1, 8)) / math.sqrt(8), 3, 1e-6)
