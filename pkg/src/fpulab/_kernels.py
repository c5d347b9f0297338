"""Compiled inner loops shared by the simulation and analysis modules.

Everything here is plain array arithmetic; the public contracts live in the
other modules. The target machine has a single core, so all kernels are
written single-threaded. cache=True persists the compiled code on disk.
"""

import numba
import numpy as np


@numba.njit(cache=True)
def fpu_forces(q, beta, out):
    """Force on each site of the periodic beta-FPU chain.

    out[j] = (q[j-1] - 2 q[j] + q[j+1]) + beta ((q[j+1]-q[j])^3 - (q[j]-q[j-1])^3)

    Written as the discrete divergence of the bond tension y + beta y^3 so
    each bond is evaluated once.
    """
    n = q.shape[0]
    y0 = q[0] - q[n - 1]
    t0 = y0 + beta * y0 * y0 * y0
    tl = t0
    for j in range(n - 1):
        yr = q[j + 1] - q[j]
        tr = yr + beta * yr * yr * yr
        out[j] = tr - tl
        tl = tr
    out[n - 1] = t0 - tl
    return out


@numba.njit(cache=True)
def composition_steps(q, p, beta, dt, steps, c, d):
    """Advance (q, p) in place by `steps` splitting steps.

    One step applies q += dt*c[j]*p then p += dt*d[j]*F(q) for j = 0..len(c)-1.
    Zero kick coefficients are skipped, so the trailing d = 0 entry of the
    order-6 table costs nothing.
    """
    n = q.shape[0]
    nc = c.shape[0]
    f = np.empty(n)
    for _ in range(steps):
        for j in range(nc):
            cj = c[j] * dt
            for i in range(n):
                q[i] += cj * p[i]
            if d[j] != 0.0:
                fpu_forces(q, beta, f)
                dj = d[j] * dt
                for i in range(n):
                    p[i] += dj * f[i]


@numba.njit(cache=True)
def composition_run_sampled(q, p, beta, dt, steps, sample_every, c, d,
                            out_q, out_p):
    """Advance `steps` steps, writing a snapshot every `sample_every` steps.

    out_q/out_p must have floor(steps/sample_every) rows; the caller records
    the initial state itself. Returns the step index at which a non-finite
    value was first seen (checked at sample points), or 0 if the run is clean.
    """
    n = q.shape[0]
    nblocks = out_q.shape[0]
    done = 0
    for b in range(nblocks):
        composition_steps(q, p, beta, dt, sample_every, c, d)
        done += sample_every
        for i in range(n):
            if not (np.isfinite(q[i]) and np.isfinite(p[i])):
                return done
        for i in range(n):
            out_q[b, i] = q[i]
            out_p[b, i] = p[i]
    tail = steps - done
    if tail > 0:
        composition_steps(q, p, beta, dt, tail, c, d)
        for i in range(n):
            if not (np.isfinite(q[i]) and np.isfinite(p[i])):
                return steps
    return 0


@numba.njit(cache=True)
def tangent_rhs(q, delta, eps, beta, dd, de):
    """Right-hand side of the variational equations around trajectory point q.

    dd[j] = eps[j]
    de[j] = (delta[j+1] - 2 delta[j] + delta[j-1])
            - 3 beta [ (q[j]-q[j+1])^2 (delta[j]-delta[j+1])
                     + (q[j]-q[j-1])^2 (delta[j]-delta[j-1]) ]
    """
    n = q.shape[0]
    for j in range(n):
        dd[j] = eps[j]
    for j in range(n):
        jp = j + 1 if j + 1 < n else 0
        jm = j - 1 if j >= 1 else n - 1
        yr = q[jp] - q[j]
        yl = q[j] - q[jm]
        de[j] = ((1.0 + 3.0 * beta * yr * yr) * (delta[jp] - delta[j])
                 - (1.0 + 3.0 * beta * yl * yl) * (delta[j] - delta[jm]))


@numba.njit(cache=True)
def tangent_rk4_span(q, p, delta, eps, beta, dt, steps, c, d):
    """Advance base + tangent by `steps` intervals of dt, in place.

    The base trajectory moves with two half-dt composition steps per
    interval; the tangent takes one classical RK4 step of the variational
    equations, with the frozen base state sampled at t, t+dt/2, t+dt for
    the four stages.
    """
    n = q.shape[0]
    k1d = np.empty(n); k1e = np.empty(n)
    k2d = np.empty(n); k2e = np.empty(n)
    k3d = np.empty(n); k3e = np.empty(n)
    k4d = np.empty(n); k4e = np.empty(n)
    td = np.empty(n); te = np.empty(n)
    for _ in range(steps):
        tangent_rhs(q, delta, eps, beta, k1d, k1e)
        composition_steps(q, p, beta, 0.5 * dt, 1, c, d)
        for i in range(n):
            td[i] = delta[i] + 0.5 * dt * k1d[i]
            te[i] = eps[i] + 0.5 * dt * k1e[i]
        tangent_rhs(q, td, te, beta, k2d, k2e)
        for i in range(n):
            td[i] = delta[i] + 0.5 * dt * k2d[i]
            te[i] = eps[i] + 0.5 * dt * k2e[i]
        tangent_rhs(q, td, te, beta, k3d, k3e)
        composition_steps(q, p, beta, 0.5 * dt, 1, c, d)
        for i in range(n):
            td[i] = delta[i] + dt * k3d[i]
            te[i] = eps[i] + dt * k3e[i]
        tangent_rhs(q, td, te, beta, k4d, k4e)
        for i in range(n):
            delta[i] += dt * (k1d[i] + 2.0 * k2d[i] + 2.0 * k3d[i] + k4d[i]) / 6.0
            eps[i] += dt * (k1e[i] + 2.0 * k2e[i] + 2.0 * k3e[i] + k4e[i]) / 6.0


@numba.njit(cache=True)
def lyapunov_loop(q, p, delta, eps, beta, dt, steps_per_interval, resets,
                  d0, c, d, h_s):
    """Benettin loop: evolve, log the norm growth, rescale, repeat.

    h_s[m] = ln(d1/d0) / (steps_per_interval*dt) for each interval; the
    tangent is rescaled back to norm d0 preserving its direction. Returns 0,
    or the 1-based reset index where a non-finite value appeared.
    """
    n = q.shape[0]
    span = steps_per_interval * dt
    for m in range(resets):
        tangent_rk4_span(q, p, delta, eps, beta, dt, steps_per_interval, c, d)
        d1sq = 0.0
        for i in range(n):
            d1sq += delta[i] * delta[i] + eps[i] * eps[i]
        d1 = np.sqrt(d1sq)
        if not np.isfinite(d1) or d1 == 0.0:
            return m + 1
        h_s[m] = np.log(d1 / d0) / span
        scale = d0 / d1
        for i in range(n):
            delta[i] *= scale
            eps[i] *= scale
    return 0


@numba.njit(cache=True)
def logistic_lyapunov_loop(lam, x0, iterations, burn_in):
    """Mean of ln|f'(x_i)| along the logistic orbit f(x) = 4 lam x (1-x).

    If the orbit lands exactly on the critical point x = 1/2 (where f' = 0)
    the point is perturbed by 1e-15 so the log stays finite.
    """
    x = x0
    for _ in range(burn_in):
        x = 4.0 * lam * x * (1.0 - x)
        if x == 0.5:
            x += 1e-15
    acc = 0.0
    for _ in range(iterations):
        g = 4.0 * lam * (1.0 - 2.0 * x)
        if g == 0.0:
            x += 1e-15
            g = 4.0 * lam * (1.0 - 2.0 * x)
        acc += np.log(np.abs(g))
        x = 4.0 * lam * x * (1.0 - x)
        if x == 0.5:
            x += 1e-15
    return acc / iterations


@numba.njit(cache=True)
def quartet_accumulate(block, k, acc):
    """Accumulate conj(a_k) conj(a_l) a_m a_s over the sample rows of `block`.

    block is a [T, N] complex matrix of renormalized amplitudes; for each
    cell (l, m) the fourth index is fixed by momentum, s = (k+l-m) mod N.
    Cells with s = 0 are skipped (they stay zero in acc).
    """
    T, N = block.shape
    for t in range(T):
        ck = np.conj(block[t, k])
        for l in range(1, N):
            cl = ck * np.conj(block[t, l])
            s = k + l - 1
            if s >= N:
                s -= N
            if s >= N:
                s -= N
            for m in range(1, N):
                if s != 0:
                    acc[l, m] += cl * block[t, m] * block[t, s]
                s -= 1
                if s < 0:
                    s += N
    return acc


@numba.njit(cache=True)
def oscillatory_sum(amp, omega, tiny, t0, dt, nt, out_re, out_im):
    """out[n] = sum_j amp[j] * K(omega[j], t0 + n*dt) with the closure kernel

        K(w, t) = (exp(i w t) - 1 - i w t) / w^2,   K(w -> 0, t) = -t^2/2.

    Terms with |omega| < tiny use the limiting form. The exponential is
    advanced by a unit-modulus rotation per time step, which keeps the whole
    evaluation O(terms * nt) with no trig calls in the inner loop.
    """
    nterms = amp.shape[0]
    for n in range(nt):
        out_re[n] = 0.0
        out_im[n] = 0.0
    small_amp = 0.0
    for j in range(nterms):
        w = omega[j]
        a = amp[j]
        if np.abs(w) < tiny:
            small_amp += a
            continue
        inv_w2 = 1.0 / (w * w)
        rot_re = np.cos(w * dt)
        rot_im = np.sin(w * dt)
        z_re = np.cos(w * t0)
        z_im = np.sin(w * t0)
        for n in range(nt):
            t = t0 + n * dt
            out_re[n] += a * (z_re - 1.0) * inv_w2
            out_im[n] += a * (z_im - w * t) * inv_w2
            zr = z_re * rot_re - z_im * rot_im
            z_im = z_re * rot_im + z_im * rot_re
            z_re = zr
    if small_amp != 0.0:
        for n in range(nt):
            t = t0 + n * dt
            out_re[n] += small_amp * (-0.5 * t * t)
