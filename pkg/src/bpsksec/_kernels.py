"""Hot numeric kernels with a numba backend and a pure-numpy fallback.

The backend is picked once at import time from the environment variable
``BPSKSEC_BACKEND``:

* ``auto`` (default): use numba when importable, else numpy
* ``numba``: require numba, fail loudly if missing
* ``numpy``: force the pure-numpy path (useful for debugging and for the
  benchmark in ``benchmarks/bench_backends.py``)

Both backends implement the same algorithms on the same subdivision of the
integration domain, so their results agree to well below the quadrature
tolerance. Everything here is pure and reentrant.
"""

from __future__ import annotations

import math
import os

import numpy as np

_BACKEND_ENV = os.environ.get("BPSKSEC_BACKEND", "auto").lower()

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_AVAILABLE = False

if _BACKEND_ENV == "numba" and not NUMBA_AVAILABLE:
    raise RuntimeError("BPSKSEC_BACKEND=numba but numba is not importable")
if _BACKEND_ENV not in ("auto", "numba", "numpy"):
    raise RuntimeError(f"BPSKSEC_BACKEND must be auto|numba|numpy, got {_BACKEND_ENV!r}")

USE_NUMBA = NUMBA_AVAILABLE and _BACKEND_ENV != "numpy"


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


class QuadratureNonConvergence(RuntimeError):
    """Adaptive quadrature hit max_depth before reaching the error target.

    Carries the best estimate so callers can still report a value.
    """

    def __init__(self, estimate: float, error_estimate: float):
        self.estimate = estimate
        self.error_estimate = error_estimate
        super().__init__(
            f"quadrature did not converge: estimate={estimate!r}, "
            f"error estimate={error_estimate:.3e}"
        )


# 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule.
# Verified against exact integrals (polynomials to degree 22, Gaussian CDF).
_XGK = np.array([
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0,
])
_WGK = np.array([
    0.022935322010529224, 0.06309209262997855, 0.10479001032225018,
    0.14065325971552592, 0.1690047266392679, 0.19035057806478542,
    0.20443294007529889, 0.20948214108472782,
])
_WG = np.array([
    0.1294849661688697, 0.27970539148927664, 0.3818300505051189,
    0.41795918367346935,
])

_LOG2E = 1.4426950408889634  # 1/ln(2)
_INV_SQRT_2PI = 0.3989422804014327
_STACK_CAP = 16384


def segments_for_centers(centers, pad: float) -> np.ndarray:
    """Initial subdivision covering unit-variance Gaussian features.

    Each center gets a +-pad neighbourhood; overlapping neighbourhoods are
    merged, and breakpoints are placed at every center and at midpoints
    between neighbouring centers so no segment is wider than pad. Mass
    outside the union is below the 1e-10 tolerances used here for pad >= 8.
    """
    cs = np.unique(np.asarray(centers, dtype=float))
    if cs.size == 0:
        raise ValueError("need at least one center")
    intervals = []  # merged [lo, hi] with the centers inside
    lo, hi, inside = cs[0] - pad, cs[0] + pad, [cs[0]]
    for c in cs[1:]:
        if c - pad <= hi:
            hi = c + pad
            inside.append(c)
        else:
            intervals.append((lo, hi, inside))
            lo, hi, inside = c - pad, c + pad, [c]
    intervals.append((lo, hi, inside))

    segs = []
    for lo, hi, inside in intervals:
        pts = [lo]
        for i, c in enumerate(inside):
            if i > 0:
                pts.append(0.5 * (inside[i - 1] + c))
            pts.append(c)
        pts.append(hi)
        pts = np.unique(np.asarray(pts))
        for a, b in zip(pts[:-1], pts[1:]):
            if b > a:
                segs.append((a, b))
    return np.asarray(segs, dtype=float)


# ---------------------------------------------------------------------------
# pure-numpy backend
# ---------------------------------------------------------------------------

def tw_soft_segments(gse: float, pad: float) -> np.ndarray:
    """Segments for the two-way soft integrand.

    Besides the mixture peaks at +-gse, the integrand has a separate
    feature of width ~1/gse around z = 0 (the only region where the
    eavesdropper stays uncertain once the mixture separates); when the
    peak neighbourhoods no longer cover the origin, a geometrically
    refined window around 0 is added so that astronomically small but
    representable capacities keep a few relative digits.
    """
    segs = segments_for_centers([-gse, gse], pad)
    if gse <= 2.0 * pad:
        return segs
    pts = [0.0]
    x = pad
    while x > 16.0 / gse:
        pts.append(x)
        pts.append(-x)
        x *= 0.5
    pts.append(x)
    pts.append(-x)
    pts = np.unique(np.asarray(pts))
    extra = np.column_stack((pts[:-1], pts[1:]))
    return np.vstack((segs, extra))


def adaptive_gk_numpy(f, segs: np.ndarray, abs_tol: float, max_depth: int):
    """Adaptive Gauss-Kronrod 15(7) over precomputed segments.

    ``f`` maps an ndarray of nodes to an ndarray of values. Returns
    (value, error_estimate, converged). Deterministic: the stack is LIFO
    and the initial tolerance is split proportionally to segment width.
    """
    total_w = float(np.sum(segs[:, 1] - segs[:, 0]))
    stack = [
        (float(a), float(b), abs_tol * (b - a) / total_w, 0)
        for a, b in reversed(segs)
    ]
    value = 0.0
    err = 0.0
    converged = True
    while stack:
        a, b, tol, depth = stack.pop()
        c = 0.5 * (a + b)
        hw = 0.5 * (b - a)
        nodes = np.concatenate((c - hw * _XGK[:7], [c], c + hw * _XGK[6::-1]))
        fv = f(nodes)
        fl, fc, fr = fv[:7], fv[7], fv[8:][::-1]
        k15 = hw * (_WGK[7] * fc + float(np.sum(_WGK[:7] * (fl + fr))))
        g7 = hw * (_WG[3] * fc + float(np.sum(_WG[:3] * (fl[1::2] + fr[1::2]))))
        e = abs(k15 - g7)
        if e <= tol or hw <= 1e-14 * max(1.0, abs(a), abs(b)):
            value += k15
            err += e
            if e > tol:
                converged = False
        elif depth >= max_depth:
            value += k15
            err += e
            converged = False
        else:
            stack.append((c, b, 0.5 * tol, depth + 1))
            stack.append((a, c, 0.5 * tol, depth + 1))
            if len(stack) > _STACK_CAP:  # pragma: no cover - defensive
                value += k15
                err += e
                converged = False
                stack.pop()
                stack.pop()
    return value, err, converged


def _mix_density(x, s):
    return _INV_SQRT_2PI * 0.5 * (np.exp(-0.5 * (x - s) ** 2) + np.exp(-0.5 * (x + s) ** 2))


def _mix_entropy_integrand(x, s):
    p = _mix_density(x, s)
    out = np.zeros_like(p)
    good = p > 0
    out[good] = -p[good] * np.log2(p[good])
    return out


def _h2_vec(p):
    out = np.zeros_like(p)
    good = (p > 0) & (p < 1)
    pg = p[good]
    out[good] = -(pg * np.log2(pg) + (1 - pg) * np.log2(1 - pg))
    return out


def _tw_soft_integrand(z, gse, eps_a, h_eps_a):
    pz = _mix_density(z, gse)
    t = 2.0 * gse * z
    q = np.empty_like(z)
    pos = t >= 0
    q[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    et = np.exp(t[~pos])
    q[~pos] = et / (1.0 + et)
    comp = q * eps_a + (1.0 - q) * (1.0 - eps_a)
    return pz * (_h2_vec(comp) - h_eps_a)


def mix_entropy_numpy(s, abs_tol, max_depth, pad):
    segs = segments_for_centers([-s, s], pad)
    return adaptive_gk_numpy(lambda x: _mix_entropy_integrand(x, s), segs, abs_tol, max_depth)


def tw_soft_numpy(gse, eps_a, abs_tol, max_depth, pad):
    # computed with the same formula as the integrand so that the bracket
    # vanishes exactly where the posterior saturates
    h_eps_a = float(_h2_vec(np.array([eps_a]))[0])
    segs = tw_soft_segments(gse, pad)
    return adaptive_gk_numpy(
        lambda z: _tw_soft_integrand(z, gse, eps_a, h_eps_a), segs, abs_tol, max_depth
    )


def key_leakage_numpy(cols, abit, pq, m):
    """Exact I(hashed key; quantized eavesdropper view), numpy DFS.

    cols[i] is the i-th hash-matrix column packed as an m-bit integer,
    abit[q] = P(A_i=1 | bin q), pq[q] = per-symbol bin probability.
    Returns (mi_bits, half_l1_distance_from_uniform).
    """
    n = len(cols)
    bins = len(abit)
    M = 1 << m
    xor_idx = [np.arange(M) ^ int(t) for t in cols]
    states = np.zeros((n + 1, M))
    states[0, 0] = 1.0
    pprefix = np.ones(n + 1)
    pk = np.zeros(M)
    hq = 0.0
    sd = 0.0
    qidx = [0] * n
    depth = 0
    while depth >= 0:
        if qidx[depth] >= bins:
            depth -= 1
            continue
        q = qidx[depth]
        qidx[depth] += 1
        a = abit[q]
        st = states[depth]
        states[depth + 1] = (1.0 - a) * st + a * st[xor_idx[depth]]
        pprefix[depth + 1] = pprefix[depth] * pq[q]
        if depth + 1 == n:
            w = pprefix[n]
            leaf = states[n]
            good = leaf > 1e-300
            hq += w * float(-(leaf[good] * np.log2(leaf[good])).sum())
            pk += w * leaf
            sd += w * 0.5 * float(np.abs(leaf - 1.0 / M).sum())
        else:
            depth += 1
            qidx[depth] = 0
    good = pk > 1e-300
    hk = float(-(pk[good] * np.log2(pk[good])).sum())
    return hk - hq, sd


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

if NUMBA_AVAILABLE:

    @njit(cache=True)
    def _mix_f_nb(x, s):
        p = _INV_SQRT_2PI * 0.5 * (math.exp(-0.5 * (x - s) ** 2) + math.exp(-0.5 * (x + s) ** 2))
        if p <= 0.0:
            return 0.0
        return -p * math.log(p) * _LOG2E

    @njit(cache=True)
    def _tw_f_nb(z, gse, eps_a, h_eps_a):
        p = _INV_SQRT_2PI * 0.5 * (math.exp(-0.5 * (z - gse) ** 2) + math.exp(-0.5 * (z + gse) ** 2))
        if p <= 0.0:
            return 0.0
        t = 2.0 * gse * z
        if t >= 0.0:
            q = 1.0 / (1.0 + math.exp(-t))
        else:
            et = math.exp(t)
            q = et / (1.0 + et)
        comp = q * eps_a + (1.0 - q) * (1.0 - eps_a)
        h = 0.0
        if 0.0 < comp < 1.0:
            h = -(comp * math.log(comp) + (1.0 - comp) * math.log(1.0 - comp)) * _LOG2E
        return p * (h - h_eps_a)

    @njit(cache=True)
    def _adaptive_nb(which, p1, p2, p3, segs, abs_tol, max_depth):
        # which: 0 -> mixture entropy (p1=s), 1 -> two-way soft integrand
        total_w = 0.0
        for i in range(segs.shape[0]):
            total_w += segs[i, 1] - segs[i, 0]
        sa = np.empty(_STACK_CAP)
        sb = np.empty(_STACK_CAP)
        stol = np.empty(_STACK_CAP)
        sdep = np.empty(_STACK_CAP, dtype=np.int64)
        top = 0
        for i in range(segs.shape[0] - 1, -1, -1):
            sa[top] = segs[i, 0]
            sb[top] = segs[i, 1]
            stol[top] = abs_tol * (segs[i, 1] - segs[i, 0]) / total_w
            sdep[top] = 0
            top += 1
        value = 0.0
        err = 0.0
        converged = True
        while top > 0:
            top -= 1
            a = sa[top]
            b = sb[top]
            tol = stol[top]
            depth = sdep[top]
            c = 0.5 * (a + b)
            hw = 0.5 * (b - a)
            if which == 0:
                fc = _mix_f_nb(c, p1)
            else:
                fc = _tw_f_nb(c, p1, p2, p3)
            k15 = _WGK[7] * fc
            g7 = _WG[3] * fc
            for i in range(7):
                xl = c - hw * _XGK[i]
                xr = c + hw * _XGK[i]
                if which == 0:
                    fl = _mix_f_nb(xl, p1)
                    fr = _mix_f_nb(xr, p1)
                else:
                    fl = _tw_f_nb(xl, p1, p2, p3)
                    fr = _tw_f_nb(xr, p1, p2, p3)
                k15 += _WGK[i] * (fl + fr)
                if i % 2 == 1:
                    g7 += _WG[i // 2] * (fl + fr)
            k15 *= hw
            g7 *= hw
            e = abs(k15 - g7)
            lim = 1.0
            if abs(a) > lim:
                lim = abs(a)
            if abs(b) > lim:
                lim = abs(b)
            if e <= tol or hw <= 1e-14 * lim:
                value += k15
                err += e
                if e > tol:
                    converged = False
            elif depth >= max_depth or top + 2 > _STACK_CAP:
                value += k15
                err += e
                converged = False
            else:
                sa[top] = c
                sb[top] = b
                stol[top] = 0.5 * tol
                sdep[top] = depth + 1
                top += 1
                sa[top] = a
                sb[top] = c
                stol[top] = 0.5 * tol
                sdep[top] = depth + 1
                top += 1
        return value, err, converged

    @njit(cache=True)
    def _key_leakage_nb(cols, abit, pq, m):
        n = cols.shape[0]
        bins = abit.shape[0]
        M = 1 << m
        states = np.zeros((n + 1, M))
        states[0, 0] = 1.0
        pprefix = np.ones(n + 1)
        pk = np.zeros(M)
        hq = 0.0
        sd = 0.0
        qidx = np.zeros(n, dtype=np.int64)
        uni = 1.0 / M
        depth = 0
        while depth >= 0:
            if qidx[depth] >= bins:
                depth -= 1
                continue
            q = qidx[depth]
            qidx[depth] += 1
            a = abit[q]
            t = cols[depth]
            for c in range(M):
                states[depth + 1, c] = (1.0 - a) * states[depth, c] + a * states[depth, c ^ t]
            pprefix[depth + 1] = pprefix[depth] * pq[q]
            if depth + 1 == n:
                w = pprefix[n]
                h = 0.0
                s1 = 0.0
                for c in range(M):
                    p = states[n, c]
                    if p > 1e-300:
                        h -= p * math.log(p)
                    pk[c] += w * p
                    s1 += abs(p - uni)
                hq += w * h * _LOG2E
                sd += w * 0.5 * s1
            else:
                depth += 1
                qidx[depth] = 0
        hk = 0.0
        for c in range(M):
            if pk[c] > 1e-300:
                hk -= pk[c] * math.log(pk[c])
        return hk * _LOG2E - hq, sd

    def mix_entropy_numba(s, abs_tol, max_depth, pad):
        segs = segments_for_centers([-s, s], pad)
        return _adaptive_nb(0, float(s), 0.0, 0.0, segs, abs_tol, max_depth)

    @njit(cache=True)
    def _h2_nb(p):
        if p <= 0.0 or p >= 1.0:
            return 0.0
        return -(p * math.log(p) + (1.0 - p) * math.log(1.0 - p)) * _LOG2E

    def tw_soft_numba(gse, eps_a, abs_tol, max_depth, pad):
        # same rounding as the kernel's entropy so the bracket vanishes
        # exactly where the posterior saturates
        h_eps_a = _h2_nb(float(eps_a))
        segs = tw_soft_segments(gse, pad)
        return _adaptive_nb(1, float(gse), float(eps_a), h_eps_a, segs, abs_tol, max_depth)

    def key_leakage_numba(cols, abit, pq, m):
        return _key_leakage_nb(
            np.ascontiguousarray(cols, dtype=np.int64),
            np.ascontiguousarray(abit, dtype=np.float64),
            np.ascontiguousarray(pq, dtype=np.float64),
            m,
        )


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def _finish(result):
    value, err, converged = result
    if not converged:
        raise QuadratureNonConvergence(value, err)
    return float(value)


def mix_entropy_bits(s: float, abs_tol: float, max_depth: int, pad: float) -> float:
    """Differential entropy (bits) of the mixture 0.5 N(-s,1) + 0.5 N(s,1)."""
    if USE_NUMBA:
        return _finish(mix_entropy_numba(s, abs_tol, max_depth, pad))
    return _finish(mix_entropy_numpy(s, abs_tol, max_depth, pad))


def tw_soft_bits(gse: float, eps_a: float, abs_tol: float, max_depth: int, pad: float) -> float:
    """Conditional mutual information integral for the two-way soft capacity."""
    if USE_NUMBA:
        return _finish(tw_soft_numba(gse, eps_a, abs_tol, max_depth, pad))
    return _finish(tw_soft_numpy(gse, eps_a, abs_tol, max_depth, pad))


def key_leakage(cols: np.ndarray, abit: np.ndarray, pq: np.ndarray, m: int):
    """Exact (mi_bits, half-L1 from uniform) of the hashed key given Eve's bins."""
    if m == 0:
        return 0.0, 0.0
    if USE_NUMBA:
        return key_leakage_numba(np.asarray(cols, dtype=np.int64), abit, pq, m)
    return key_leakage_numpy(np.asarray(cols, dtype=np.int64), abit, pq, m)
