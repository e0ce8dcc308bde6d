# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: projective collapse, Schmidt-eigenvalue scans over
bipartition cuts, fused measurement-angle grid scans, and matrix-free spin
Hamiltonian matvecs.

Semantics mirror ``lggm._kernels._fallback`` exactly; see that module for
the shared index and outcome conventions.
"""

import numpy as np

cimport cython
from cpython.exc cimport PyErr_CheckSignals
from libc.math cimport cos, fabs, hypot, sin, sqrt
from libc.string cimport memset

P_FLOOR = 1e-12

cdef double _P_FLOOR = 1e-12
cdef double _EPS = 2.220446049250313e-16

DEF MAX_CUT_BITS = 8        # largest cut handled inline (gram dim 256)
DEF MAX_MEASURED = 12       # largest measured-qubit count
DEF MAX_QUBIT_BITS = 32


# ---------------------------------------------------------------------------
# Dense symmetric eigenvalues: Householder tridiagonalization + implicit QL
# ---------------------------------------------------------------------------

cdef void _tred2_novec(double* a, int n, double* d, double* e) nogil:
    # Reduce symmetric a (row-major, destroyed) to tridiagonal form;
    # d receives the diagonal, e[i] the subdiagonal linking i-1 and i.
    cdef int i, j, k, l
    cdef double scale, hh, h, g, f
    for i in range(n - 1, 0, -1):
        l = i - 1
        h = 0.0
        scale = 0.0
        if l > 0:
            for k in range(l + 1):
                scale += fabs(a[i * n + k])
            if scale == 0.0:
                e[i] = a[i * n + l]
            else:
                for k in range(l + 1):
                    a[i * n + k] /= scale
                    h += a[i * n + k] * a[i * n + k]
                f = a[i * n + l]
                g = -sqrt(h) if f >= 0.0 else sqrt(h)
                e[i] = scale * g
                h -= f * g
                a[i * n + l] = f - g
                f = 0.0
                for j in range(l + 1):
                    g = 0.0
                    for k in range(j + 1):
                        g += a[j * n + k] * a[i * n + k]
                    for k in range(j + 1, l + 1):
                        g += a[k * n + j] * a[i * n + k]
                    e[j] = g / h
                    f += e[j] * a[i * n + j]
                hh = f / (h + h)
                for j in range(l + 1):
                    f = a[i * n + j]
                    g = e[j] - hh * f
                    e[j] = g
                    for k in range(j + 1):
                        a[j * n + k] -= f * e[k] + g * a[i * n + k]
        else:
            e[i] = a[i * n + l]
        d[i] = h
    e[0] = 0.0
    for i in range(n):
        d[i] = a[i * n + i]


cdef int _tqli_novec(double* d, double* e, int n) nogil:
    # Implicit-shift QL on a tridiagonal; d diagonal, e[i] couples i and i+1.
    cdef int m, l, it, i, broke
    cdef double s, r, p, g, f, dd, c, b
    if n == 1:
        return 0
    e[n - 1] = 0.0
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = fabs(d[m]) + fabs(d[m + 1])
                if fabs(e[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > 60:
                return -1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            broke = 0
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    broke = 1
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
            if not broke:
                d[l] -= p
                e[l] = g
                e[m] = 0.0
    return 0


cdef double _sym_eig_max(double* a, int n, double* d, double* e) nogil:
    # a destroyed; d, e are length-n scratch
    cdef int i
    cdef double best
    if n == 1:
        return a[0]
    _tred2_novec(a, n, d, e)
    for i in range(n - 1):
        e[i] = e[i + 1]
    e[n - 1] = 0.0
    if _tqli_novec(d, e, n) != 0:
        return -1e300  # no convergence after 60 sweeps; effectively never
    best = d[0]
    for i in range(1, n):
        if d[i] > best:
            best = d[i]
    return best


# ---------------------------------------------------------------------------
# Largest reduced-density eigenvalue across one cut
# ---------------------------------------------------------------------------

cdef double _lambda_max_cut(const double complex* v, int n,
                            unsigned long long mask, int na,
                            double complex* gram, double* embed,
                            double* dwork, double* ework) nogil:
    cdef int nb = n - na
    cdef long dim_b = (<long>1) << nb
    cdef int da = 1 << na
    cdef long apos[MAX_CUT_BITS]
    cdef long amask[1 << MAX_CUT_BITS]
    cdef double colr[1 << MAX_CUT_BITS]
    cdef double coli[1 << MAX_CUT_BITS]
    cdef int t, a, b, nn
    cdef long jb, f, pk
    cdef long bit
    cdef double r00, r11, half, off2, ar, ai, br, bi, r01r, r01i
    # complex buffers viewed as interleaved (re, im) doubles
    cdef const double* vd = <const double*> v
    cdef double* gd = <double*> gram
    cdef double complex ca

    t = 0
    for pk in range(n):
        if mask & ((<unsigned long long>1) << pk):
            apos[t] = pk
            t += 1

    if na == 1:
        pk = apos[0]
        bit = (<long>1) << pk
        r00 = 0.0
        r11 = 0.0
        r01r = 0.0
        r01i = 0.0
        for jb in range(dim_b):
            f = ((jb >> pk) << (pk + 1)) | (jb & (((<long>1) << pk) - 1))
            ar = vd[2 * f]
            ai = vd[2 * f + 1]
            br = vd[2 * (f | bit)]
            bi = vd[2 * (f | bit) + 1]
            r00 += ar * ar + ai * ai
            r11 += br * br + bi * bi
            r01r += ar * br + ai * bi
            r01i += ai * br - ar * bi
        half = 0.5 * (r00 - r11)
        off2 = r01r * r01r + r01i * r01i
        return 0.5 * (r00 + r11) + sqrt(half * half + off2)

    for a in range(da):
        f = 0
        for t in range(na):
            if a & (1 << t):
                f |= (<long>1) << apos[t]
        amask[a] = f

    memset(gram, 0, da * da * sizeof(double complex))
    for jb in range(dim_b):
        f = jb
        for t in range(na):
            pk = apos[t]
            f = ((f >> pk) << (pk + 1)) | (f & (((<long>1) << pk) - 1))
        for a in range(da):
            colr[a] = vd[2 * (f | amask[a])]
            coli[a] = vd[2 * (f | amask[a]) + 1]
        for a in range(da):
            ar = colr[a]
            ai = coli[a]
            for b in range(a + 1):
                br = colr[b]
                bi = coli[b]
                gd[2 * (a * da + b)] += ar * br + ai * bi
                gd[2 * (a * da + b) + 1] += ai * br - ar * bi

    # real symmetric embedding [[A, -B], [B, A]] of the Hermitian gram
    nn = 2 * da
    for a in range(da):
        for b in range(a + 1):
            ca = gram[a * da + b]
            embed[a * nn + b] = ca.real
            embed[b * nn + a] = ca.real
            embed[(da + a) * nn + da + b] = ca.real
            embed[(da + b) * nn + da + a] = ca.real
            embed[(da + a) * nn + b] = ca.imag
            embed[(da + b) * nn + a] = -ca.imag
            embed[a * nn + da + b] = -ca.imag
            embed[b * nn + da + a] = ca.imag
    return _sym_eig_max(embed, nn, dwork, ework)


def cut_lambda_max(amps, int n, cuts):
    """Largest reduced-density eigenvalue for every bipartition cut."""
    cdef const double complex[::1] v = np.ascontiguousarray(amps, dtype=np.complex128)
    cdef int ncuts = len(cuts)
    cdef int na_max = max(len(c) for c in cuts) if ncuts else 1
    if na_max > MAX_CUT_BITS:
        raise ValueError(f"compiled kernel handles cuts up to size {MAX_CUT_BITS}")
    masks_np = np.zeros(ncuts, dtype=np.uint64)
    sizes_np = np.zeros(ncuts, dtype=np.int32)
    cdef int i, q
    for i, cut in enumerate(cuts):
        for q in cut:
            masks_np[i] |= np.uint64(1) << np.uint64(n - q)
        sizes_np[i] = len(cut)
    cdef unsigned long long[::1] masks = masks_np
    cdef int[::1] sizes = sizes_np
    out_np = np.empty(ncuts)
    cdef double[::1] out = out_np
    gram_np = np.empty((1 << na_max) ** 2, dtype=np.complex128)
    embed_np = np.empty((2 << na_max) ** 2, dtype=np.float64)
    work_np = np.empty(2 * (2 << na_max), dtype=np.float64)
    cdef double complex[::1] gram = gram_np
    cdef double[::1] embed = embed_np
    cdef double[::1] work = work_np
    cdef int half = 2 << na_max
    with nogil:
        for i in range(ncuts):
            out[i] = _lambda_max_cut(&v[0], n, masks[i], sizes[i],
                                     &gram[0], &embed[0], &work[0], &work[half])
    return out_np


# ---------------------------------------------------------------------------
# Projective collapse and the average-GGM objective
# ---------------------------------------------------------------------------

cdef void _coef_table(int m, const double* thetas, const double* phis,
                      double complex* coef) nogil:
    # coef[l * 2^m + v] = prod_j conj(<xi_{l_j} | v_j>) for measured qubit j
    cdef double complex rows[MAX_MEASURED][2][2]
    cdef int j, l, vv, two_m
    cdef double c, s
    cdef double complex e, prod
    for j in range(m):
        c = cos(0.5 * thetas[j])
        s = sin(0.5 * thetas[j])
        e = cos(phis[j]) + 1j * sin(phis[j])
        rows[j][0][0] = c
        rows[j][0][1] = s * e.conjugate()
        rows[j][1][0] = -s * e
        rows[j][1][1] = c
    two_m = 1 << m
    for l in range(two_m):
        for vv in range(two_m):
            prod = 1.0
            for j in range(m):
                prod = prod * rows[j][(l >> (m - 1 - j)) & 1][(vv >> (m - 1 - j)) & 1]
            coef[l * two_m + vv] = prod


cdef void _branch_all(const double complex* amps, int n, int m,
                      const long* pos_asc, const unsigned long long* vmask,
                      const double complex* coef,
                      double complex* branch) nogil:
    # branch[l * 2^(n-m) + j] = sum_v coef[l, v] amps[expand(j) | vmask[v]]
    cdef long dim_rest = (<long>1) << (n - m)
    cdef int two_m = 1 << m
    cdef long j, f, pk
    cdef int vv, l, t
    cdef double ar, ai, cr, ci
    cdef const double* ad = <const double*> amps
    cdef const double* cd = <const double*> coef
    cdef double* bd = <double*> branch
    memset(branch, 0, two_m * dim_rest * sizeof(double complex))
    for j in range(dim_rest):
        f = j
        for t in range(m):
            pk = pos_asc[t]
            f = ((f >> pk) << (pk + 1)) | (f & (((<long>1) << pk) - 1))
        for vv in range(two_m):
            ar = ad[2 * (f | <long>vmask[vv])]
            ai = ad[2 * (f | <long>vmask[vv]) + 1]
            if ar != 0.0 or ai != 0.0:
                for l in range(two_m):
                    cr = cd[2 * (l * two_m + vv)]
                    ci = cd[2 * (l * two_m + vv) + 1]
                    bd[2 * (l * dim_rest + j)] += cr * ar - ci * ai
                    bd[2 * (l * dim_rest + j) + 1] += cr * ai + ci * ar


cdef double _objective_from_branches(double complex* branch, int n_rest, int two_m,
                                     const unsigned long long* masks, const int* sizes,
                                     int ncuts,
                                     double complex* gram, double* embed,
                                     double* dwork, double* ework) nogil:
    cdef long dim_rest = (<long>1) << n_rest
    cdef double total = 0.0, p, lam, li
    cdef double complex a
    cdef int l, c
    cdef long j
    for l in range(two_m):
        p = 0.0
        for j in range(dim_rest):
            a = branch[l * dim_rest + j]
            p += a.real * a.real + a.imag * a.imag
        if p < _P_FLOOR:
            continue
        lam = 0.0
        for c in range(ncuts):
            li = _lambda_max_cut(branch + l * dim_rest, n_rest, masks[c],
                                 sizes[c], gram, embed, dwork, ework)
            if li > lam:
                lam = li
        total += p - lam  # equals p * (1 - lam/p) on the unnormalized branch
    return total


cdef class _Scratch:
    # Per-call workspace shared by repeated objective evaluations
    cdef object keep
    cdef double complex* branch
    cdef double complex* coef
    cdef double complex* gram
    cdef double* embed
    cdef double* dwork
    cdef double* ework
    cdef unsigned long long* vmask
    cdef unsigned long long* masks
    cdef int* sizes
    cdef long* pos_asc
    cdef int ncuts, m, n, na_max

    def __init__(self, int n, positions, cuts):
        cdef int m = len(positions)
        cdef int two_m = 1 << m
        if m > MAX_MEASURED:
            raise ValueError(f"at most {MAX_MEASURED} measured qubits supported")
        ncuts = len(cuts)
        na_max = max(len(c) for c in cuts) if ncuts else 1
        if na_max > MAX_CUT_BITS:
            raise ValueError(f"compiled kernel handles cuts up to size {MAX_CUT_BITS}")
        n_rest = n - m
        da = 1 << na_max
        buf_branch = np.zeros(two_m * (1 << n_rest), dtype=np.complex128)
        buf_coef = np.zeros(two_m * two_m, dtype=np.complex128)
        buf_gram = np.zeros(da * da, dtype=np.complex128)
        buf_embed = np.zeros(4 * da * da, dtype=np.float64)
        buf_work = np.zeros(4 * da, dtype=np.float64)
        buf_vmask = np.zeros(two_m, dtype=np.uint64)
        buf_masks = np.zeros(max(ncuts, 1), dtype=np.uint64)
        buf_sizes = np.zeros(max(ncuts, 1), dtype=np.int32)
        buf_pos = np.zeros(max(m, 1), dtype=np.int64)

        bits = sorted(n - int(q) for q in positions)
        for t in range(m):
            buf_pos[t] = bits[t]
        for vv in range(two_m):
            acc = 0
            for j in range(m):
                if (vv >> (m - 1 - j)) & 1:
                    acc |= 1 << (n - int(positions[j]))
            buf_vmask[vv] = acc
        for i, cut in enumerate(cuts):
            acc = 0
            for q in cut:
                acc |= 1 << (n_rest - int(q))
            buf_masks[i] = acc
            buf_sizes[i] = len(cut)

        self.keep = (buf_branch, buf_coef, buf_gram, buf_embed, buf_work,
                     buf_vmask, buf_masks, buf_sizes, buf_pos)
        cdef double complex[::1] mv_branch = buf_branch
        cdef double complex[::1] mv_coef = buf_coef
        cdef double complex[::1] mv_gram = buf_gram
        cdef double[::1] mv_embed = buf_embed
        cdef double[::1] mv_work = buf_work
        cdef unsigned long long[::1] mv_vmask = buf_vmask
        cdef unsigned long long[::1] mv_masks = buf_masks
        cdef int[::1] mv_sizes = buf_sizes
        cdef long[::1] mv_pos = buf_pos
        self.branch = &mv_branch[0]
        self.coef = &mv_coef[0]
        self.gram = &mv_gram[0]
        self.embed = &mv_embed[0]
        self.dwork = &mv_work[0]
        self.ework = &mv_work[2 * da]
        self.vmask = &mv_vmask[0]
        self.masks = &mv_masks[0]
        self.sizes = &mv_sizes[0]
        self.pos_asc = &mv_pos[0]
        self.ncuts = ncuts
        self.m = m
        self.n = n
        self.na_max = na_max


cdef double _objective(const double complex* amps, _Scratch s,
                       const double* thetas, const double* phis) nogil:
    _coef_table(s.m, thetas, phis, s.coef)
    _branch_all(amps, s.n, s.m, s.pos_asc, s.vmask, s.coef, s.branch)
    return _objective_from_branches(s.branch, s.n - s.m, 1 << s.m,
                                    s.masks, s.sizes, s.ncuts,
                                    s.gram, s.embed, s.dwork, s.ework)


def collapse(amps, int n, positions, thetas, phis, int outcome):
    """Project the measured qubits onto one outcome and trace them out."""
    cdef const double complex[::1] v = np.ascontiguousarray(amps, dtype=np.complex128)
    cdef _Scratch s = _Scratch(n, tuple(positions), ())
    th_np = np.ascontiguousarray(thetas, dtype=np.float64)
    ph_np = np.ascontiguousarray(phis, dtype=np.float64)
    cdef double[::1] th = th_np
    cdef double[::1] ph = ph_np
    cdef int m = s.m
    cdef long dim_rest = (<long>1) << (n - m)
    out_np = np.empty(dim_rest, dtype=np.complex128)
    cdef double complex[::1] out = out_np
    cdef double p = 0.0
    cdef long j
    cdef double complex a
    with nogil:
        _coef_table(m, &th[0], &ph[0], s.coef)
        _branch_all(&v[0], n, m, s.pos_asc, s.vmask, s.coef, s.branch)
        for j in range(dim_rest):
            a = s.branch[outcome * dim_rest + j]
            out[j] = a
            p += a.real * a.real + a.imag * a.imag
    if p < _P_FLOOR:
        return 0.0, np.zeros(dim_rest, dtype=np.complex128)
    out_np /= np.sqrt(p)
    return p, out_np


def avg_ggm_objective(amps, int n, positions, angles, cuts):
    """Average post-measurement GGM for one set of measurement angles."""
    cdef const double complex[::1] v = np.ascontiguousarray(amps, dtype=np.complex128)
    cdef _Scratch s = _Scratch(n, tuple(positions), tuple(cuts))
    ang = np.ascontiguousarray(angles, dtype=np.float64)
    th_np = np.ascontiguousarray(ang[0::2])
    ph_np = np.ascontiguousarray(ang[1::2])
    cdef double[::1] th = th_np
    cdef double[::1] ph = ph_np
    cdef double val
    with nogil:
        val = _objective(&v[0], s, &th[0], &ph[0])
    return val


def grid_scan(amps, int n, positions, theta_grid, phi_grid, cuts):
    """Exhaustive product-grid scan over per-qubit measurement angles.

    Returns ``(best_value, best_angles)`` with ties resolved to the
    earliest odometer combination (qubit order, theta-major).
    """
    cdef const double complex[::1] v = np.ascontiguousarray(amps, dtype=np.complex128)
    cdef _Scratch s = _Scratch(n, tuple(positions), tuple(cuts))
    tg_np = np.ascontiguousarray(theta_grid, dtype=np.float64)
    pg_np = np.ascontiguousarray(phi_grid, dtype=np.float64)
    cdef double[::1] tg = tg_np
    cdef double[::1] pg = pg_np
    cdef int m = s.m
    cdef long n_t = tg.shape[0]
    cdef long n_p = pg.shape[0]
    cdef long per_qubit = n_t * n_p
    cdef long total = 1
    cdef int j
    for j in range(m):
        total *= per_qubit
    cdef double thetas[MAX_MEASURED]
    cdef double phis[MAX_MEASURED]
    cdef double best_val = -1e300
    cdef double val
    cdef long flat, rem, cj, best_flat = 0
    with nogil:
        for flat in range(total):
            rem = flat
            for j in range(m - 1, -1, -1):
                cj = rem % per_qubit
                rem = rem // per_qubit
                thetas[j] = tg[cj / n_p]
                phis[j] = pg[cj % n_p]
            val = _objective(&v[0], s, thetas, phis)
            if val > best_val:
                best_val = val
                best_flat = flat
            if (flat & 0xFFF) == 0xFFF:
                with gil:
                    PyErr_CheckSignals()
    best = np.empty(2 * m)
    rem = best_flat
    for j in range(m - 1, -1, -1):
        cj = rem % per_qubit
        rem //= per_qubit
        best[2 * j] = tg_np[cj // n_p]
        best[2 * j + 1] = pg_np[cj % n_p]
    return best_val, best


# ---------------------------------------------------------------------------
# Matrix-free spin-chain matvecs (PBC)
# ---------------------------------------------------------------------------

cdef inline int _popcount(unsigned long long x) nogil:
    cdef int c = 0
    while x:
        x &= x - 1
        c += 1
    return c


def apply_ising(v_in, int n, double coupling, double field):
    """Transverse-field Ising matvec: J sum sx.sx + h sum sz, PBC."""
    cdef const double complex[::1] v = np.ascontiguousarray(v_in, dtype=np.complex128)
    cdef long dim = (<long>1) << n
    if v.shape[0] != dim:
        raise ValueError(f"expected a vector of length {dim}")
    out_np = np.zeros(dim, dtype=np.complex128)
    cdef double complex[::1] out = out_np
    cdef long i
    cdef int site
    cdef unsigned long long mask
    with nogil:
        for i in range(dim):
            out[i] = field * (n - 2 * _popcount(<unsigned long long>i)) * v[i]
        for site in range(n):
            mask = ((<unsigned long long>1) << (n - 1 - site)) \
                 | ((<unsigned long long>1) << (n - 1 - ((site + 1) % n)))
            for i in range(dim):
                out[i] = out[i] + coupling * v[i ^ <long>mask]
    return out_np


def apply_xxz(v_in, int n, double coupling, double anisotropy, double field):
    """XXZ matvec: J' sum (sx.sx + sy.sy - D sz.sz) + h' sum sz, PBC."""
    cdef const double complex[::1] v = np.ascontiguousarray(v_in, dtype=np.complex128)
    cdef long dim = (<long>1) << n
    if v.shape[0] != dim:
        raise ValueError(f"expected a vector of length {dim}")
    out_np = np.zeros(dim, dtype=np.complex128)
    cdef double complex[::1] out = out_np
    cdef long i
    cdef int site, b1, b2, z1, z2
    cdef unsigned long long mask
    cdef double diag
    with nogil:
        for i in range(dim):
            out[i] = field * (n - 2 * _popcount(<unsigned long long>i)) * v[i]
        for site in range(n):
            b1 = n - 1 - site
            b2 = n - 1 - ((site + 1) % n)
            mask = ((<unsigned long long>1) << b1) | ((<unsigned long long>1) << b2)
            for i in range(dim):
                z1 = (i >> b1) & 1
                z2 = (i >> b2) & 1
                if z1 == z2:
                    out[i] = out[i] - coupling * anisotropy * v[i]
                else:
                    out[i] = out[i] + coupling * anisotropy * v[i]
                    out[i ^ <long>mask] = out[i ^ <long>mask] + 2.0 * coupling * v[i]
    return out_np
