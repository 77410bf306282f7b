# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled table kernels; see ``_pykernels`` for the reference semantics."""

from libc.stdint cimport uint64_t


def order_closure(int n, rel):
    cdef bytearray out = bytearray(rel)
    cdef unsigned char[:] o = out
    cdef int a, b, k
    for a in range(n):
        o[a * n + a] = 1
    for k in range(n):
        for a in range(n):
            if o[a * n + k]:
                for b in range(n):
                    if o[k * n + b]:
                        o[a * n + b] = 1
    return out


def antisymmetry_violation(int n, const unsigned char[:] leq):
    cdef int a, b
    for a in range(n):
        for b in range(a + 1, n):
            if leq[a * n + b] and leq[b * n + a]:
                return (a, b)
    return None


def lub_table(int n, const unsigned char[:] leq):
    cdef list table = [0] * (n * n)
    cdef int a, b, c, best
    for a in range(n):
        for b in range(a, n):
            best = -1
            for c in range(n):
                if leq[a * n + c] and leq[b * n + c]:
                    if best < 0 or leq[c * n + best]:
                        best = c
            if best < 0:
                return None, (a, b)
            for c in range(n):
                if leq[a * n + c] and leq[b * n + c] and not leq[best * n + c]:
                    return None, (a, b)
            table[a * n + b] = best
            table[b * n + a] = best
    return table, None


def distributivity_violation(int n, const int[:] join, const int[:] meet):
    cdef int a, b, c
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if meet[a * n + join[b * n + c]] != join[meet[a * n + b] * n + meet[a * n + c]]:
                    return (a, b, c)
    return None


def residuation_violation(int n, const unsigned char[:] leq, const int[:] meet, const int[:] imp):
    cdef int a, b, c, r
    for a in range(n):
        for b in range(n):
            r = imp[a * n + b]
            for c in range(n):
                if leq[c * n + r] != leq[meet[c * n + a] * n + b]:
                    return (a, b, c)
    return None


def eha_violations(int n, const unsigned char[:] leq, const int[:] meet, const int[:] join,
                   const int[:] imp, const int[:] dia, const int[:] box, int bot, int top):
    cdef list out = []
    cdef int a, b, da, ba, db, bb, bi
    if dia[bot] != bot:
        out.append(("M8", bot, -1))
    if box[top] != top:
        out.append(("M9", top, -1))
    for a in range(n):
        da = dia[a]
        ba = box[a]
        if not leq[a * n + da]:
            out.append(("M1", a, -1))
        if not leq[ba * n + a]:
            out.append(("M2", a, -1))
        if not leq[da * n + box[da]]:
            out.append(("M5", a, -1))
        if not leq[dia[ba] * n + ba]:
            out.append(("M6", a, -1))
        if join[da * n + imp[da * n + bot]] != top:
            out.append(("E", a, -1))
        for b in range(n):
            db = dia[b]
            bb = box[b]
            if not leq[dia[join[a * n + b]] * n + join[da * n + db]]:
                out.append(("M3", a, b))
            bi = box[imp[a * n + b]]
            if not leq[bi * n + imp[ba * n + bb]]:
                out.append(("M4", a, b))
            if not leq[bi * n + imp[da * n + db]]:
                out.append(("M7", a, b))
            if leq[a * n + b]:
                if not leq[da * n + db]:
                    out.append(("MONO-dia", a, b))
                if not leq[ba * n + bb]:
                    out.append(("MONO-box", a, b))
    return out


def downsets(order, lower):
    """Down-set enumeration for posets with at most 64 points."""
    cdef int m = len(order)
    if m > 64:
        raise OverflowError("compiled down-set enumeration supports at most 64 points")
    cdef uint64_t low[64]
    cdef int ordv[64]
    cdef uint64_t stack_s[65]
    cdef int stack_p[65]
    cdef int top = 0, pos, j, i
    cdef uint64_t s
    cdef list out = []
    for i in range(m):
        ordv[i] = order[i]
    for i in range(len(lower)):
        if i < 64:
            low[i] = lower[i]
    # depth-first with an explicit stack; each level pushes at most two children,
    # so the "exclude" branch is iterated in place to bound the stack by m + 1
    stack_s[0] = 0
    stack_p[0] = 0
    top = 1
    while top > 0:
        top -= 1
        s = stack_s[top]
        pos = stack_p[top]
        while pos < m:
            j = ordv[pos]
            pos += 1
            if low[j] & ~s == 0:
                stack_s[top] = s | ((<uint64_t>1) << j)
                stack_p[top] = pos
                top += 1
        out.append(s)
    return out
