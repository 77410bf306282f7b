"""Pure-Python table kernels.

Mirror of ``_ckernels.pyx``; both modules expose the same functions with the
same argument conventions:

* ``leq`` is a flat ``n*n`` byte buffer, ``leq[a*n+b] == 1`` iff a <= b.
* binary tables are flat ``n*n`` int sequences, unary tables length ``n``.
"""


def order_closure(n, rel):
    out = bytearray(rel)
    for a in range(n):
        out[a * n + a] = 1
    for k in range(n):
        kn = k * n
        for a in range(n):
            an = a * n
            if out[an + k]:
                for b in range(n):
                    if out[kn + b]:
                        out[an + b] = 1
    return out


def antisymmetry_violation(n, leq):
    for a in range(n):
        for b in range(a + 1, n):
            if leq[a * n + b] and leq[b * n + a]:
                return (a, b)
    return None


def lub_table(n, leq):
    """Least upper bounds, or ``(None, (a, b))`` for the first pair without one."""
    table = [0] * (n * n)
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


def distributivity_violation(n, join, meet):
    for a in range(n):
        an = a * n
        for b in range(n):
            for c in range(n):
                left = meet[an + join[b * n + c]]
                right = join[meet[an + b] * n + meet[an + c]]
                if left != right:
                    return (a, b, c)
    return None


def residuation_violation(n, leq, meet, imp):
    for a in range(n):
        for b in range(n):
            r = imp[a * n + b]
            for c in range(n):
                if leq[c * n + r] != leq[meet[c * n + a] * n + b]:
                    return (a, b, c)
    return None


def eha_violations(n, leq, meet, join, imp, dia, box, bot, top):
    """Instances of M1-M9, axiom E and monotonicity that fail, as (code, a, b)."""
    out = []
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
    """All down-sets of a poset on bit positions.

    ``order`` lists the bits in a linear extension (lower elements first) and
    ``lower[j]`` is the mask of bits strictly below ``j``.
    """
    out = []
    m = len(order)
    stack = [(0, 0)]
    while stack:
        pos, s = stack.pop()
        if pos == m:
            out.append(s)
            continue
        j = order[pos]
        stack.append((pos + 1, s))
        if lower[j] & ~s == 0:
            stack.append((pos + 1, s | (1 << j)))
    return out
