"""Compiled bit-level kernels for 5-variable rules and their 9-variable extensions.

A 5-variable table is one 32-bit word held in an int64.  A 9-variable
table is 16 such words: word ``w`` holds inputs ``32*w .. 32*w + 31``, so
input bits 0-4 select the bit and bits 5-8 select the word.  Everything
is plain int64 arithmetic; left shifts are re-masked to 32 bits.
"""

import numpy as np
from numba import njit

M32 = np.int64(0xFFFFFFFF)
NWORDS = 16

VAR5 = np.array([0xAAAAAAAA, 0xCCCCCCCC, 0xF0F0F0F0, 0xFF00FF00, 0xFFFF0000], dtype=np.int64)


def _linear_tables():
    lin = np.zeros(32, dtype=np.int64)
    for w in range(32):
        for i in range(5):
            if (w >> i) & 1:
                lin[w] ^= VAR5[i]
    return lin


LIN5 = _linear_tables()
# DEGMASK5[d]: positions u in 0..31 with popcount(u) == d.
DEGMASK5 = np.array(
    [sum(1 << u for u in range(32) if bin(u).count("1") == d) for d in range(6)], dtype=np.int64
)


def _shells(n):
    order = sorted(range(1, 1 << n), key=lambda a: (bin(a).count("1"), a))
    start = np.zeros(n + 2, dtype=np.int64)
    for k in range(1, n + 2):
        start[k] = sum(1 for a in order if bin(a).count("1") < k)
    return np.array(order, dtype=np.int64), start


# Directions sorted by weight; shell k spans SHELLn[START[k] : START[k + 1]].
SHELL5, SHELL5_START = _shells(5)
SHELL9, SHELL9_START = _shells(9)


def _var9():
    x = np.zeros((9, NWORDS), dtype=np.int64)
    for j in range(9):
        for w in range(NWORDS):
            if j < 5:
                x[j, w] = VAR5[j]
            elif (w >> (j - 5)) & 1:
                x[j, w] = M32
    return x


X9 = _var9()


def _first_layer_monomials():
    # Cells c = 0..8 hold x_c.  The window centred at cell i feeds rule index
    # bit k from cell i + 2 - k (rightmost cell is bit 0).  Row p is cell p + 2.
    mon = np.zeros((5, 32, NWORDS), dtype=np.int64)
    for p in range(5):
        centre = p + 2
        for u in range(32):
            acc = np.full(NWORDS, M32, dtype=np.int64)
            for k in range(5):
                if (u >> k) & 1:
                    acc &= X9[centre + 2 - k]
            mon[p, u] = acc
    return mon


MON1 = _first_layer_monomials()

# Counter columns, one row per affine class.
TOTAL, SAC, CI1, BALANCED, PC2, PC3, PC4, PC5, NONLINEAR = range(9)
SAC_P, CI1_P, BALANCED_P, PC2_P, PC3_P, PC4_P, PC5_P, NONLINEAR_P, DEG_GE_P = range(9, 18)
NCOLS = 18
COLUMNS = (
    "total", "sac", "ci1", "balanced", "pc2", "pc3", "pc4", "pc5", "nonlinear",
    "sac_pres", "ci1_pres", "balanced_pres", "pc2_pres", "pc3_pres", "pc4_pres",
    "pc5_pres", "nonlin_pres", "deg_ge_pres",
)

# Signature layout: [max(degree, 1), hist |W|/2 (17 bins), hist |R|/4 (9 bins)].
SIG_LEN = 27
_KEY_MOD = np.int64((1 << 31) - 1)


@njit(cache=True)
def popcount32(x):
    x = x - ((x >> 1) & 0x55555555)
    x = (x & 0x33333333) + ((x >> 2) & 0x33333333)
    x = (x + (x >> 4)) & 0x0F0F0F0F
    return ((x * 0x01010101) & M32) >> 24


@njit(cache=True)
def flip5(f, i):
    """f(x XOR e_i)."""
    s = 1 << i
    low = M32 ^ VAR5[i]
    return ((f & low) << s) | ((f >> s) & low)


@njit(cache=True)
def swap5(f, i, j):
    """Exchange variables x_i and x_j (i < j)."""
    delta = (1 << j) - (1 << i)
    mask = VAR5[i] & (M32 ^ VAR5[j])
    t = (f ^ (f >> delta)) & mask
    return f ^ t ^ (t << delta)


@njit(cache=True)
def transvect5(f, i, j):
    """f with x_i replaced by x_i XOR x_j (i != j)."""
    s = 1 << i
    mask = (M32 ^ VAR5[i]) & VAR5[j]
    t = (f ^ (f >> s)) & mask
    return f ^ t ^ (t << s)


@njit(cache=True)
def walsh5(f, out):
    for w in range(32):
        out[w] = 32 - 2 * popcount32(f ^ LIN5[w])


@njit(cache=True)
def autocorr5(f, out, scratch):
    scratch[0] = f
    out[0] = 32
    for a in range(1, 32):
        low = a & -a
        i = 0
        while (low >> i) != 1:
            i += 1
        scratch[a] = flip5(scratch[a ^ low], i)
        out[a] = 32 - 2 * popcount32(f ^ scratch[a])


@njit(cache=True)
def anf5(f):
    for i in range(5):
        f ^= (f << (1 << i)) & VAR5[i]
    return f


@njit(cache=True)
def degree5(coeffs):
    for d in range(5, 0, -1):
        if coeffs & DEGMASK5[d]:
            return d
    return 0


@njit(cache=True)
def vanishing_order(values, shell, start, n):
    for k in range(1, n + 1):
        for t in range(start[k], start[k + 1]):
            if values[shell[t]] != 0:
                return k - 1
    return n


@njit(cache=True)
def signature5(walsh, autocorr, degree, sig):
    for j in range(SIG_LEN):
        sig[j] = 0
    sig[0] = degree if degree > 1 else 1
    for w in range(32):
        sig[1 + abs(walsh[w]) // 2] += 1
        sig[18 + abs(autocorr[w]) // 4] += 1


@njit(cache=True)
def signature_key(sig):
    key = np.int64(0)
    for j in range(SIG_LEN):
        key = (key * 1000003 + sig[j] + 1) % _KEY_MOD
    return key


@njit(cache=True)
def lookup_class(sig, keys, order, class_sigs):
    """Index into the registry, or -1 if no class has this exact signature."""
    key = signature_key(sig)
    pos = np.searchsorted(keys, key)
    if pos >= keys.shape[0] or keys[pos] != key:
        return -1
    c = order[pos]
    for j in range(SIG_LEN):
        if class_sigs[c, j] != sig[j]:
            return -1
    return c


# ---------------------------------------------------------------- 9 variables


@njit(cache=True)
def extend_words(coeffs, out, y, mon):
    """Two CA steps of the rule with ANF ``coeffs``; writes g into ``out``.

    ``y`` (5 x 16) holds the intermediate cells 2..6, ``mon`` (32 x 16) is
    scratch for the second layer's monomials.
    """
    for p in range(5):
        for w in range(NWORDS):
            y[p, w] = 0
        for u in range(32):
            if (coeffs >> u) & 1:
                for w in range(NWORDS):
                    y[p, w] ^= MON1[p, u, w]
    # Second step: centre cell 4, index bit k comes from intermediate cell 6 - k.
    for w in range(NWORDS):
        mon[0, w] = M32
        out[w] = M32 if coeffs & 1 else 0
    for u in range(1, 32):
        hb = 4
        while not (u >> hb) & 1:
            hb -= 1
        rest = u ^ (1 << hb)
        src = 4 - hb
        for w in range(NWORDS):
            mon[u, w] = mon[rest, w] & y[src, w]
        if (coeffs >> u) & 1:
            for w in range(NWORDS):
                out[w] ^= mon[u, w]


@njit(cache=True)
def weight9(g):
    total = 0
    for w in range(NWORDS):
        total += popcount32(g[w])
    return total


@njit(cache=True)
def ci1_9(g):
    for j in range(9):
        total = 0
        for w in range(NWORDS):
            total += popcount32(g[w] ^ X9[j, w])
        if total != 256:
            return False
    return True


@njit(cache=True)
def derivative_weight9(g, a):
    hi = a >> 5
    lo = a & 31
    total = 0
    for w in range(NWORDS):
        v = g[w ^ hi]
        for i in range(5):
            if (lo >> i) & 1:
                v = flip5(v, i)
        total += popcount32(g[w] ^ v)
    return total


@njit(cache=True)
def pc_order9(g, max_order):
    """Propagation-criterion order of g, capped at ``max_order``."""
    for k in range(1, max_order + 1):
        for t in range(SHELL9_START[k], SHELL9_START[k + 1]):
            if derivative_weight9(g, SHELL9[t]) != 256:
                return k - 1
    return max_order


@njit(cache=True)
def degree9(g, scratch):
    for w in range(NWORDS):
        scratch[w] = anf5(g[w])
    bit = 1
    while bit < NWORDS:
        for w in range(NWORDS):
            if w & bit:
                scratch[w] ^= scratch[w ^ bit]
        bit <<= 1
    best = 0
    for w in range(NWORDS):
        if scratch[w]:
            d = popcount32(w) + degree5(scratch[w])
            if d > best:
                best = d
    return best


# ---------------------------------------------------------------- batch entry points


@njit(cache=True)
def analyze5_batch(rules, keys, order, class_sigs, out):
    """Columns: weight, ci_order, pc_order, degree, class index."""
    wal = np.zeros(32, dtype=np.int64)
    ac = np.zeros(32, dtype=np.int64)
    scratch = np.zeros(32, dtype=np.int64)
    sig = np.zeros(SIG_LEN, dtype=np.int64)
    for r in range(rules.shape[0]):
        f = rules[r]
        walsh5(f, wal)
        autocorr5(f, ac, scratch)
        d = degree5(anf5(f))
        out[r, 0] = popcount32(f)
        out[r, 1] = vanishing_order(wal, SHELL5, SHELL5_START, 5)
        out[r, 2] = vanishing_order(ac, SHELL5, SHELL5_START, 5)
        out[r, 3] = d
        if keys.shape[0] > 0:
            signature5(wal, ac, d, sig)
            out[r, 4] = lookup_class(sig, keys, order, class_sigs)
        else:
            out[r, 4] = -1


@njit(cache=True)
def signatures5_batch(rules, out):
    wal = np.zeros(32, dtype=np.int64)
    ac = np.zeros(32, dtype=np.int64)
    scratch = np.zeros(32, dtype=np.int64)
    for r in range(rules.shape[0]):
        f = rules[r]
        walsh5(f, wal)
        autocorr5(f, ac, scratch)
        signature5(wal, ac, degree5(anf5(f)), out[r])


@njit(cache=True)
def walsh5_batch(rules, out):
    for r in range(rules.shape[0]):
        walsh5(rules[r], out[r])


@njit(cache=True)
def autocorr5_batch(rules, out):
    scratch = np.zeros(32, dtype=np.int64)
    for r in range(rules.shape[0]):
        autocorr5(rules[r], out[r], scratch)


@njit(cache=True)
def extend_batch(rules, out):
    y = np.zeros((5, NWORDS), dtype=np.int64)
    mon = np.zeros((32, NWORDS), dtype=np.int64)
    for r in range(rules.shape[0]):
        extend_words(anf5(rules[r]), out[r], y, mon)


@njit(cache=True)
def analyze9_batch(tables, out):
    """Columns: weight, ci1, pc_order (uncapped), degree."""
    scratch = np.zeros(NWORDS, dtype=np.int64)
    for r in range(tables.shape[0]):
        g = tables[r]
        out[r, 0] = weight9(g)
        out[r, 1] = 1 if ci1_9(g) else 0
        out[r, 2] = pc_order9(g, 9)
        out[r, 3] = degree9(g, scratch)


@njit(cache=True)
def sweep_batch(rules, keys, order, class_sigs, counters):
    """Accumulate per-class counters; returns the index of an unclassifiable rule or -1."""
    wal = np.zeros(32, dtype=np.int64)
    ac = np.zeros(32, dtype=np.int64)
    scratch = np.zeros(32, dtype=np.int64)
    sig = np.zeros(SIG_LEN, dtype=np.int64)
    g = np.zeros(NWORDS, dtype=np.int64)
    gscratch = np.zeros(NWORDS, dtype=np.int64)
    y = np.zeros((5, NWORDS), dtype=np.int64)
    mon = np.zeros((32, NWORDS), dtype=np.int64)
    for r in range(rules.shape[0]):
        f = rules[r]
        walsh5(f, wal)
        autocorr5(f, ac, scratch)
        coeffs = anf5(f)
        d = degree5(coeffs)
        signature5(wal, ac, d, sig)
        c = lookup_class(sig, keys, order, class_sigs)
        if c < 0:
            return r
        row = counters[c]
        balanced = wal[0] == 0
        ci1 = wal[1] == 0 and wal[2] == 0 and wal[4] == 0 and wal[8] == 0 and wal[16] == 0
        pc = vanishing_order(ac, SHELL5, SHELL5_START, 5)
        row[TOTAL] += 1
        if balanced:
            row[BALANCED] += 1
        if ci1:
            row[CI1] += 1
        if pc >= 1:
            row[SAC] += 1
        for k in range(2, min(pc, 5) + 1):
            row[PC2 + k - 2] += 1
        if d >= 2:
            row[NONLINEAR] += 1

        extend_words(coeffs, g, y, mon)
        dg = degree9(g, gscratch)
        if dg >= d:
            row[DEG_GE_P] += 1
        if d >= 2 and dg >= 2:
            row[NONLINEAR_P] += 1
        if balanced and weight9(g) == 256:
            row[BALANCED_P] += 1
        if ci1 and ci1_9(g):
            row[CI1_P] += 1
        if pc >= 1:
            pcg = pc_order9(g, min(pc, 5))
            if pcg >= 1:
                row[SAC_P] += 1
            for k in range(2, pcg + 1):
                row[PC2_P + k - 2] += 1
    return -1


# ---------------------------------------------------------------- orbit search


@njit(cache=True)
def _mix(f):
    h = f ^ (f >> 16)
    h = (h * 0x45D9F3B) & M32
    return h ^ (h >> 16)


@njit(cache=True)
def _insert(table, f):
    mask = table.shape[0] - 1
    h = _mix(f) & mask
    while True:
        v = table[h]
        if v == 0:
            table[h] = f + 1
            return True
        if v == f + 1:
            return False
        h = (h + 1) & mask


@njit(cache=True)
def _push(table, members, count, g):
    """Insert g; returns the new count, or -1 once the limit is exceeded."""
    if _insert(table, g):
        if count >= members.shape[0]:
            return -1
        members[count] = g
        return count + 1
    return count


@njit(cache=True)
def orbit_bfs(rep, members, table):
    """Breadth-first closure of ``rep`` under the affine generators.

    Returns the orbit size (members[:size] holds it) or -1 when the orbit
    has more than ``len(members)`` elements.
    """
    count = _push(table, members, 0, rep)
    head = 0
    while head < count:
        f = members[head]
        head += 1
        for i in range(5):
            for j in range(i + 1, 5):
                count = _push(table, members, count, swap5(f, i, j))
                if count < 0:
                    return -1
        for i in range(5):
            for j in range(5):
                if i != j:
                    count = _push(table, members, count, transvect5(f, i, j))
                    if count < 0:
                        return -1
        for i in range(5):
            count = _push(table, members, count, flip5(f, i))
            if count < 0:
                return -1
            count = _push(table, members, count, f ^ VAR5[i])
            if count < 0:
                return -1
        count = _push(table, members, count, f ^ M32)
        if count < 0:
            return -1
    return count
