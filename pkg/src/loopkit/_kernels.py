"""Compiled inner loops: normalized loop-table search and canonical labelling.

Identity programs are flat op lists over a value array ``vals``:
``vals[0:6]`` hold the variables x..w, ``vals[6:6+C]`` constants, and op i
writes ``vals[6+C+i]``.  Unknown values are -1 while a table is partial.
"""
import numpy as np
from numba import njit

OP_MUL, OP_LDIV, OP_RDIV, OP_RINV, OP_LINV, OP_MAP = 0, 1, 2, 3, 4, 5


@njit(cache=True)
def _assign(T, rowpos, colpos, r, c, v, trail, tl):
    # rowpos[r, v] = column of v in row r; colpos[c, v] = row of v in column c
    if T[r, c] >= 0:
        return (T[r, c] == v), tl
    if rowpos[r, v] >= 0 or colpos[c, v] >= 0:
        return False, tl
    T[r, c] = v
    rowpos[r, v] = c
    colpos[c, v] = r
    trail[tl] = r * T.shape[0] + c
    return True, tl + 1


@njit(cache=True)
def _undo(T, rowpos, colpos, trail, tl, target):
    n = T.shape[0]
    while tl > target:
        tl -= 1
        cell = trail[tl]
        r = cell // n
        c = cell % n
        v = T[r, c]
        rowpos[r, v] = -1
        colpos[c, v] = -1
        T[r, c] = -1
    return tl


@njit(cache=True)
def _eval_op(T, rowpos, colpos, code, a, b, maps, mi):
    if a < 0:
        return -1
    if code == OP_RINV:
        return rowpos[a, 0]
    if code == OP_LINV:
        return colpos[a, 0]
    if code == OP_MAP:
        return maps[mi, a]
    if b < 0:
        return -1
    if code == OP_MUL:
        return T[a, b]
    if code == OP_LDIV:
        return rowpos[a, b]
    return colpos[b, a]


@njit(cache=True)
def _force(T, rowpos, colpos, code, a, b, target, trail, tl):
    """Make the top op ``code(a, b)`` evaluate to ``target``; returns (ok, changed, tl)."""
    if a < 0:
        return True, False, tl
    if code == OP_RINV:
        ok, tl2 = _assign(T, rowpos, colpos, a, target, 0, trail, tl)
        return ok, tl2 != tl, tl2
    if code == OP_LINV:
        ok, tl2 = _assign(T, rowpos, colpos, target, a, 0, trail, tl)
        return ok, tl2 != tl, tl2
    if code == OP_MAP or b < 0:
        return True, False, tl
    if code == OP_MUL:
        ok, tl2 = _assign(T, rowpos, colpos, a, b, target, trail, tl)
    elif code == OP_LDIV:
        ok, tl2 = _assign(T, rowpos, colpos, a, target, b, trail, tl)
    else:
        ok, tl2 = _assign(T, rowpos, colpos, target, b, a, trail, tl)
    return ok, tl2 != tl, tl2


@njit(cache=True)
def _identity_pass(T, rowpos, colpos, ops, nops, nvars, lhs, rhs, consts, maps, trail, tl):
    n = T.shape[0]
    nc = consts.shape[0]
    changed = False
    vals = np.empty(6 + nc + ops.shape[1], dtype=np.int64)
    for i in range(nc):
        vals[6 + i] = consts[i]
    for k in range(ops.shape[0]):
        nv = nvars[k]
        total = 1
        for _ in range(nv):
            total *= n
        for idx in range(total):
            rem = idx
            for j in range(nv - 1, -1, -1):
                vals[j] = rem % n
                rem //= n
            base = 6 + nc
            for i in range(nops[k]):
                code = ops[k, i, 0]
                a = vals[ops[k, i, 1]]
                b = vals[ops[k, i, 2]] if ops[k, i, 2] >= 0 else -1
                vals[base + i] = _eval_op(T, rowpos, colpos, code, a, b, maps, ops[k, i, 2])
            lv = vals[lhs[k]]
            rv = vals[rhs[k]]
            if lv >= 0 and rv >= 0:
                if lv != rv:
                    return False, changed, tl
                continue
            if lv < 0 and rv < 0:
                continue
            # exactly one side known: try forcing the other side's top op
            side = rhs[k] if lv >= 0 else lhs[k]
            target = lv if lv >= 0 else rv
            if side < base:
                continue
            i = side - base
            code = ops[k, i, 0]
            a = vals[ops[k, i, 1]]
            b = vals[ops[k, i, 2]] if ops[k, i, 2] >= 0 else -1
            ok, ch, tl = _force(T, rowpos, colpos, code, a, b, target, trail, tl)
            if not ok:
                return False, changed, tl
            if ch:
                changed = True
    return True, changed, tl


@njit(cache=True)
def _latin_pass(T, rowpos, colpos, trail, tl):
    n = T.shape[0]
    changed = False
    for r in range(n):
        for c in range(n):
            if T[r, c] >= 0:
                continue
            cnt = 0
            last = -1
            for v in range(n):
                if rowpos[r, v] < 0 and colpos[c, v] < 0:
                    cnt += 1
                    last = v
            if cnt == 0:
                return False, changed, tl
            if cnt == 1:
                ok, tl = _assign(T, rowpos, colpos, r, c, last, trail, tl)
                if not ok:
                    return False, changed, tl
                changed = True
    for r in range(n):
        for v in range(n):
            if rowpos[r, v] >= 0:
                continue
            cnt = 0
            last = -1
            for c in range(n):
                if T[r, c] < 0 and colpos[c, v] < 0:
                    cnt += 1
                    last = c
            if cnt == 0:
                return False, changed, tl
            if cnt == 1:
                ok, tl = _assign(T, rowpos, colpos, r, last, v, trail, tl)
                if not ok:
                    return False, changed, tl
                changed = True
    for c in range(n):
        for v in range(n):
            if colpos[c, v] >= 0:
                continue
            cnt = 0
            last = -1
            for r in range(n):
                if T[r, c] < 0 and rowpos[r, v] < 0:
                    cnt += 1
                    last = r
            if cnt == 0:
                return False, changed, tl
            if cnt == 1:
                ok, tl = _assign(T, rowpos, colpos, last, c, v, trail, tl)
                if not ok:
                    return False, changed, tl
                changed = True
    return True, changed, tl


@njit(cache=True)
def _propagate(T, rowpos, colpos, ops, nops, nvars, lhs, rhs, consts, maps, trail, tl):
    while True:
        ok, ch1, tl = _latin_pass(T, rowpos, colpos, trail, tl)
        if not ok:
            return False, tl
        ok, ch2, tl = _identity_pass(T, rowpos, colpos, ops, nops, nvars, lhs, rhs, consts, maps, trail, tl)
        if not ok:
            return False, tl
        if not ch1 and not ch2:
            return True, tl


@njit(cache=True)
def search_tables(init, ops, nops, nvars, lhs, rhs, consts, maps, out):
    """Enumerate completions of ``init`` (-1 = empty) satisfying every program.

    Writes solutions into ``out`` and returns how many were found; stops when
    ``out`` is full (the caller retries with a larger buffer).
    """
    n = init.shape[0]
    T = np.full((n, n), -1, dtype=np.int64)
    rowpos = np.full((n, n), -1, dtype=np.int64)
    colpos = np.full((n, n), -1, dtype=np.int64)
    trail = np.empty(n * n, dtype=np.int64)
    tl = 0
    for r in range(n):
        for c in range(n):
            if init[r, c] >= 0:
                ok, tl = _assign(T, rowpos, colpos, r, c, init[r, c], trail, tl)
                if not ok:
                    return 0
    ok, tl = _propagate(T, rowpos, colpos, ops, nops, nvars, lhs, rhs, consts, maps, trail, tl)
    if not ok:
        return 0
    st_cell = np.empty(n * n + 1, dtype=np.int64)
    st_val = np.empty(n * n + 1, dtype=np.int64)
    st_tl = np.empty(n * n + 1, dtype=np.int64)
    depth = 0
    nsol = 0
    cap = out.shape[0]
    branch = True
    while True:
        if branch:
            best = -1
            bestcnt = n + 1
            for r in range(n):
                for c in range(n):
                    if T[r, c] >= 0:
                        continue
                    cnt = 0
                    for v in range(n):
                        if rowpos[r, v] < 0 and colpos[c, v] < 0:
                            cnt += 1
                    if cnt < bestcnt:
                        bestcnt = cnt
                        best = r * n + c
            if best < 0:
                out[nsol] = T
                nsol += 1
                if nsol >= cap:
                    return nsol
            else:
                st_cell[depth] = best
                st_val[depth] = -1
                st_tl[depth] = tl
                depth += 1
            branch = False
        if depth == 0:
            return nsol
        f = depth - 1
        tl = _undo(T, rowpos, colpos, trail, tl, st_tl[f])
        r = st_cell[f] // n
        c = st_cell[f] % n
        v = st_val[f] + 1
        while v < n and (rowpos[r, v] >= 0 or colpos[c, v] >= 0):
            v += 1
        if v >= n:
            depth -= 1
            continue
        st_val[f] = v
        ok, tl = _assign(T, rowpos, colpos, r, c, v, trail, tl)
        if ok:
            ok, tl = _propagate(T, rowpos, colpos, ops, nops, nvars, lhs, rhs, consts, maps, trail, tl)
        if ok:
            branch = True


@njit(cache=True)
def _close(T, order, pos, done, m):
    while done < m:
        j = done
        for p in range(j + 1):
            a = T[order[p], order[j]]
            if pos[a] < 0:
                pos[a] = m
                order[m] = a
                m += 1
            if p != j:
                b = T[order[j], order[p]]
                if pos[b] < 0:
                    pos[b] = m
                    order[m] = b
                    m += 1
        done += 1
    return m


@njit(cache=True)
def _compare_relabel(T, order, pos, best):
    """-1, 0, 1 comparing the relabelled table with ``best`` (row-major)."""
    n = T.shape[0]
    for i in range(n):
        for j in range(n):
            v = pos[T[order[i], order[j]]]
            if v < best[i, j]:
                return -1
            if v > best[i, j]:
                return 1
    return 0


@njit(cache=True)
def canonical_labelling(T, e):
    """Minimum relabelled table over all generator-driven labellings.

    Returns (table, order) where ``order[i]`` is the old element receiving
    label i.  Isomorphic loops get identical tables.
    """
    n = T.shape[0]
    best = np.full((n, n), n, dtype=np.int64)
    best_order = np.arange(n)
    order = np.empty(n, dtype=np.int64)
    pos = np.full(n, -1, dtype=np.int64)
    order[0] = e
    pos[e] = 0
    m = _close(T, order, pos, 0, 1)
    if m == n:
        for i in range(n):
            for j in range(n):
                best[i, j] = pos[T[order[i], order[j]]]
        return best, order.copy()
    st_m = np.empty(n + 1, dtype=np.int64)
    st_next = np.empty(n + 1, dtype=np.int64)
    st_m[0] = m
    st_next[0] = 0
    depth = 1
    while depth > 0:
        f = depth - 1
        for i in range(st_m[f], m):
            pos[order[i]] = -1
        m = st_m[f]
        c = st_next[f]
        while c < n and pos[c] >= 0:
            c += 1
        if c >= n:
            depth -= 1
            continue
        st_next[f] = c + 1
        old_m = m
        order[m] = c
        pos[c] = m
        m += 1
        m = _close(T, order, pos, old_m, m)
        if m == n:
            if _compare_relabel(T, order, pos, best) < 0:
                for i in range(n):
                    for j in range(n):
                        best[i, j] = pos[T[order[i], order[j]]]
                best_order[:] = order
        else:
            st_m[depth] = m
            st_next[depth] = 0
            depth += 1
    return best, best_order


@njit(cache=True)
def canonical_forms(tables, e):
    k = tables.shape[0]
    n = tables.shape[1]
    out = np.empty((k, n, n), dtype=np.int64)
    for i in range(k):
        out[i], _ = canonical_labelling(tables[i], e)
    return out
