"""Flat-array Edmonds blossom kernel for maximum-weight matching.

This is a mechanical port of the classic Galil/Edmonds primal-dual
blossom algorithm (the van Rantwijk formulation, as also shipped by
networkx) onto preallocated integer arrays so that the whole solver can
be compiled with numba.  Vertices are ids ``0..n-1``; non-trivial
blossoms are ids ``n..2n-1``; ``-1`` plays the role of "none".  All
edge weights must be non-negative integers; dual variables then stay
integral throughout (they are stored pre-multiplied by two, exactly as
in the reference implementation).

The public entry point is :func:`solve_max_weight_matching`; the
wrapping module :mod:`kagomez4.matching` builds the CSR adjacency, the
edge-id lookup matrix and the min-weight transform.
"""

from __future__ import annotations

import numpy as np

try:  # pragma: no cover - exercised implicitly by every solver call
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


_FREE, _S, _T = 0, 1, 2


@njit(cache=True)
def _blossom_leaves(b, n, child_cnt, childs, buf, stack):
    """Collect the leaf vertices of blossom ``b`` into ``buf``; return count."""
    if b < n:
        buf[0] = b
        return 1
    count = 0
    sp = 0
    stack[sp] = b
    sp += 1
    while sp > 0:
        sp -= 1
        t = stack[sp]
        if t < n:
            buf[count] = t
            count += 1
        else:
            for ci in range(child_cnt[t - n]):
                stack[sp] = childs[t - n, ci]
                sp += 1
    return count


@njit(cache=True)
def _assign_label(
    w0,
    t0,
    v0,
    n,
    mate,
    label,
    labeledge_v,
    labeledge_w,
    inblossom,
    blossombase,
    bestedge,
    child_cnt,
    childs,
    queue,
    queue_sp,
    leafbuf,
    leafstack,
):
    """Label vertex ``w0``'s blossom with ``t0`` via vertex ``v0`` (-1: none).

    A T-label chains into an S-label on the base's mate; the chain is
    iterative here (the reference recursion is a tail call).  Newly
    S-labeled leaves are pushed on the scan queue; the updated queue size
    is returned.
    """
    w = w0
    t = t0
    v = v0
    while True:
        b = inblossom[w]
        label[w] = t
        label[b] = t
        if v != -1:
            labeledge_v[w] = v
            labeledge_w[w] = w
            labeledge_v[b] = v
            labeledge_w[b] = w
        else:
            labeledge_v[w] = -1
            labeledge_w[w] = -1
            labeledge_v[b] = -1
            labeledge_w[b] = -1
        bestedge[w] = -1
        bestedge[b] = -1
        if t == _S:
            cnt = _blossom_leaves(b, n, child_cnt, childs, leafbuf, leafstack)
            for li in range(cnt):
                queue[queue_sp] = leafbuf[li]
                queue_sp += 1
            return queue_sp
        # t == _T: the base's mate becomes an S-vertex.
        base = blossombase[b]
        v = base
        w = mate[base]
        t = _S


@njit(cache=True)
def _augment_blossom(
    b0,
    v0,
    n,
    mate,
    blossomparent,
    blossombase,
    child_cnt,
    childs,
    bedge_v,
    bedge_w,
    frames,
    rotbuf,
):
    """Swap matched/unmatched edges along the path from ``v0`` to the base.

    Iterative rendition of the reference recursion; ``frames`` is an
    ``(n+1, 8)`` scratch array holding (b, v, i, j, jstep, pc, w, x) per
    stack frame.
    """
    sp = 0
    frames[sp, 0] = b0
    frames[sp, 1] = v0
    frames[sp, 5] = 0
    sp += 1
    while sp > 0:
        f = sp - 1
        b = frames[f, 0]
        v = frames[f, 1]
        pc = frames[f, 5]
        bi = b - n
        cnt = child_cnt[bi]
        if pc == 0:
            # Bubble up from v to an immediate sub-blossom t of b.
            t = v
            while blossomparent[t] != b:
                t = blossomparent[t]
            i = 0
            for ci in range(cnt):
                if childs[bi, ci] == t:
                    i = ci
                    break
            if i & 1:
                j = i - cnt
                jstep = 1
            else:
                j = i
                jstep = -1
            frames[f, 2] = i
            frames[f, 3] = j
            frames[f, 4] = jstep
            frames[f, 5] = 1
            if t >= n:
                frames[sp, 0] = t
                frames[sp, 1] = v
                frames[sp, 5] = 0
                sp += 1
            continue
        if pc == 1:
            j = frames[f, 3]
            jstep = frames[f, 4]
            if j == 0:
                # Rotate children/edges so the new base is in front.
                i = frames[f, 2]
                if i != 0:
                    for ci in range(cnt):
                        rotbuf[ci] = childs[bi, (i + ci) % cnt]
                    for ci in range(cnt):
                        childs[bi, ci] = rotbuf[ci]
                    for ci in range(cnt):
                        rotbuf[ci] = bedge_v[bi, (i + ci) % cnt]
                    for ci in range(cnt):
                        bedge_v[bi, ci] = rotbuf[ci]
                    for ci in range(cnt):
                        rotbuf[ci] = bedge_w[bi, (i + ci) % cnt]
                    for ci in range(cnt):
                        bedge_w[bi, ci] = rotbuf[ci]
                blossombase[b] = blossombase[childs[bi, 0]]
                sp -= 1
                continue
            j += jstep
            frames[f, 3] = j
            t = childs[bi, j % cnt]
            if jstep == 1:
                w = bedge_v[bi, j % cnt]
                x = bedge_w[bi, j % cnt]
            else:
                x = bedge_v[bi, (j - 1) % cnt]
                w = bedge_w[bi, (j - 1) % cnt]
            frames[f, 6] = w
            frames[f, 7] = x
            frames[f, 5] = 2
            if t >= n:
                frames[sp, 0] = t
                frames[sp, 1] = w
                frames[sp, 5] = 0
                sp += 1
            continue
        if pc == 2:
            j = frames[f, 3] + frames[f, 4]
            frames[f, 3] = j
            t = childs[bi, j % cnt]
            frames[f, 5] = 3
            if t >= n:
                frames[sp, 0] = t
                frames[sp, 1] = frames[f, 7]
                frames[sp, 5] = 0
                sp += 1
            continue
        # pc == 3: match the connecting edge, back to the loop head.
        w = frames[f, 6]
        x = frames[f, 7]
        mate[w] = x
        mate[x] = w
        frames[f, 5] = 1


@njit(cache=True)
def _expand_blossom(
    b0,
    endstage,
    n,
    mate,
    label,
    labeledge_v,
    labeledge_w,
    inblossom,
    blossomparent,
    blossombase,
    bestedge,
    dual,
    allowedge,
    blossom_used,
    child_cnt,
    childs,
    bedge_v,
    bedge_w,
    mybest_cnt,
    unused,
    unused_sp,
    queue,
    queue_sp,
    eid,
    leafbuf,
    leafstack,
    expstack,
):
    """Dissolve top-level blossom ``b0`` (recursively when ``endstage``).

    Returns the updated ``(unused_sp, queue_sp)`` stack sizes.
    """
    esp = 0
    expstack[esp] = b0
    esp += 1
    while esp > 0:
        esp -= 1
        b = expstack[esp]
        bi = b - n
        cnt = child_cnt[bi]
        # Convert sub-blossoms into top-level blossoms.
        for ci in range(cnt):
            s = childs[bi, ci]
            blossomparent[s] = -1
            if s < n:
                inblossom[s] = s
            elif endstage and dual[s] == 0:
                expstack[esp] = s
                esp += 1
            else:
                lcnt = _blossom_leaves(
                    s, n, child_cnt, childs, leafbuf, leafstack
                )
                for li in range(lcnt):
                    inblossom[leafbuf[li]] = s
        if (not endstage) and label[b] == _T:
            # Relabel sub-blossoms along the path from the entry child to
            # the base.
            entrychild = inblossom[labeledge_w[b]]
            j = 0
            for ci in range(cnt):
                if childs[bi, ci] == entrychild:
                    j = ci
                    break
            if j & 1:
                j -= cnt
                jstep = 1
            else:
                jstep = -1
            v = labeledge_v[b]
            w = labeledge_w[b]
            while j != 0:
                if jstep == 1:
                    p = bedge_v[bi, j % cnt]
                    q = bedge_w[bi, j % cnt]
                else:
                    q = bedge_v[bi, (j - 1) % cnt]
                    p = bedge_w[bi, (j - 1) % cnt]
                label[w] = _FREE
                label[q] = _FREE
                queue_sp = _assign_label(
                    w,
                    _T,
                    v,
                    n,
                    mate,
                    label,
                    labeledge_v,
                    labeledge_w,
                    inblossom,
                    blossombase,
                    bestedge,
                    child_cnt,
                    childs,
                    queue,
                    queue_sp,
                    leafbuf,
                    leafstack,
                )
                allowedge[eid[p, q]] = True
                j += jstep
                if jstep == 1:
                    v = bedge_v[bi, j % cnt]
                    w = bedge_w[bi, j % cnt]
                else:
                    w = bedge_v[bi, (j - 1) % cnt]
                    v = bedge_w[bi, (j - 1) % cnt]
                allowedge[eid[v, w]] = True
                j += jstep
            # Relabel the base sub-blossom without chaining to its mate.
            bw = childs[bi, 0]
            label[w] = _T
            label[bw] = _T
            labeledge_v[w] = v
            labeledge_w[w] = w
            labeledge_v[bw] = v
            labeledge_w[bw] = w
            bestedge[bw] = -1
            j = jstep
            while childs[bi, j % cnt] != entrychild:
                bv = childs[bi, j % cnt]
                if label[bv] == _S:
                    j += jstep
                    continue
                lv_found = -1
                if bv < n:
                    if label[bv] != _FREE:
                        lv_found = bv
                else:
                    lcnt = _blossom_leaves(
                        bv, n, child_cnt, childs, leafbuf, leafstack
                    )
                    for li in range(lcnt):
                        if label[leafbuf[li]] != _FREE:
                            lv_found = leafbuf[li]
                            break
                if lv_found != -1:
                    label[lv_found] = _FREE
                    label[mate[blossombase[bv]]] = _FREE
                    queue_sp = _assign_label(
                        lv_found,
                        _T,
                        labeledge_v[lv_found],
                        n,
                        mate,
                        label,
                        labeledge_v,
                        labeledge_w,
                        inblossom,
                        blossombase,
                        bestedge,
                        child_cnt,
                        childs,
                        queue,
                        queue_sp,
                        leafbuf,
                        leafstack,
                    )
                j += jstep
        # Remove the expanded blossom entirely.
        label[b] = _FREE
        labeledge_v[b] = -1
        labeledge_w[b] = -1
        bestedge[b] = -1
        blossomparent[b] = -1
        blossombase[b] = -1
        dual[b] = 0
        blossom_used[bi] = False
        mybest_cnt[bi] = -1
        child_cnt[bi] = 0
        unused[unused_sp] = b
        unused_sp += 1
    return unused_sp, queue_sp


@njit(cache=True)
def solve_max_weight_matching(
    n,
    e_u,
    e_v,
    e_w,
    adj_start,
    adj_other,
    adj_eid,
    eid,
    maxcardinality,
):
    """Maximum-weight matching; returns ``mate`` (vertex -> vertex or -1).

    ``e_u, e_v, e_w`` are parallel edge arrays; ``adj_*`` is the CSR
    adjacency (``adj_other`` the far endpoint, ``adj_eid`` the edge id of
    each incidence); ``eid[i, j]`` looks up the id of edge ``{i, j}``.
    """
    m = len(e_u)
    mate = np.full(n, -1, dtype=np.int64)
    if m == 0:
        return mate

    maxweight = 0
    for k in range(m):
        if e_w[k] > maxweight:
            maxweight = e_w[k]

    two_n = 2 * n
    label = np.zeros(two_n, dtype=np.int64)
    labeledge_v = np.full(two_n, -1, dtype=np.int64)
    labeledge_w = np.full(two_n, -1, dtype=np.int64)
    inblossom = np.arange(n, dtype=np.int64)
    blossomparent = np.full(two_n, -1, dtype=np.int64)
    blossombase = np.full(two_n, -1, dtype=np.int64)
    for v in range(n):
        blossombase[v] = v
    bestedge = np.full(two_n, -1, dtype=np.int64)
    dual = np.zeros(two_n, dtype=np.int64)
    for v in range(n):
        dual[v] = maxweight
    allowedge = np.zeros(m, dtype=np.bool_)
    blossom_used = np.zeros(n, dtype=np.bool_)  # row index: blossom id - n

    max_childs = n + 1
    childs = np.full((n, max_childs), -1, dtype=np.int64)
    child_cnt = np.zeros(n, dtype=np.int64)
    bedge_v = np.full((n, max_childs), -1, dtype=np.int64)
    bedge_w = np.full((n, max_childs), -1, dtype=np.int64)

    # Least-slack edge candidates per non-trivial S-blossom (-1 count:
    # not computed, mirroring the reference's None).
    mybest = np.full((n, two_n), -1, dtype=np.int64)
    mybest_cnt = np.full(n, -1, dtype=np.int64)

    unused = np.empty(n, dtype=np.int64)
    for i in range(n):
        unused[i] = two_n - 1 - i
    unused_sp = n

    queue = np.empty(2 * n * n + 8 * n + 16, dtype=np.int64)
    queue_sp = 0

    leafbuf = np.empty(n, dtype=np.int64)
    leafbuf2 = np.empty(n, dtype=np.int64)
    leafstack = np.empty(n, dtype=np.int64)
    scanpath = np.empty(two_n, dtype=np.int64)
    frames = np.empty((n + 2, 8), dtype=np.int64)
    rotbuf = np.empty(max_childs, dtype=np.int64)
    expstack = np.empty(n + 1, dtype=np.int64)
    bestedgeto = np.empty(two_n, dtype=np.int64)

    while True:  # stages
        label[:] = _FREE
        labeledge_v[:] = -1
        labeledge_w[:] = -1
        bestedge[:] = -1
        mybest_cnt[:] = -1
        allowedge[:] = False
        queue_sp = 0

        for v0 in range(n):
            if mate[v0] == -1 and label[inblossom[v0]] == _FREE:
                queue_sp = _assign_label(
                    v0,
                    _S,
                    -1,
                    n,
                    mate,
                    label,
                    labeledge_v,
                    labeledge_w,
                    inblossom,
                    blossombase,
                    bestedge,
                    child_cnt,
                    childs,
                    queue,
                    queue_sp,
                    leafbuf,
                    leafstack,
                )

        augmented = False
        while True:  # substages
            while queue_sp > 0 and not augmented:
                queue_sp -= 1
                v = queue[queue_sp]
                for ai in range(adj_start[v], adj_start[v + 1]):
                    w = adj_other[ai]
                    k = adj_eid[ai]
                    bv = inblossom[v]
                    bw = inblossom[w]
                    if bv == bw:
                        continue
                    kslack = dual[v] + dual[w] - 2 * e_w[k]
                    if not allowedge[k] and kslack <= 0:
                        allowedge[k] = True
                    if allowedge[k]:
                        if label[bw] == _FREE:
                            queue_sp = _assign_label(
                                w,
                                _T,
                                v,
                                n,
                                mate,
                                label,
                                labeledge_v,
                                labeledge_w,
                                inblossom,
                                blossombase,
                                bestedge,
                                child_cnt,
                                childs,
                                queue,
                                queue_sp,
                                leafbuf,
                                leafstack,
                            )
                        elif label[bw] == _S:
                            # Trace back from both sides: a common ancestor
                            # means a new blossom, otherwise an augmenting
                            # path.
                            path_len = 0
                            base_found = -1
                            sv = v
                            sw = w
                            while sv != -1:
                                b = inblossom[sv]
                                if label[b] & 4:
                                    base_found = blossombase[b]
                                    break
                                scanpath[path_len] = b
                                path_len += 1
                                label[b] = 5
                                if labeledge_v[b] == -1:
                                    sv = -1
                                else:
                                    sv = labeledge_v[b]
                                    b = inblossom[sv]
                                    sv = labeledge_v[b]
                                if sw != -1:
                                    tmp = sv
                                    sv = sw
                                    sw = tmp
                            for pi in range(path_len):
                                label[scanpath[pi]] = _S
                            if base_found != -1:
                                queue_sp, unused_sp = _add_blossom(
                                    base_found,
                                    v,
                                    w,
                                    n,
                                    e_u,
                                    e_v,
                                    e_w,
                                    adj_start,
                                    adj_other,
                                    adj_eid,
                                    label,
                                    labeledge_v,
                                    labeledge_w,
                                    inblossom,
                                    blossomparent,
                                    blossombase,
                                    bestedge,
                                    dual,
                                    blossom_used,
                                    child_cnt,
                                    childs,
                                    bedge_v,
                                    bedge_w,
                                    mybest,
                                    mybest_cnt,
                                    unused,
                                    unused_sp,
                                    queue,
                                    queue_sp,
                                    leafbuf,
                                    leafbuf2,
                                    leafstack,
                                    rotbuf,
                                    bestedgeto,
                                )
                            else:
                                # Augmenting path found: flip it.
                                for side in range(2):
                                    if side == 0:
                                        s = v
                                        j = w
                                    else:
                                        s = w
                                        j = v
                                    while True:
                                        bs = inblossom[s]
                                        if bs >= n:
                                            _augment_blossom(
                                                bs,
                                                s,
                                                n,
                                                mate,
                                                blossomparent,
                                                blossombase,
                                                child_cnt,
                                                childs,
                                                bedge_v,
                                                bedge_w,
                                                frames,
                                                rotbuf,
                                            )
                                        mate[s] = j
                                        if labeledge_v[bs] == -1:
                                            break
                                        t2 = labeledge_v[bs]
                                        bt = inblossom[t2]
                                        s2 = labeledge_v[bt]
                                        j2 = labeledge_w[bt]
                                        if bt >= n:
                                            _augment_blossom(
                                                bt,
                                                j2,
                                                n,
                                                mate,
                                                blossomparent,
                                                blossombase,
                                                child_cnt,
                                                childs,
                                                bedge_v,
                                                bedge_w,
                                                frames,
                                                rotbuf,
                                            )
                                        mate[j2] = s2
                                        s = s2
                                        j = j2
                                augmented = True
                                break
                        elif label[w] == _FREE:
                            # Vertex inside a T-blossom, first touch from
                            # outside: record the reaching edge for later
                            # relabeling on expansion.
                            label[w] = _T
                            labeledge_v[w] = v
                            labeledge_w[w] = w
                    elif label[bw] == _S:
                        be = bestedge[bv]
                        if be == -1 or kslack < (
                            dual[e_u[be]] + dual[e_v[be]] - 2 * e_w[be]
                        ):
                            bestedge[bv] = k
                    elif label[w] == _FREE:
                        be = bestedge[w]
                        if be == -1 or kslack < (
                            dual[e_u[be]] + dual[e_v[be]] - 2 * e_w[be]
                        ):
                            bestedge[w] = k

            if augmented:
                break

            # Dual adjustment: find the binding constraint.
            deltatype = -1
            delta = 0
            deltaedge = -1
            deltablossom = -1

            if not maxcardinality:
                deltatype = 1
                delta = dual[0]
                for v2 in range(1, n):
                    if dual[v2] < delta:
                        delta = dual[v2]

            for v2 in range(n):
                if label[inblossom[v2]] == _FREE and bestedge[v2] != -1:
                    k2 = bestedge[v2]
                    d = dual[e_u[k2]] + dual[e_v[k2]] - 2 * e_w[k2]
                    if deltatype == -1 or d < delta:
                        delta = d
                        deltatype = 2
                        deltaedge = k2

            for b2 in range(two_n):
                if b2 >= n and not blossom_used[b2 - n]:
                    continue
                if (
                    blossomparent[b2] == -1
                    and label[b2] == _S
                    and bestedge[b2] != -1
                ):
                    k2 = bestedge[b2]
                    kslack = dual[e_u[k2]] + dual[e_v[k2]] - 2 * e_w[k2]
                    d = kslack // 2
                    if deltatype == -1 or d < delta:
                        delta = d
                        deltatype = 3
                        deltaedge = k2

            for b2 in range(n, two_n):
                if not blossom_used[b2 - n]:
                    continue
                if (
                    blossomparent[b2] == -1
                    and label[b2] == _T
                    and (deltatype == -1 or dual[b2] < delta)
                ):
                    delta = dual[b2]
                    deltatype = 4
                    deltablossom = b2

            if deltatype == -1:
                # Max-cardinality optimum reached; final feasibility nudge.
                deltatype = 1
                dmin = dual[0]
                for v2 in range(1, n):
                    if dual[v2] < dmin:
                        dmin = dual[v2]
                delta = dmin if dmin > 0 else 0

            for v2 in range(n):
                lab = label[inblossom[v2]]
                if lab == _S:
                    dual[v2] -= delta
                elif lab == _T:
                    dual[v2] += delta
            for b2 in range(n, two_n):
                if blossom_used[b2 - n] and blossomparent[b2] == -1:
                    if label[b2] == _S:
                        dual[b2] += delta
                    elif label[b2] == _T:
                        dual[b2] -= delta

            if deltatype == 1:
                break
            elif deltatype == 2 or deltatype == 3:
                allowedge[deltaedge] = True
                v2 = e_u[deltaedge]
                if label[inblossom[v2]] != _S:
                    v2 = e_v[deltaedge]
                queue[queue_sp] = v2
                queue_sp += 1
            elif deltatype == 4:
                unused_sp, queue_sp = _expand_blossom(
                    deltablossom,
                    False,
                    n,
                    mate,
                    label,
                    labeledge_v,
                    labeledge_w,
                    inblossom,
                    blossomparent,
                    blossombase,
                    bestedge,
                    dual,
                    allowedge,
                    blossom_used,
                    child_cnt,
                    childs,
                    bedge_v,
                    bedge_w,
                    mybest_cnt,
                    unused,
                    unused_sp,
                    queue,
                    queue_sp,
                    eid,
                    leafbuf,
                    leafstack,
                    expstack,
                )

        if not augmented:
            break

        # End of stage: expand S-blossoms that have used up their dual.
        for b2 in range(n, two_n):
            if (
                blossom_used[b2 - n]
                and blossomparent[b2] == -1
                and label[b2] == _S
                and dual[b2] == 0
            ):
                unused_sp, queue_sp = _expand_blossom(
                    b2,
                    True,
                    n,
                    mate,
                    label,
                    labeledge_v,
                    labeledge_w,
                    inblossom,
                    blossomparent,
                    blossombase,
                    bestedge,
                    dual,
                    allowedge,
                    blossom_used,
                    child_cnt,
                    childs,
                    bedge_v,
                    bedge_w,
                    mybest_cnt,
                    unused,
                    unused_sp,
                    queue,
                    queue_sp,
                    eid,
                    leafbuf,
                    leafstack,
                    expstack,
                )

    return mate


@njit(cache=True)
def _add_blossom(
    base,
    v,
    w,
    n,
    e_u,
    e_v,
    e_w,
    adj_start,
    adj_other,
    adj_eid,
    label,
    labeledge_v,
    labeledge_w,
    inblossom,
    blossomparent,
    blossombase,
    bestedge,
    dual,
    blossom_used,
    child_cnt,
    childs,
    bedge_v,
    bedge_w,
    mybest,
    mybest_cnt,
    unused,
    unused_sp,
    queue,
    queue_sp,
    leafbuf,
    leafbuf2,
    leafstack,
    rotbuf,
    bestedgeto,
):
    """Fold the odd cycle through ``v``-``w`` with base ``base`` into a
    new S-blossom; returns updated ``(queue_sp, unused_sp)``."""
    two_n = 2 * n
    bb = inblossom[base]
    bv = inblossom[v]
    bw = inblossom[w]
    unused_sp -= 1
    b_new = unused[unused_sp]
    bi = b_new - n
    blossom_used[bi] = True
    blossombase[b_new] = base
    blossomparent[b_new] = -1
    blossomparent[bb] = b_new

    # Walk from v back to the base, collecting children and the edges
    # through which they were labeled.
    ccount = 0
    vv = v
    while bv != bb:
        blossomparent[bv] = b_new
        childs[bi, ccount] = bv
        bedge_v[bi, ccount] = labeledge_v[bv]
        bedge_w[bi, ccount] = labeledge_w[bv]
        ccount += 1
        vv = labeledge_v[bv]
        bv = inblossom[vv]
    childs[bi, ccount] = bb
    ccount += 1
    # Reference layout: childs = [bb, reversed v-chain], edges =
    # [reversed labeledges, (v, w)] -- reverse what we collected.
    for ii in range(ccount // 2):
        jj = ccount - 1 - ii
        tmp = childs[bi, ii]
        childs[bi, ii] = childs[bi, jj]
        childs[bi, jj] = tmp
    for ii in range(ccount - 1):
        rotbuf[ii] = bedge_v[bi, ii]
    for ii in range(ccount - 1):
        bedge_v[bi, ii] = rotbuf[ccount - 2 - ii]
    for ii in range(ccount - 1):
        rotbuf[ii] = bedge_w[bi, ii]
    for ii in range(ccount - 1):
        bedge_w[bi, ii] = rotbuf[ccount - 2 - ii]
    bedge_v[bi, ccount - 1] = v
    bedge_w[bi, ccount - 1] = w
    # Walk from w back to the base (edges reversed on this side).
    ww = w
    while bw != bb:
        blossomparent[bw] = b_new
        childs[bi, ccount] = bw
        bedge_v[bi, ccount] = labeledge_w[bw]
        bedge_w[bi, ccount] = labeledge_v[bw]
        ccount += 1
        ww = labeledge_v[bw]
        bw = inblossom[ww]
    child_cnt[bi] = ccount

    label[b_new] = _S
    labeledge_v[b_new] = labeledge_v[bb]
    labeledge_w[b_new] = labeledge_w[bb]
    dual[b_new] = 0

    # T-vertices absorbed into an S-blossom become scannable.
    cnt = _blossom_leaves(b_new, n, child_cnt, childs, leafbuf, leafstack)
    for li in range(cnt):
        lv = leafbuf[li]
        if label[inblossom[lv]] == _T:
            queue[queue_sp] = lv
            queue_sp += 1
        inblossom[lv] = b_new

    # Compute the least-slack edge candidates toward other S-blossoms.
    for b2 in range(two_n):
        bestedgeto[b2] = -1
    for ci in range(child_cnt[bi]):
        bv3 = childs[bi, ci]
        if bv3 >= n and mybest_cnt[bv3 - n] >= 0:
            # Merge the sub-blossom's candidate list.
            for ni in range(mybest_cnt[bv3 - n]):
                k2 = mybest[bv3 - n, ni]
                j2 = e_v[k2]
                if inblossom[j2] == b_new:
                    j2 = e_u[k2]
                bj = inblossom[j2]
                if bj != b_new and label[bj] == _S:
                    ks2 = dual[e_u[k2]] + dual[e_v[k2]] - 2 * e_w[k2]
                    old = bestedgeto[bj]
                    if old == -1 or ks2 < (
                        dual[e_u[old]] + dual[e_v[old]] - 2 * e_w[old]
                    ):
                        bestedgeto[bj] = k2
            mybest_cnt[bv3 - n] = -1
        else:
            # Scan all edges incident to the sub-blossom's vertices.
            lcnt = _blossom_leaves(
                bv3, n, child_cnt, childs, leafbuf2, leafstack
            )
            for li in range(lcnt):
                lv = leafbuf2[li]
                for ai in range(adj_start[lv], adj_start[lv + 1]):
                    j2 = adj_other[ai]
                    k2 = adj_eid[ai]
                    bj = inblossom[j2]
                    if bj != b_new and label[bj] == _S:
                        ks2 = dual[e_u[k2]] + dual[e_v[k2]] - 2 * e_w[k2]
                        old = bestedgeto[bj]
                        if old == -1 or ks2 < (
                            dual[e_u[old]] + dual[e_v[old]] - 2 * e_w[old]
                        ):
                            bestedgeto[bj] = k2
        bestedge[bv3] = -1

    nb_cnt = 0
    best_k = -1
    best_s = 0
    for b2 in range(two_n):
        k2 = bestedgeto[b2]
        if k2 != -1:
            mybest[bi, nb_cnt] = k2
            nb_cnt += 1
            ks2 = dual[e_u[k2]] + dual[e_v[k2]] - 2 * e_w[k2]
            if best_k == -1 or ks2 < best_s:
                best_k = k2
                best_s = ks2
    mybest_cnt[bi] = nb_cnt
    bestedge[b_new] = best_k
    return queue_sp, unused_sp
