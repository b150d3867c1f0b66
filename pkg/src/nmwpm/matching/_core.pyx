# cython: language_level=3
"""Compiled twin of ``_pure.solve``: same blossom algorithm, typed state.

The flat integer arrays of the pure version map directly onto C arrays
here; only the variable-length blossom child/endpoint lists stay as Python
lists (they are touched far less often than the scan/delta loops).
"""

import numpy as np

cimport numpy as cnp
cimport cython

cnp.import_array()


@cython.final
cdef class _Solver:
    cdef int n, nedge
    cdef int[::1] eu, ev
    cdef double[::1] ew
    cdef int[::1] endpoint
    cdef int[::1] nb_flat, nb_start
    cdef int[::1] mate, label, labelend, inblossom
    cdef int[::1] blossomparent, blossombase, bestedge
    cdef double[::1] dualvar
    cdef unsigned char[::1] allowedge
    cdef list blossomchilds, blossomendps, blossombestedges
    cdef list unusedblossoms, queue

    def __init__(self, int n, eu, ev, ew):
        cdef int k, i, j
        self.n = n
        self.nedge = len(ew)
        self.eu = np.ascontiguousarray(eu, dtype=np.int32)
        self.ev = np.ascontiguousarray(ev, dtype=np.int32)
        self.ew = np.ascontiguousarray(ew, dtype=np.float64)

        self.endpoint = np.empty(2 * self.nedge, dtype=np.int32)
        for k in range(self.nedge):
            self.endpoint[2 * k] = self.eu[k]
            self.endpoint[2 * k + 1] = self.ev[k]

        # CSR adjacency of remote endpoints.
        counts = np.zeros(n + 1, dtype=np.int32)
        for k in range(self.nedge):
            counts[self.eu[k] + 1] += 1
            counts[self.ev[k] + 1] += 1
        self.nb_start = np.cumsum(counts, dtype=np.int32)
        self.nb_flat = np.empty(2 * self.nedge, dtype=np.int32)
        fill = np.asarray(self.nb_start).copy()
        for k in range(self.nedge):
            i = self.eu[k]
            j = self.ev[k]
            self.nb_flat[fill[i]] = 2 * k + 1
            fill[i] += 1
            self.nb_flat[fill[j]] = 2 * k
            fill[j] += 1

        self.mate = np.full(n, -1, dtype=np.int32)
        self.label = np.zeros(2 * n, dtype=np.int32)
        self.labelend = np.full(2 * n, -1, dtype=np.int32)
        self.inblossom = np.arange(n, dtype=np.int32)
        self.blossomparent = np.full(2 * n, -1, dtype=np.int32)
        self.blossombase = np.concatenate([
            np.arange(n, dtype=np.int32), np.full(n, -1, dtype=np.int32)])
        self.bestedge = np.full(2 * n, -1, dtype=np.int32)
        cdef double maxweight = 0.0
        for k in range(self.nedge):
            if self.ew[k] > maxweight:
                maxweight = self.ew[k]
        self.dualvar = np.concatenate([
            np.full(n, maxweight, dtype=np.float64), np.zeros(n)])
        self.allowedge = np.zeros(self.nedge, dtype=np.uint8)
        self.blossomchilds = [None] * (2 * n)
        self.blossomendps = [None] * (2 * n)
        self.blossombestedges = [None] * (2 * n)
        self.unusedblossoms = list(range(n, 2 * n))
        self.queue = []

    cdef inline double slack(self, int k):
        return self.dualvar[self.eu[k]] + self.dualvar[self.ev[k]] \
            - 2.0 * self.ew[k]

    cdef list blossom_leaves(self, int b):
        cdef list out = []
        cdef list stack
        cdef int t
        if b < self.n:
            out.append(b)
            return out
        stack = list(self.blossomchilds[b])
        while stack:
            t = stack.pop()
            if t < self.n:
                out.append(t)
            else:
                stack.extend(self.blossomchilds[t])
        return out

    cdef void assign_label(self, int w, int t, int p):
        cdef int b = self.inblossom[w]
        cdef int base
        self.label[w] = t
        self.label[b] = t
        self.labelend[w] = p
        self.labelend[b] = p
        self.bestedge[w] = -1
        self.bestedge[b] = -1
        if t == 1:
            self.queue.extend(self.blossom_leaves(b))
        else:
            base = self.blossombase[b]
            self.assign_label(self.endpoint[self.mate[base]], 1,
                              self.mate[base] ^ 1)

    cdef int scan_blossom(self, int v, int w):
        cdef list path = []
        cdef int base = -1
        cdef int b
        while v != -1 or w != -1:
            b = self.inblossom[v]
            if self.label[b] & 4:
                base = self.blossombase[b]
                break
            path.append(b)
            self.label[b] = 5
            if self.labelend[b] == -1:
                v = -1
            else:
                v = self.endpoint[self.labelend[b]]
                b = self.inblossom[v]
                v = self.endpoint[self.labelend[b]]
            if w != -1:
                v, w = w, v
        for b in path:
            self.label[b] = 1
        return base

    cdef void add_blossom(self, int base, int k):
        cdef int v = self.eu[k]
        cdef int w = self.ev[k]
        cdef int bb = self.inblossom[base]
        cdef int bv = self.inblossom[v]
        cdef int bw = self.inblossom[w]
        cdef int b = self.unusedblossoms.pop()
        cdef int i, j, bj, leaf, kk, p
        cdef list path = []
        cdef list endps = []
        cdef list nblists, nblist
        self.blossombase[b] = base
        self.blossomparent[b] = -1
        self.blossomparent[bb] = b
        self.blossomchilds[b] = path
        self.blossomendps[b] = endps
        while bv != bb:
            self.blossomparent[bv] = b
            path.append(bv)
            endps.append(self.labelend[bv])
            v = self.endpoint[self.labelend[bv]]
            bv = self.inblossom[v]
        path.append(bb)
        path.reverse()
        endps.reverse()
        endps.append(2 * k)
        while bw != bb:
            self.blossomparent[bw] = b
            path.append(bw)
            endps.append(self.labelend[bw] ^ 1)
            w = self.endpoint[self.labelend[bw]]
            bw = self.inblossom[w]
        self.label[b] = 1
        self.labelend[b] = self.labelend[bb]
        self.dualvar[b] = 0.0
        for leaf in self.blossom_leaves(b):
            if self.label[self.inblossom[leaf]] == 2:
                self.queue.append(leaf)
            self.inblossom[leaf] = b
        # Merge delta3 candidate edges from the children.
        bestedgeto_arr = np.full(2 * self.n, -1, dtype=np.int32)
        cdef int[::1] bestedgeto = bestedgeto_arr
        for bv in path:
            if self.blossombestedges[bv] is None:
                nblists = []
                for leaf in self.blossom_leaves(bv):
                    nblist = []
                    for i in range(self.nb_start[leaf],
                                   self.nb_start[leaf + 1]):
                        nblist.append(self.nb_flat[i] // 2)
                    nblists.append(nblist)
            else:
                nblists = [self.blossombestedges[bv]]
            for nblist in nblists:
                for kk in nblist:
                    i = self.eu[kk]
                    j = self.ev[kk]
                    if self.inblossom[j] == b:
                        i, j = j, i
                    bj = self.inblossom[j]
                    if (bj != b and self.label[bj] == 1 and
                            (bestedgeto[bj] == -1 or
                             self.slack(kk) < self.slack(bestedgeto[bj]))):
                        bestedgeto[bj] = kk
            self.blossombestedges[bv] = None
            self.bestedge[bv] = -1
        self.blossombestedges[b] = [kk for kk in bestedgeto_arr if kk != -1]
        self.bestedge[b] = -1
        for kk in self.blossombestedges[b]:
            if (self.bestedge[b] == -1 or
                    self.slack(kk) < self.slack(self.bestedge[b])):
                self.bestedge[b] = kk

    # The cycle walks below index Python lists with negative j on purpose
    # (wrapping from the entry child back to the base), so wraparound must
    # stay on in these two methods.
    @cython.wraparound(True)
    @cython.boundscheck(True)
    cdef void expand_blossom(self, int b, bint endstage):
        cdef int s, v, j, jstep, endptrick, p, bv, entrychild
        cdef list childs = self.blossomchilds[b]
        cdef list endps = self.blossomendps[b]
        for s in childs:
            self.blossomparent[s] = -1
            if s < self.n:
                self.inblossom[s] = s
            elif endstage and self.dualvar[s] == 0.0:
                self.expand_blossom(s, endstage)
            else:
                for v in self.blossom_leaves(s):
                    self.inblossom[v] = s
        if (not endstage) and self.label[b] == 2:
            entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]]
            j = childs.index(entrychild)
            if j & 1:
                j -= len(childs)
                jstep = 1
                endptrick = 0
            else:
                jstep = -1
                endptrick = 1
            p = self.labelend[b]
            while j != 0:
                self.label[self.endpoint[p ^ 1]] = 0
                self.label[self.endpoint[
                    (<int>endps[j - endptrick]) ^ endptrick ^ 1]] = 0
                self.assign_label(self.endpoint[p ^ 1], 2, p)
                self.allowedge[(<int>endps[j - endptrick]) // 2] = 1
                j += jstep
                p = (<int>endps[j - endptrick]) ^ endptrick
                self.allowedge[p // 2] = 1
                j += jstep
            bv = childs[j]
            self.label[self.endpoint[p ^ 1]] = 2
            self.label[bv] = 2
            self.labelend[self.endpoint[p ^ 1]] = p
            self.labelend[bv] = p
            self.bestedge[bv] = -1
            j += jstep
            while (<int>childs[j]) != entrychild:
                bv = childs[j]
                if self.label[bv] == 1:
                    j += jstep
                    continue
                v = -1
                for v in self.blossom_leaves(bv):
                    if self.label[v] != 0:
                        break
                if v >= 0 and self.label[v] != 0:
                    self.label[v] = 0
                    self.label[self.endpoint[
                        self.mate[self.blossombase[bv]]]] = 0
                    self.assign_label(v, 2, self.labelend[v])
                j += jstep
        self.label[b] = -1
        self.labelend[b] = -1
        self.blossomchilds[b] = None
        self.blossomendps[b] = None
        self.blossombase[b] = -1
        self.blossombestedges[b] = None
        self.bestedge[b] = -1
        self.unusedblossoms.append(b)

    @cython.wraparound(True)
    @cython.boundscheck(True)
    cdef void augment_blossom(self, int b, int v):
        cdef int t = v
        cdef int i, j, jstep, endptrick, p
        cdef list childs, endps
        while self.blossomparent[t] != b:
            t = self.blossomparent[t]
        if t >= self.n:
            self.augment_blossom(t, v)
        childs = self.blossomchilds[b]
        endps = self.blossomendps[b]
        i = j = childs.index(t)
        if i & 1:
            j -= len(childs)
            jstep = 1
            endptrick = 0
        else:
            jstep = -1
            endptrick = 1
        while j != 0:
            j += jstep
            t = childs[j]
            p = (<int>endps[j - endptrick]) ^ endptrick
            if t >= self.n:
                self.augment_blossom(t, self.endpoint[p])
            j += jstep
            t = childs[j]
            if t >= self.n:
                self.augment_blossom(t, self.endpoint[p ^ 1])
            self.mate[self.endpoint[p]] = p ^ 1
            self.mate[self.endpoint[p ^ 1]] = p
        self.blossomchilds[b] = childs[i:] + childs[:i]
        self.blossomendps[b] = endps[i:] + endps[:i]
        self.blossombase[b] = self.blossombase[<int>self.blossomchilds[b][0]]

    cdef void augment_matching(self, int k):
        cdef int v, w, s, p, t, bs, bt, j, side
        for side in range(2):
            if side == 0:
                s = self.eu[k]
                p = 2 * k + 1
            else:
                s = self.ev[k]
                p = 2 * k
            while True:
                bs = self.inblossom[s]
                if bs >= self.n:
                    self.augment_blossom(bs, s)
                self.mate[s] = p
                if self.labelend[bs] == -1:
                    break
                t = self.endpoint[self.labelend[bs]]
                bt = self.inblossom[t]
                s = self.endpoint[self.labelend[bt]]
                j = self.endpoint[self.labelend[bt] ^ 1]
                if bt >= self.n:
                    self.augment_blossom(bt, j)
                self.mate[j] = self.labelend[bt]
                p = self.labelend[bt] ^ 1

    def run(self, bint maxcardinality):
        cdef int n = self.n
        cdef int stage, v, w, b, i, j, k, p, base, pi
        cdef int deltatype, deltaedge, deltablossom, lbl
        cdef double delta, d, kslack
        cdef bint augmented
        kslack = 0.0
        for stage in range(n):
            self.label[:] = 0
            self.bestedge[:] = -1
            for b in range(n, 2 * n):
                self.blossombestedges[b] = None
            self.allowedge[:] = 0
            del self.queue[:]

            for v in range(n):
                if self.mate[v] == -1 and self.label[self.inblossom[v]] == 0:
                    self.assign_label(v, 1, -1)

            augmented = False
            while True:
                while self.queue and not augmented:
                    v = self.queue.pop()
                    for pi in range(self.nb_start[v], self.nb_start[v + 1]):
                        p = self.nb_flat[pi]
                        k = p // 2
                        w = self.endpoint[p]
                        if self.inblossom[v] == self.inblossom[w]:
                            continue
                        if not self.allowedge[k]:
                            kslack = self.slack(k)
                            if kslack <= 0.0:
                                self.allowedge[k] = 1
                        if self.allowedge[k]:
                            if self.label[self.inblossom[w]] == 0:
                                self.assign_label(w, 2, p ^ 1)
                            elif self.label[self.inblossom[w]] == 1:
                                base = self.scan_blossom(v, w)
                                if base >= 0:
                                    self.add_blossom(base, k)
                                else:
                                    self.augment_matching(k)
                                    augmented = True
                                    break
                            elif self.label[w] == 0:
                                self.label[w] = 2
                                self.labelend[w] = p ^ 1
                        elif self.label[self.inblossom[w]] == 1:
                            b = self.inblossom[v]
                            if (self.bestedge[b] == -1 or
                                    kslack < self.slack(self.bestedge[b])):
                                self.bestedge[b] = k
                        elif self.label[w] == 0:
                            if (self.bestedge[w] == -1 or
                                    kslack < self.slack(self.bestedge[w])):
                                self.bestedge[w] = k

                if augmented:
                    break

                deltatype = -1
                delta = 0.0
                deltaedge = -1
                deltablossom = -1
                if not maxcardinality:
                    deltatype = 1
                    delta = self.dualvar[0]
                    for v in range(1, n):
                        if self.dualvar[v] < delta:
                            delta = self.dualvar[v]
                for v in range(n):
                    if (self.label[self.inblossom[v]] == 0 and
                            self.bestedge[v] != -1):
                        d = self.slack(self.bestedge[v])
                        if deltatype == -1 or d < delta:
                            delta = d
                            deltatype = 2
                            deltaedge = self.bestedge[v]
                for b in range(2 * n):
                    if (self.blossomparent[b] == -1 and self.label[b] == 1
                            and self.bestedge[b] != -1):
                        d = self.slack(self.bestedge[b]) / 2.0
                        if deltatype == -1 or d < delta:
                            delta = d
                            deltatype = 3
                            deltaedge = self.bestedge[b]
                for b in range(n, 2 * n):
                    if (self.blossombase[b] >= 0 and
                            self.blossomparent[b] == -1 and
                            self.label[b] == 2 and
                            (deltatype == -1 or self.dualvar[b] < delta)):
                        delta = self.dualvar[b]
                        deltatype = 4
                        deltablossom = b
                if deltatype == -1:
                    deltatype = 1
                    delta = self.dualvar[0]
                    for v in range(1, n):
                        if self.dualvar[v] < delta:
                            delta = self.dualvar[v]
                    if delta < 0.0:
                        delta = 0.0

                for v in range(n):
                    lbl = self.label[self.inblossom[v]]
                    if lbl == 1:
                        self.dualvar[v] -= delta
                    elif lbl == 2:
                        self.dualvar[v] += delta
                for b in range(n, 2 * n):
                    if (self.blossombase[b] >= 0 and
                            self.blossomparent[b] == -1):
                        if self.label[b] == 1:
                            self.dualvar[b] += delta
                        elif self.label[b] == 2:
                            self.dualvar[b] -= delta

                if deltatype == 1:
                    break
                elif deltatype == 2:
                    self.allowedge[deltaedge] = 1
                    i = self.eu[deltaedge]
                    if self.label[self.inblossom[i]] == 0:
                        i = self.ev[deltaedge]
                    self.queue.append(i)
                elif deltatype == 3:
                    self.allowedge[deltaedge] = 1
                    self.queue.append(self.eu[deltaedge])
                else:
                    self.expand_blossom(deltablossom, False)

            if not augmented:
                break

            for b in range(n, 2 * n):
                if (self.blossomparent[b] == -1 and
                        self.blossombase[b] >= 0 and
                        self.label[b] == 1 and self.dualvar[b] == 0.0):
                    self.expand_blossom(b, True)

        out = [-1] * n
        for v in range(n):
            if self.mate[v] >= 0:
                out[v] = self.endpoint[self.mate[v]]
        return out


def solve(n, edge_u, edge_v, edge_w, maxcardinality=True):
    """Typed twin of ``nmwpm.matching._pure.solve``."""
    if n == 0 or len(edge_w) == 0:
        return [-1] * n
    for i, j in zip(edge_u, edge_v):
        if i == j or i < 0 or j < 0 or i >= n or j >= n:
            raise ValueError(f"bad edge ({i}, {j}) for {n} vertices")
    solver = _Solver(n, edge_u, edge_v, edge_w)
    mate = solver.run(maxcardinality)
    for v in range(n):
        assert mate[v] == -1 or mate[mate[v]] == v
    return mate
