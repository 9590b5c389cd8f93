# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled permutation kernels on at most 256 points (same API as _perm_py)."""

from cpython.bytes cimport PyBytes_AS_STRING, PyBytes_FromStringAndSize
from libc.string cimport memcmp, memcpy


cdef inline bint _is_identity(const unsigned char* p, Py_ssize_t n) noexcept:
    cdef Py_ssize_t i
    for i in range(n):
        if p[i] != i:
            return False
    return True


def identity(Py_ssize_t n=256):
    return bytes(range(n))


def compose(bytes a, bytes b):
    cdef Py_ssize_t n = len(a), i
    cdef const unsigned char* pa = a
    cdef const unsigned char* pb = b
    out = PyBytes_FromStringAndSize(NULL, n)
    cdef unsigned char* po = <unsigned char*> PyBytes_AS_STRING(out)
    for i in range(n):
        po[i] = pb[pa[i]]
    return out


def invert(bytes a):
    cdef Py_ssize_t n = len(a), i
    cdef const unsigned char* pa = a
    out = PyBytes_FromStringAndSize(NULL, n)
    cdef unsigned char* po = <unsigned char*> PyBytes_AS_STRING(out)
    for i in range(n):
        po[pa[i]] = <unsigned char> i
    return out


cdef Py_ssize_t _sift(unsigned char* g, unsigned char* tmp, Py_ssize_t n,
                      list base, list inv_reps, Py_ssize_t start) except -1:
    # strips g in place; returns the level reached
    cdef Py_ssize_t i, x, nb = len(base)
    cdef const unsigned char* pu
    cdef object u
    for i in range(start, nb):
        u = (<list> inv_reps[i])[g[<Py_ssize_t> base[i]]]
        if u is None:
            return i
        pu = <bytes> u
        for x in range(n):
            tmp[x] = pu[g[x]]
        memcpy(g, tmp, n)
    return nb


def sift(bytes g, list base, list inv_reps, Py_ssize_t start=0):
    cdef Py_ssize_t n = len(g)
    cdef unsigned char buf[256]
    cdef unsigned char tmp[256]
    memcpy(buf, <const unsigned char*> g, n)
    level = _sift(buf, tmp, n, base, inv_reps, start)
    return PyBytes_FromStringAndSize(<char*> buf, n), level


def first_nonsifting(Py_ssize_t level, list base, list orbit, list gens, list reps, list inv_reps):
    if not gens:
        return None
    cdef Py_ssize_t n = len(<bytes> gens[0]), x, k, depth
    cdef Py_ssize_t b = base[level]
    cdef unsigned char us[256]
    cdef unsigned char h[256]
    cdef unsigned char tmp[256]
    cdef const unsigned char* pu
    cdef const unsigned char* ps
    cdef const unsigned char* pv
    cdef list rep_l = reps[level]
    cdef list inv_l = inv_reps[level]
    for beta in orbit:
        pu = <bytes> rep_l[beta]
        for k in range(len(gens)):
            ps = <bytes> gens[k]
            for x in range(n):
                us[x] = ps[pu[x]]
            pv = <bytes> inv_l[us[b]]
            for x in range(n):
                h[x] = pv[us[x]]
            if _is_identity(h, n):
                continue
            depth = _sift(h, tmp, n, base, inv_reps, level + 1)
            if not _is_identity(h, n):
                return beta, k, PyBytes_FromStringAndSize(<char*> h, n), depth
    return None
