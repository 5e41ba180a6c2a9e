# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled pattern-table kernel.

Mirrors ``_pykernel.run`` exactly (same inputs, loop order, representatives
and counters). The pattern tables live in ``_engine.hpp``; this module only
converts arguments and drives the per-user steps so that Ctrl-C, progress
hooks and budgets are handled between users.
"""

from libc.stdint cimport uint8_t, uint16_t, uint32_t, uint64_t
from libcpp.string cimport string
from libcpp.vector cimport vector
from cpython.exc cimport PyErr_CheckSignals

from .errors import ResourceLimit

cdef extern from "_engine.hpp" namespace "wsp":
    cdef struct Row:
        int code
        uint64_t scope, a, b, c, d

    cdef cppclass Engine[U]:
        Engine(int, int, vector[Row], vector[int], vector[int], vector[int]) except +
        void step(int, uint64_t) except + nogil
        bint has(uint64_t)
        bint has_full()
        size_t cell_count()
        uint64_t stored()
        uint64_t peak()
        uint64_t generated()
        vector[uint64_t] masks_sorted() except +
        vector[int] record(uint64_t, uint32_t) except +
        uint32_t count(uint64_t) except +
        string record_key(uint64_t, uint32_t) except +

MAX_USERS = 65534


cdef class _Table:
    # One of the two engines is set: 8-bit user slots when they fit, else 16-bit.
    cdef Engine[uint8_t]* e8
    cdef Engine[uint16_t]* e16

    def __dealloc__(self):
        del self.e8
        del self.e16

    cdef void step(self, int user, uint64_t auth) except *:
        if self.e8 != NULL:
            with nogil:
                self.e8.step(user, auth)
        else:
            with nogil:
                self.e16.step(user, auth)

    cdef bint has_full(self):
        return self.e8.has_full() if self.e8 != NULL else self.e16.has_full()

    cdef tuple stats(self):
        if self.e8 != NULL:
            return self.e8.cell_count(), self.e8.stored(), self.e8.peak(), self.e8.generated()
        return self.e16.cell_count(), self.e16.stored(), self.e16.peak(), self.e16.generated()

    cdef tuple first_full(self, uint64_t full):
        if self.e8 != NULL:
            return tuple(self.e8.record(full, 0))
        return tuple(self.e16.record(full, 0))

    cdef dict export(self):
        cdef vector[uint64_t] masks
        cdef uint64_t m
        cdef uint32_t r, cnt
        out = {}
        masks = self.e8.masks_sorted() if self.e8 != NULL else self.e16.masks_sorted()
        for m in masks:
            entries = []
            if self.e8 != NULL:
                cnt = self.e8.count(m)
                for r in range(cnt):
                    entries.append((self.e8.record_key(m, r), tuple(self.e8.record(m, r))))
            else:
                cnt = self.e16.count(m)
                for r in range(cnt):
                    entries.append((self.e16.record_key(m, r), tuple(self.e16.record(m, r))))
            entries.sort(key=lambda e: e[0])
            out[m] = [a for _, a in entries]
        return out


def run(
    int k, order_users, order_auth, cons, class_of, class_size, comps, bint early_exit,
    observer=None, pattern_budget=0, progress=None,
):
    """See ``_pykernel.run``; results are identical."""
    if k > 64:
        raise ValueError("the compiled kernel supports at most 64 tasks")
    cdef int n = len(order_users)
    if n > MAX_USERS:
        raise ValueError(f"the compiled kernel supports at most {MAX_USERS} users")
    cdef uint64_t full = 0xFFFFFFFFFFFFFFFF if k == 64 else (<uint64_t>1 << k) - 1
    cdef vector[Row] rows
    cdef Row row
    for code, scope, a, b, c, d in cons:
        row.code, row.scope, row.a, row.b, row.c, row.d = code, scope, a, b, c, d
        rows.push_back(row)
    cdef vector[int] v_class = list(class_of)
    cdef vector[int] v_size = list(class_size)
    cdef vector[int] v_comps = list(comps)

    cdef _Table tab = _Table()
    if n <= 254:
        tab.e8 = new Engine[uint8_t](k, n, rows, v_class, v_size, v_comps)
    else:
        tab.e16 = new Engine[uint16_t](k, n, rows, v_class, v_size, v_comps)

    visited = 1
    if observer is not None:
        observer(0, tab.export())
    if early_exit and tab.has_full():
        cells, stored, peak, generated = tab.stats()
        return tab.first_full(full), 0, peak, visited, generated

    cdef int i
    for i in range(n):
        tab.step(order_users[i], order_auth[i])
        PyErr_CheckSignals()
        cells, stored, peak, generated = tab.stats()
        visited += cells
        if observer is not None:
            observer(i + 1, tab.export())
        if progress is not None:
            progress(i + 1, cells, stored, peak)
        if pattern_budget and stored > pattern_budget:
            raise ResourceLimit(f"pattern budget {pattern_budget} exceeded at user {i + 1}")
        if early_exit and tab.has_full():
            return tab.first_full(full), i + 1, peak, visited, generated

    cells, stored, peak, generated = tab.stats()
    if tab.has_full():
        return tab.first_full(full), n, peak, visited, generated
    return None, n, peak, visited, generated
