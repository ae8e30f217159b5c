# cython: language_level=3
"""Compiled kernel for reduced cyclic words.

Mirror of ``_wordpure``; letters are nonnegative ints, inverse of ``x`` is
``x ^ 1``.  Keep the two modules in sync.
"""


def reduce_word(word):
    cdef list out = []
    cdef Py_ssize_t n = 0
    cdef long x
    for x in word:
        if n > 0 and <long> out[n - 1] == (x ^ 1):
            out.pop()
            n -= 1
        else:
            out.append(x)
            n += 1
    return out


def cyclic_reduce(word):
    cdef list out = reduce_word(word)
    cdef Py_ssize_t lo = 0, hi = len(out)
    while hi - lo >= 2 and <long> out[lo] == (<long> out[hi - 1]) ^ 1:
        lo += 1
        hi -= 1
    return out[lo:hi]


def least_rotation(word):
    cdef Py_ssize_t n = len(word)
    if n <= 1:
        return 0
    cdef list s = list(word) + list(word)
    cdef list f = [-1] * (2 * n)
    cdef Py_ssize_t k = 0, j, i
    cdef long sj
    for j in range(1, 2 * n):
        sj = <long> s[j]
        i = <Py_ssize_t> f[j - k - 1]
        while i != -1 and sj != <long> s[k + i + 1]:
            if sj < <long> s[k + i + 1]:
                k = j - i - 1
            i = <Py_ssize_t> f[i]
        if sj != <long> s[k + i + 1]:
            if sj < <long> s[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k


def canonical(word):
    cdef list w = cyclic_reduce(word)
    cdef Py_ssize_t r = least_rotation(w)
    return tuple(w[r:] + w[:r])
