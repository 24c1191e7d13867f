"""Compiled inner loops for QUBO energies, enumeration and annealing.

States are packed into uint64 codes with variable 0 in the most significant
of the M used bits, so ascending code order is lexicographic state order.

Every exact energy in the package is produced by one left fold: variables
are visited from 0 up to M-1 and, for a set variable j, ``v[j]`` is added
followed by ``w[k, j] * q[k]`` for each lower neighbour k < j in ascending k.
Adding ``+-0.0`` for clear neighbours leaves the running sum unchanged, so
the fold equals the textbook sum over set bits while staying branch-free.
The enumerator reuses partial folds, which is only valid for this order.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def energy_bits(q, v, indptr, indices, data):
    e = 0.0
    for j in range(v.shape[0]):
        if q[j]:
            e += v[j]
            for p in range(indptr[j], indptr[j + 1]):
                e += data[p] * q[indices[p]]
    return e


@njit(cache=True)
def energy_codes(codes, m, v, indptr, indices, data):
    out = np.empty(codes.shape[0])
    q = np.zeros(m, dtype=np.uint8)
    for r in range(codes.shape[0]):
        c = codes[r]
        for j in range(m):
            q[j] = (c >> np.uint64(m - 1 - j)) & np.uint64(1)
        out[r] = energy_bits(q, v, indptr, indices, data)
    return out


@njit(cache=True)
def _refold(j_low, q, partial, v, indptr, indices, data):
    # partial[j + 1] is the fold over variables 0..j; partial[0] holds 0.0
    m = v.shape[0]
    for j in range(j_low, m):
        e = partial[j]
        if q[j]:
            e += v[j]
            for p in range(indptr[j], indptr[j + 1]):
                e += data[p] * q[indices[p]]
        partial[j + 1] = e


@njit(cache=True)
def enumerate_energies(m, v, indptr, indices, data, out):
    """Fill ``out[code]`` with the exact energy of every state, in code order."""
    q = np.zeros(m, dtype=np.uint8)
    partial = np.zeros(m + 1)
    _refold(0, q, partial, v, indptr, indices, data)
    out[0] = partial[m]
    total = np.int64(1) << np.int64(m)
    for code in range(1, total):
        # binary increment, variable m-1 is the least significant digit
        t = m - 1
        while q[t] == 1:
            q[t] = 0
            t -= 1
        q[t] = 1
        _refold(t, q, partial, v, indptr, indices, data)
        out[code] = partial[m]


@njit(cache=True)
def enumerate_minimum(m, v, indptr, indices, data):
    """Exact minimum energy and its smallest code, without storing all states."""
    q = np.zeros(m, dtype=np.uint8)
    partial = np.zeros(m + 1)
    _refold(0, q, partial, v, indptr, indices, data)
    best = partial[m]
    best_code = 0
    total = np.int64(1) << np.int64(m)
    for code in range(1, total):
        t = m - 1
        while q[t] == 1:
            q[t] = 0
            t -= 1
        q[t] = 1
        _refold(t, q, partial, v, indptr, indices, data)
        # strict comparison keeps the smallest code among ties
        if partial[m] < best:
            best = partial[m]
            best_code = code
    return best, best_code


@njit(cache=True)
def gray_code_minimum(m, v, adj_indptr, adj_indices, adj_data):
    """Walk all states in reflected Gray-code order with O(degree) updates.

    Returns the code of the lowest state seen by the incremental energies.
    Rounding drift makes the running energy approximate; callers re-evaluate
    the returned state exactly.
    """
    q = np.zeros(m, dtype=np.uint8)
    field = v.copy()
    e = 0.0
    code = np.uint64(0)
    best = 0.0
    best_code = code
    total = np.int64(1) << np.int64(m)
    for g in range(1, total):
        # bit to flip is the number of trailing zeros of g
        j = 0
        x = g
        while (x & 1) == 0:
            x >>= 1
            j += 1
        if q[j]:
            e -= field[j]
            delta = -1.0
            q[j] = 0
        else:
            e += field[j]
            delta = 1.0
            q[j] = 1
        code ^= np.uint64(1) << np.uint64(m - 1 - j)
        for p in range(adj_indptr[j], adj_indptr[j + 1]):
            field[adj_indices[p]] += delta * adj_data[p]
        if e < best:
            best = e
            best_code = code
    return best_code


@njit(cache=True)
def anneal_batch(states, uniforms, betas, v, adj_indptr, adj_indices, adj_data):
    """Single-flip Metropolis sweeps on each row of ``states`` in place.

    ``uniforms[r, s, j]`` is the acceptance draw for variable j in sweep s of
    read r; ``betas[s]`` is the inverse temperature of sweep s.
    """
    n_reads, m = states.shape
    n_sweeps = betas.shape[0]
    field = np.empty(m)
    for r in range(n_reads):
        q = states[r]
        for j in range(m):
            field[j] = v[j]
        for j in range(m):
            if q[j]:
                for p in range(adj_indptr[j], adj_indptr[j + 1]):
                    field[adj_indices[p]] += adj_data[p]
        for s in range(n_sweeps):
            beta = betas[s]
            for j in range(m):
                delta_e = field[j] if q[j] == 0 else -field[j]
                x = beta * delta_e
                # exp(-40) is below every nonzero draw that matters
                if x <= 0.0 or (x < 40.0 and uniforms[r, s, j] < np.exp(-x)):
                    if q[j]:
                        q[j] = 0
                        sign = -1.0
                    else:
                        q[j] = 1
                        sign = 1.0
                    for p in range(adj_indptr[j], adj_indptr[j + 1]):
                        field[adj_indices[p]] += sign * adj_data[p]


@njit(cache=True)
def pack_codes(states):
    n, m = states.shape
    out = np.zeros(n, dtype=np.uint64)
    for r in range(n):
        c = np.uint64(0)
        for j in range(m):
            c = (c << np.uint64(1)) | np.uint64(states[r, j])
        out[r] = c
    return out


@njit(cache=True)
def energy_sort_keys(energies, m):
    """uint64 keys ordered like ``energies`` in the high bits, code in the low m bits.

    Keys compare like (energy, code) except that energies agreeing in their
    top 64 - m key bits collide; ``resolve_key_groups`` repairs those runs.
    """
    n = energies.shape[0]
    bits = energies.view(np.uint64)
    sign = np.uint64(1) << np.uint64(63)
    low = (np.uint64(1) << np.uint64(m)) - np.uint64(1)
    keys = np.empty(n, dtype=np.uint64)
    for code in range(n):
        b = bits[code]
        k = ~b if b & sign else b | sign
        keys[code] = (k & ~low) | np.uint64(code)
    return keys


@njit(cache=True)
def resolve_key_groups(keys, energies, m):
    """Turn sorted keys into codes sorted by (energy, code); returns sorted energies."""
    n = keys.shape[0]
    low = (np.uint64(1) << np.uint64(m)) - np.uint64(1)
    high = ~low
    out = np.empty(n)
    start = 0
    prev_high = np.uint64(0)
    for p in range(n):
        key = keys[p]
        code = key & low
        e = energies[code]
        if p == 0 or (key & high) != prev_high:
            start = p
            prev_high = key & high
        # insertion into the current run; runs are short and already code-ordered
        i = p
        while i > start and out[i - 1] > e:
            out[i] = out[i - 1]
            keys[i] = keys[i - 1]
            i -= 1
        out[i] = e
        keys[i] = code
    return out


@njit(cache=True)
def block_value_sums(codes, weights, m, n, count):
    """Per-block sums of ``weights[r] * int(block c of codes[r])`` in exact integers."""
    out = np.zeros(count, dtype=np.int64)
    mask = (np.uint64(1) << np.uint64(n)) - np.uint64(1)
    for r in range(codes.shape[0]):
        c = codes[r]
        w = weights[r]
        for b in range(count):
            shift = np.uint64(m - (b + 1) * n)
            out[b] += w * np.int64((c >> shift) & mask)
    return out


@njit(cache=True)
def block_histogram(codes, weights, m, n, block):
    """Occurrence-weighted counts of each integer value of one block."""
    out = np.zeros(1 << n, dtype=np.int64)
    mask = (np.uint64(1) << np.uint64(n)) - np.uint64(1)
    shift = np.uint64(m - (block + 1) * n)
    for r in range(codes.shape[0]):
        out[np.int64((codes[r] >> shift) & mask)] += weights[r]
    return out
