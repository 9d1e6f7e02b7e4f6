#!/usr/bin/env python3
"""
cimbench - Compiled inner loops

All kernels work on the compressed-row adjacency (indptr, indices, data) of a
Graph and mutate the arrays they are handed. Random numbers are drawn by the
caller from a numpy Generator and passed in, so results depend only on the seed.

Local field convention: field[i] = sum_j w_ij s_j, and flipping vertex i changes
the Ising energy by dE_i = -2 s_i field[i].
"""

import numpy as np
from numba import njit

_EPS = 1e-12


@njit(cache=True, nogil=True)
def local_fields(indptr, indices, data, spins):
    n = len(spins)
    field = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            acc += data[k] * spins[indices[k]]
        field[i] = acc
    return field


@njit(cache=True, nogil=True)
def flip_vertex(indptr, indices, data, spins, field, v):
    """Flip spin v and patch the neighbours' local fields; returns dE"""
    delta = -2.0 * spins[v] * field[v]
    spins[v] = -spins[v]
    twice = 2.0 * spins[v]
    for k in range(indptr[v], indptr[v + 1]):
        field[indices[k]] += twice * data[k]
    return delta


@njit(cache=True, nogil=True)
def refresh_fields(indptr, indices, data, spins, field):
    """Rebuild field in place from the spins; returns the exact Ising energy"""
    energy = 0.0
    for i in range(len(spins)):
        acc = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            acc += data[k] * spins[indices[k]]
        field[i] = acc
        energy += spins[i] * acc
    return 0.5 * energy


@njit(cache=True, nogil=True)
def anneal_chunk(
    indptr,
    indices,
    data,
    spins,
    field,
    best_spins,
    proposals,
    uniforms,
    temperatures,
    energy,
    best_energy,
    offset,
    resync_every,
    stop_energy,
):
    """
    Metropolis pass over pre-drawn proposals. offset is the global index of the
    first proposal; fields and energy are rebuilt whenever the global count hits
    a multiple of resync_every (0 disables). Returns early once best_energy
    <= stop_energy. Returns (energy, best_energy, accepted, proposals used).
    """
    accepted = 0
    for t in range(len(proposals)):
        v = proposals[t]
        delta = -2.0 * spins[v] * field[v]
        if delta <= 0.0 or uniforms[t] < np.exp(-delta / temperatures[t]):
            flip_vertex(indptr, indices, data, spins, field, v)
            energy += delta
            accepted += 1
            if energy < best_energy - _EPS:
                best_energy = energy
                best_spins[:] = spins
        if resync_every > 0 and (offset + t + 1) % resync_every == 0:
            energy = refresh_fields(indptr, indices, data, spins, field)
        if best_energy <= stop_energy:
            return energy, best_energy, accepted, t + 1
    return energy, best_energy, accepted, len(proposals)


@njit(cache=True, nogil=True)
def descend(indptr, indices, data, spins, field, locked, max_flips):
    """
    Steepest descent: flip the unlocked vertex with the most negative dE until
    none decreases the energy or max_flips is reached (max_flips < 0: no cap).
    Returns (total dE, flips).
    """
    n = len(spins)
    total = 0.0
    flips = 0
    while max_flips < 0 or flips < max_flips:
        best_v = -1
        best_delta = -_EPS
        for i in range(n):
            if locked[i]:
                continue
            delta = -2.0 * spins[i] * field[i]
            if delta < best_delta:
                best_delta = delta
                best_v = i
        if best_v < 0:
            break
        total += flip_vertex(indptr, indices, data, spins, field, best_v)
        flips += 1
    return total, flips


@njit(cache=True, nogil=True)
def _heap_above(keys, items, a, b):
    # larger score first, lower vertex index on ties
    return keys[a] > keys[b] or (keys[a] == keys[b] and items[a] < items[b])


@njit(cache=True, nogil=True)
def _heap_swap(keys, items, a, b):
    keys[a], keys[b] = keys[b], keys[a]
    items[a], items[b] = items[b], items[a]


@njit(cache=True, nogil=True)
def _heap_push(keys, items, size, key, item):
    keys[size] = key
    items[size] = item
    pos = size
    while pos > 0:
        parent = (pos - 1) // 2
        if not _heap_above(keys, items, pos, parent):
            break
        _heap_swap(keys, items, pos, parent)
        pos = parent
    return size + 1


@njit(cache=True, nogil=True)
def _heap_pop(keys, items, size):
    """Moves the top entry to slot size - 1 and restores the heap on the rest"""
    size -= 1
    _heap_swap(keys, items, 0, size)
    pos = 0
    while True:
        left = 2 * pos + 1
        if left >= size:
            break
        best = left
        if left + 1 < size and _heap_above(keys, items, left + 1, left):
            best = left + 1
        if not _heap_above(keys, items, best, pos):
            break
        _heap_swap(keys, items, pos, best)
        pos = best
    return size


@njit(cache=True, nogil=True)
def sg3_assign(indptr, indices, data, n, seed_u, seed_v):
    """
    Greedy placement by score |a_i - b_i|, where a_i and b_i are the weights from
    vertex i to the two partial sides. Returns spins (+1 side one, -1 side two).

    Scores live in a max-heap with lazy deletion: placing a vertex pushes a fresh
    entry for each unplaced neighbour, and stale entries are skipped on pop.
    Total work is O(N + m log N).
    """
    spins = np.ones(n, dtype=np.int8)
    assigned = np.zeros(n, dtype=np.bool_)
    to_one = np.zeros(n)
    to_two = np.zeros(n)

    assigned[seed_u] = True
    assigned[seed_v] = True
    spins[seed_v] = -1
    for k in range(indptr[seed_u], indptr[seed_u + 1]):
        to_one[indices[k]] += data[k]
    for k in range(indptr[seed_v], indptr[seed_v + 1]):
        to_two[indices[k]] += data[k]

    capacity = n + len(indices)
    keys = np.empty(capacity)
    items = np.empty(capacity, dtype=np.int64)
    size = 0
    for i in range(n):
        if not assigned[i]:
            size = _heap_push(keys, items, size, abs(to_one[i] - to_two[i]), i)

    while size > 0:
        size = _heap_pop(keys, items, size)
        pick = items[size]
        if assigned[pick] or keys[size] != abs(to_one[pick] - to_two[pick]):
            continue
        assigned[pick] = True
        # joining side one cuts the edges into side two
        if to_two[pick] >= to_one[pick]:
            spins[pick] = 1
            for k in range(indptr[pick], indptr[pick + 1]):
                to_one[indices[k]] += data[k]
        else:
            spins[pick] = -1
            for k in range(indptr[pick], indptr[pick + 1]):
                to_two[indices[k]] += data[k]
        for k in range(indptr[pick], indptr[pick + 1]):
            u = indices[k]
            if not assigned[u]:
                size = _heap_push(keys, items, size, abs(to_one[u] - to_two[u]), u)
    return spins


@njit(cache=True, nogil=True)
def bm_sweep(indptr, indices, data, vectors):
    """One Gauss-Seidel pass of v_i <- -u/|u|, u = sum_j w_ij v_j; returns updates made"""
    n, k = vectors.shape
    u = np.empty(k)
    updates = 0
    for i in range(n):
        u[:] = 0.0
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            w = data[p]
            for d in range(k):
                u[d] += w * vectors[j, d]
        norm = np.sqrt(np.sum(u * u))
        if norm < _EPS:
            continue
        for d in range(k):
            vectors[i, d] = -u[d] / norm
        updates += 1
    return updates


@njit(cache=True, nogil=True)
def metropolis_trajectory(
    indptr, indices, data, spins, field, proposals, uniforms, temperature, thin
):
    """Fixed-temperature chain; stores the spins after every `thin` proposals"""
    n_samples = len(proposals) // thin
    out = np.empty((n_samples, len(spins)), dtype=np.int8)
    for k in range(n_samples):
        for t in range(k * thin, (k + 1) * thin):
            v = proposals[t]
            delta = -2.0 * spins[v] * field[v]
            if delta <= 0.0 or uniforms[t] < np.exp(-delta / temperature):
                flip_vertex(indptr, indices, data, spins, field, v)
        out[k, :] = spins
    return out
