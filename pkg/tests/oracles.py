"""Independent test oracles, deliberately coded apart from the library.

Plain-python exhaustive searches and direct formula evaluations used to
cross-check the vectorized selection and precoding paths.
"""

import numpy as np


def oracle_rule1(combos, channels, noise_variance):
    """Exhaustive argmax of the non-precoded SINR sum; lexicographic ties."""
    best, best_score = None, -np.inf
    for combo, h in zip(combos, channels):
        total = 0.0
        k = h.shape[0]
        for i in range(k):
            interference = sum(abs(h[i, j]) ** 2 for j in range(k) if j != i)
            total += abs(h[i, i]) ** 2 / (interference + noise_variance)
        if total > best_score or (total == best_score and combo < best):
            best, best_score = combo, total
    return best


def oracle_rule2(combos, channels, determinant=False):
    """Exhaustive argmax of 1/Tr((HH^H)^-1) (or det(HH^H)) via explicit
    inverses; skips combinations conditioned beyond 1e12."""
    best, best_score = None, -np.inf
    for combo, h in zip(combos, channels):
        gram = h @ h.conj().T
        s = np.linalg.svd(h, compute_uv=False)
        if s[-1] == 0 or s[0] / s[-1] > 1e12:
            continue
        score = abs(np.linalg.det(gram)) if determinant \
            else 1.0 / np.real(np.trace(np.linalg.inv(gram)))
        if score > best_score or (score == best_score and combo < best):
            best, best_score = combo, score
    if best is None:
        raise ValueError("all combinations rejected")
    return best
