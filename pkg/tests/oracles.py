"""Brute-force reference implementations used only by the tests."""

from itertools import combinations


def brute_lcs(a, b):
    """Longest common subsequence by enumerating subsequences of the shorter input."""
    if len(a) > len(b):
        a, b = b, a

    def is_subseq(sub, seq):
        it = iter(seq)
        return all(x in it for x in sub)

    for k in range(len(a), 0, -1):
        for idx in combinations(range(len(a)), k):
            if is_subseq([a[i] for i in idx], b):
                return k
    return 0


def brute_overlap(cand, ref, n):
    """Clipped n-gram overlap by greedy one-to-one matching of list items."""
    cgrams = [tuple(cand[i : i + n]) for i in range(len(cand) - n + 1)]
    pool = [tuple(ref[i : i + n]) for i in range(len(ref) - n + 1)]
    hits = 0
    for g in cgrams:
        if g in pool:
            pool.remove(g)
            hits += 1
    return hits, len(cgrams), len([tuple(ref[i : i + n]) for i in range(len(ref) - n + 1)])


def brute_rouge_n(cand, ref, n):
    hits, nc, nr = brute_overlap(cand, ref, n)
    if nc == 0 or nr == 0:
        return 0.0, 0.0, 0.0
    p, r = hits / nc, hits / nr
    return p, r, (2 * p * r / (p + r) if p + r else 0.0)


def brute_rouge_l(cand, ref):
    if not cand or not ref:
        return 0.0, 0.0, 0.0
    lcs = brute_lcs(cand, ref)
    p, r = lcs / len(cand), lcs / len(ref)
    return p, r, (2 * p * r / (p + r) if p + r else 0.0)
