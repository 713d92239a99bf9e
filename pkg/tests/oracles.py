"""Brute-force reference implementations used to cross-check the library.

Everything here is deliberately written in plain Python over lists of floats,
with explicit loops and formulas transcribed directly from their definitions.
No numpy, no sharing of code with src/. Slow and obvious on purpose.
"""
import math


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def norm(a):
    return math.sqrt(sum(x * x for x in a))


def sub(a, b):
    return [x - y for x, y in zip(a, b)]


def cosine(a, b):
    c = dot(a, b) / (norm(a) * norm(b))
    return max(-1.0, min(1.0, c))


def mean(rows):
    n = len(rows)
    d = len(rows[0])
    return [sum(r[k] for r in rows) / n for k in range(d)]


def consistency(i, texts, sample_sets):
    """Mean over class-i samples of the min over j != i of
    cos(sample - centroid_j, text_i - text_j)."""
    centroids = [mean(s) for s in sample_sets]
    total = 0.0
    for sample in sample_sets[i]:
        worst = None
        for j in range(len(texts)):
            if j == i:
                continue
            c = cosine(sub(sample, centroids[j]), sub(texts[i], texts[j]))
            if worst is None or c < worst:
                worst = c
        total += worst
    return total / len(sample_sets[i])


def silhouette(i, texts, sample_sets, lam):
    """Mean multimodal silhouette over class-i samples."""
    centroids = [mean(s) for s in sample_sets]
    total = 0.0
    for sample in sample_sets[i]:
        a = (1.0 - cosine(sample, centroids[i])) + lam * (1.0 - cosine(sample, texts[i]))
        b = None
        for j in range(len(texts)):
            if j == i:
                continue
            d = (1.0 - cosine(sample, centroids[j])) + lam * (1.0 - cosine(sample, texts[j]))
            if b is None or d < b:
                b = d
        total += (b - a) / max(a, b)
    return total / len(sample_sets[i])


def compound(i, texts, sample_sets, lam, alpha):
    return consistency(i, texts, sample_sets) + alpha * silhouette(i, texts, sample_sets, lam)


def classify(image, class_ids, texts):
    """Highest-cosine class id; ties go to the lexicographically smallest id."""
    sims = [cosine(image, t) for t in texts]
    best = max(sims)
    winners = [cid for cid, s in zip(class_ids, sims) if s == best]
    return min(winners)


def accuracy(class_ids, texts, labeled_sets):
    """Per-class fraction of labeled samples classified as their own class."""
    out = {}
    for i, cid in enumerate(class_ids):
        hits = sum(
            1 for img in labeled_sets[i] if classify(img, class_ids, texts) == cid
        )
        out[cid] = hits / len(labeled_sets[i])
    return out


def average_ranks(x):
    """1-based fractional ranks; tied values share the mean of their positions."""
    n = len(x)
    order = sorted(range(n), key=lambda k: x[k])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and x[order[j + 1]] == x[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def spearman(x, y):
    """Pearson correlation of the average-rank vectors."""
    rx = average_ranks(x)
    ry = average_ranks(y)
    n = len(x)
    mx = sum(rx) / n
    my = sum(ry) / n
    num = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    den = math.sqrt(
        sum((a - mx) ** 2 for a in rx) * sum((b - my) ** 2 for b in ry)
    )
    return num / den
