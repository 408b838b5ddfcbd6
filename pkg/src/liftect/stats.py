"""Downstream statistics: classical MDS, agglomerative clustering, the
median-bandwidth double-exponential kernel, an SMO soft-margin SVM, AUC and
DeLong confidence intervals."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DistanceMatrix",
    "SVMModel",
    "classical_mds",
    "hierarchical_cluster",
    "cut_dendrogram",
    "median_bandwidth",
    "kernel_matrix",
    "svm_train",
    "svm_decision",
    "auc",
    "delong_ci",
    "split_train_test",
]


@dataclass(frozen=True)
class DistanceMatrix:
    ids: tuple
    d: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "ids", tuple(self.ids))
        m = np.asarray(self.d, dtype=float)
        object.__setattr__(self, "d", m)
        n = len(self.ids)
        if m.shape != (n, n):
            raise ValueError("matrix shape must match ids")
        if np.any(m < 0) or np.any(np.abs(np.diag(m)) > 1e-12):
            raise ValueError("distances must be non-negative with zero diagonal")
        if np.max(np.abs(m - m.T)) > 1e-12:
            raise ValueError("matrix must be symmetric (tol 1e-12)")

    def __len__(self):
        return len(self.ids)

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("id," + ",".join(str(i) for i in self.ids) + "\n")
            for i, row in zip(self.ids, self.d):
                fh.write(str(i) + "," + ",".join(repr(float(x)) for x in row) + "\n")

    @classmethod
    def from_csv(cls, path):
        with open(path) as fh:
            rows = [line.strip().split(",") for line in fh if line.strip()]
        ids = tuple(rows[0][1:])
        d = np.array([[float(x) for x in r[1:]] for r in rows[1:]])
        return cls(ids, d)


def classical_mds(dm: DistanceMatrix, k=2):
    """Classical (Torgerson) MDS: double-centered Gram matrix, top-k
    eigenpairs, with a deterministic sign convention (first entry of each
    coordinate axis above tolerance is positive)."""
    d2 = dm.d**2
    n = len(dm)
    j = np.eye(n) - np.ones((n, n)) / n
    b = -0.5 * j @ d2 @ j
    w, v = np.linalg.eigh((b + b.T) / 2.0)
    order = np.argsort(w)[::-1][:k]
    coords = np.zeros((n, k))
    for c, idx in enumerate(order):
        if w[idx] > 0:
            col = v[:, idx] * np.sqrt(w[idx])
            nz = np.nonzero(np.abs(col) > 1e-12)[0]
            if nz.size and col[nz[0]] < 0:
                col = -col
            coords[:, c] = col
    return coords


def hierarchical_cluster(dm: DistanceMatrix, linkage="average"):
    """Agglomerative merges; returns rows (id_a, id_b, distance, size) with
    new clusters labeled n, n+1, ... Ties break on the smallest index pair."""
    if linkage not in ("average", "single", "complete"):
        raise ValueError(f"unknown linkage {linkage!r}")
    n = len(dm)
    if n < 2:
        raise ValueError("need at least two items")
    active = {i: [i] for i in range(n)}
    dist = {}
    for i in range(n):
        for j in range(i + 1, n):
            dist[(i, j)] = dm.d[i, j]
    merges = []
    next_id = n
    while len(active) > 1:
        (a, b), d = min(dist.items(), key=lambda kv: (kv[1], kv[0]))
        members = active.pop(a) + active.pop(b)
        for pair in list(dist):
            if a in pair or b in pair:
                del dist[pair]
        for c, mem in active.items():
            pairs = dm.d[np.ix_(members, mem)]
            if linkage == "single":
                d_new = pairs.min()
            elif linkage == "complete":
                d_new = pairs.max()
            else:
                d_new = pairs.mean()
            key = (c, next_id) if c < next_id else (next_id, c)
            dist[key] = d_new
        active[next_id] = members
        merges.append((a, b, float(d), len(members)))
        next_id += 1
    return merges


def cut_dendrogram(merges, n, k):
    """Labels from cutting the merge list at k clusters."""
    parent = list(range(n + len(merges)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for step, (a, b, _, _) in enumerate(merges[: n - k]):
        new = n + step
        parent[find(a)] = new
        parent[find(b)] = new
    roots = {}
    labels = np.empty(n, dtype=int)
    for i in range(n):
        r = find(i)
        labels[i] = roots.setdefault(r, len(roots))
    return labels


def median_bandwidth(dm: DistanceMatrix) -> float:
    """Median off-diagonal distance, each unordered pair counted once."""
    if len(dm) < 2:
        raise ValueError("need at least two items")
    iu = np.triu_indices(len(dm), k=1)
    return float(np.median(dm.d[iu]))


def kernel_matrix(d, bandwidth):
    """Double-exponential kernel exp(-d^2 / lambda^2)."""
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    return np.exp(-np.asarray(d, dtype=float) ** 2 / bandwidth**2)


@dataclass(frozen=True)
class SVMModel:
    support: np.ndarray      # indices into the training ids
    coef: np.ndarray         # alpha_i * y_i at the support indices
    bias: float
    bandwidth: float
    C: float
    train_ids: tuple


def svm_train(dm: DistanceMatrix, labels, C=1.0, bandwidth=None, tol=1e-3,
              max_passes=200) -> SVMModel:
    """Soft-margin kernel SVM fit by sequential minimal optimization.

    ``dm`` holds pairwise distances between the training items; the kernel
    is the double-exponential kernel with the given (or median-heuristic)
    bandwidth. Optimizes the dual to KKT tolerance ``tol``.
    """
    y = np.asarray(labels, dtype=float)
    n = len(dm)
    if y.shape != (n,) or not set(np.unique(y)) <= {-1.0, 1.0}:
        raise ValueError("labels must be +/-1, one per item")
    if len(set(y)) < 2:
        raise ValueError("need both classes present")
    if bandwidth is None:
        bandwidth = median_bandwidth(dm)
    K = kernel_matrix(dm.d, bandwidth)
    alpha = np.zeros(n)
    b = 0.0
    rng = np.random.default_rng(0)  # fixed working-set order: deterministic

    def f(i):
        return float((alpha * y) @ K[:, i] + b)

    passes = 0
    while passes < max_passes:
        changed = 0
        for i in range(n):
            ei = f(i) - y[i]
            if (y[i] * ei < -tol and alpha[i] < C) or (y[i] * ei > tol and alpha[i] > 0):
                j = int(rng.integers(n - 1))
                if j >= i:
                    j += 1
                ej = f(j) - y[j]
                ai_old, aj_old = alpha[i], alpha[j]
                if y[i] != y[j]:
                    lo, hi = max(0.0, aj_old - ai_old), min(C, C + aj_old - ai_old)
                else:
                    lo, hi = max(0.0, ai_old + aj_old - C), min(C, ai_old + aj_old)
                if hi - lo < 1e-12:
                    continue
                eta = 2.0 * K[i, j] - K[i, i] - K[j, j]
                if eta >= 0:
                    continue
                aj = np.clip(aj_old - y[j] * (ei - ej) / eta, lo, hi)
                if abs(aj - aj_old) < 1e-7:
                    continue
                ai = ai_old + y[i] * y[j] * (aj_old - aj)
                alpha[i], alpha[j] = ai, aj
                b1 = b - ei - y[i] * (ai - ai_old) * K[i, i] - y[j] * (aj - aj_old) * K[i, j]
                b2 = b - ej - y[i] * (ai - ai_old) * K[i, j] - y[j] * (aj - aj_old) * K[j, j]
                if 0 < ai < C:
                    b = b1
                elif 0 < aj < C:
                    b = b2
                else:
                    b = (b1 + b2) / 2.0
                changed += 1
        passes = passes + 1 if changed == 0 else 0
        if changed == 0:
            break
    sv = np.nonzero(alpha > 1e-9)[0]
    return SVMModel(sv, (alpha * y)[sv], float(b), float(bandwidth), float(C), tuple(dm.ids))


def svm_decision(model: SVMModel, dist_to_train):
    """Decision values for points given their distances to every training
    item (shape (n_points, n_train))."""
    k = kernel_matrix(np.asarray(dist_to_train, dtype=float), model.bandwidth)
    return k[:, model.support] @ model.coef + model.bias


def auc(scores, labels) -> float:
    """Mann-Whitney AUC with half credit for ties."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    pos = scores[labels == 1]
    neg = scores[labels == -1]
    if pos.size == 0 or neg.size == 0:
        raise ValueError("need both classes present")
    wins = (pos[:, None] > neg[None, :]).sum() + 0.5 * (pos[:, None] == neg[None, :]).sum()
    return float(wins / (pos.size * neg.size))


def delong_ci(scores, labels, level=0.95):
    """DeLong variance estimate and normal-approximation interval for the
    AUC, clipped to [0, 1]."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    pos = scores[labels == 1]
    neg = scores[labels == -1]
    if pos.size == 0 or neg.size == 0:
        raise ValueError("need both classes present")
    a = auc(scores, labels)
    # structural components
    v10 = np.array([np.mean((p > neg) + 0.5 * (p == neg)) for p in pos])
    v01 = np.array([np.mean((pos > q) + 0.5 * (pos == q)) for q in neg])
    var = 0.0
    if pos.size > 1:
        var += np.var(v10, ddof=1) / pos.size
    if neg.size > 1:
        var += np.var(v01, ddof=1) / neg.size
    z = _normal_quantile(0.5 + level / 2.0)
    half = z * np.sqrt(max(var, 0.0))
    return float(max(0.0, a - half)), float(min(1.0, a + half))


def _normal_quantile(q):
    """Acklam's rational approximation; plenty for confidence bounds."""
    a = [-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
         1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00]
    b = [-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
         6.680131188771972e+01, -1.328068155288572e+01]
    c = [-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
         -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00]
    d = [7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
         3.754408661907416e+00]
    plow, phigh = 0.02425, 1 - 0.02425
    if q < plow:
        u = np.sqrt(-2 * np.log(q))
        return (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) / \
               ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1)
    if q > phigh:
        return -_normal_quantile(1 - q)
    u = q - 0.5
    t = u * u
    return (((((a[0] * t + a[1]) * t + a[2]) * t + a[3]) * t + a[4]) * t + a[5]) * u / \
           (((((b[0] * t + b[1]) * t + b[2]) * t + b[3]) * t + b[4]) * t + 1)


def split_train_test(ids, labels, fraction=0.5, seed=0):
    """Stratified random split, deterministic for a fixed seed.

    Each class contributes ceil(n_class * fraction) items to the training
    side; every class needs at least 2 members.
    """
    ids = list(ids)
    labels = np.asarray(labels)
    if len(ids) < 4:
        raise ValueError("need at least 4 items")
    rng = np.random.default_rng(seed)
    train, test = [], []
    for cls in sorted(set(labels.tolist())):
        members = [i for i, lab in zip(range(len(ids)), labels) if lab == cls]
        if len(members) < 2:
            raise ValueError(f"class {cls} has fewer than 2 members")
        members = list(rng.permutation(members))
        k = int(np.ceil(len(members) * fraction))
        train.extend(members[:k])
        test.extend(members[k:])
    return sorted(ids[i] for i in train), sorted(ids[i] for i in test)
