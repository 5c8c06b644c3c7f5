"""Reference values frozen into the C++ unit tests.

Everything here is computed with numpy / scipy or by brute force, independently of the C++ code.
Run `python3 tests/oracles/oracles.py` to regenerate; paste the printed constants into the tests.
"""

import itertools
import math

import numpy as np
from scipy import linalg, stats

# Fixed small inputs shared with tests/test_oracles.cpp.
H = np.array([
    [1.0, 2.0, 0.5],
    [-0.5, 1.5, 2.0],
    [3.0, -1.0, 1.0],
    [0.0, 0.5, -2.0],
    [2.5, 2.0, 0.0],
    [-1.0, -2.0, 1.5],
    [1.5, 0.0, -1.0],
    [0.5, 3.0, 2.5],
])
G = np.array([
    [0.5, 1.0, -1.0],
    [1.0, 2.5, 0.0],
    [2.0, -0.5, 1.5],
    [-1.5, 0.0, -0.5],
    [3.0, 1.0, 0.5],
    [0.0, -1.5, 2.0],
    [1.0, 0.5, -2.5],
    [-0.5, 2.0, 1.0],
])

X = [0.3, 1.2, 2.2, 2.2, 3.9, 4.1, 5.0, 7.5]
Y = [1.0, 0.8, 2.9, 3.5, 3.1, 6.0, 5.2, 9.0]
XP = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
YP = [2.0, 1.0, 4.0, 3.0, 6.0, 5.0]


def procrustes_residual():
    # scipy returns R minimizing ||G R - H||; our rotation is R^T.
    r, _ = linalg.orthogonal_procrustes(G, H)
    return np.linalg.norm(H - G @ r)


def inv_sqrt(m):
    w, v = np.linalg.eigh(m)
    return v @ np.diag(w ** -0.5) @ v.T


def cca_values():
    h = H - H.mean(0)
    g = G - G.mean(0)
    wh = inv_sqrt(h.T @ h)
    wg = inv_sqrt(g.T @ g)
    u, s, _ = np.linalg.svd(wh @ h.T @ g @ wg)
    rho = np.clip(s, 0, 1)
    variates = h @ (wh @ u)
    alpha = np.abs(variates.T @ h).sum(axis=1)
    return rho, np.mean(rho ** 2), float(alpha @ rho / alpha.sum())


def cka_value():
    # N x N Gram formulation, the textbook definition.
    n = H.shape[0]
    c = np.eye(n) - np.ones((n, n)) / n
    kh = c @ H @ H.T @ c
    kg = c @ G @ G.T @ c
    return np.trace(kh @ kg) / math.sqrt(np.trace(kh @ kh) * np.trace(kg @ kg))


def linreg_value():
    coef, *_ = np.linalg.lstsq(H, G, rcond=None)
    return 1 - np.linalg.norm(G - H @ coef) ** 2 / np.linalg.norm(G) ** 2


def exact_permutation_p(x, y, statistic):
    observed = abs(statistic(x, y))
    hits = total = 0
    for perm in itertools.permutations(y):
        total += 1
        hits += abs(statistic(x, list(perm))) >= observed - 1e-12
    return hits / total


def pearson(x, y):
    return stats.pearsonr(x, y)[0]


def spearman(x, y):
    return stats.spearmanr(x, y)[0]


# Philox4x32-10, written from the Random123 description.
M0, M1 = 0xD2511F53, 0xCD9E8D57
W0, W1 = 0x9E3779B9, 0xBB67AE85
MASK = 0xFFFFFFFF


def philox(ctr, key):
    c = list(ctr)
    k = list(key)
    for rnd in range(10):
        if rnd:
            k = [(k[0] + W0) & MASK, (k[1] + W1) & MASK]
        p0 = M0 * c[0]
        p1 = M1 * c[2]
        c = [(p1 >> 32) ^ c[1] ^ k[0], p1 & MASK, (p0 >> 32) ^ c[3] ^ k[1], p0 & MASK]
    return c


def stream_u64(seed, stream, count):
    out = []
    block = 0
    while len(out) < count:
        w = philox([block & MASK, block >> 32, stream & MASK, stream >> 32], [seed & MASK, seed >> 32])
        out += [w[0] | (w[1] << 32), w[2] | (w[3] << 32)]
        block += 1
    return out[:count]


def stream_normals(seed, stream, count):
    words = stream_u64(seed, stream, 2 * ((count + 1) // 2))
    uniforms = [((w >> 11) + 0.5) * 2.0 ** -53 for w in words]
    out = []
    for u1, u2 in zip(uniforms[0::2], uniforms[1::2]):
        r = math.sqrt(-2 * math.log(u1))
        out += [r * math.cos(2 * math.pi * u2), r * math.sin(2 * math.pi * u2)]
    return uniforms, out[:count]


def main():
    print("procrustes_residual", repr(procrustes_residual()))
    rho, r2, pw = cca_values()
    print("cca_rho", [repr(v) for v in rho])
    print("r2_cca", repr(r2), "pwcca", repr(pw))
    print("cka", repr(cka_value()))
    print("linreg_r2", repr(linreg_value()))

    sp = stats.spearmanr(X, Y)
    pe = stats.pearsonr(X, Y)
    lr = stats.linregress(X, Y)
    print("spearman", repr(sp[0]), repr(sp[1]))
    print("pearson", repr(pe[0]), repr(pe[1]))
    print("linregress", repr(lr.slope), repr(lr.intercept), repr(lr.stderr))
    print("perm_p_pearson", repr(exact_permutation_p(XP, YP, pearson)))
    print("perm_p_spearman", repr(exact_permutation_p(XP, YP, spearman)))

    print("philox_kat", [hex(v) for v in philox([0, 0, 0, 0], [0, 0])])
    print("philox_kat_ones", [hex(v) for v in philox([MASK] * 4, [MASK, MASK])])
    print("philox_kat_pi", [hex(v) for v in philox([0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344],
                                                    [0xA4093822, 0x299F31D0])])
    print("u64 seed 42 stream 3", [hex(v) for v in stream_u64(42, 3, 4)])
    uniforms, normals = stream_normals(42, 0, 6)
    print("uniform seed 42", [repr(v) for v in uniforms[:4]])
    print("normal seed 42", [repr(v) for v in normals])


if __name__ == "__main__":
    main()
