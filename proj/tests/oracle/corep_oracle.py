#!/usr/bin/env python3
"""Independent oracle for sampled corepresentation residuals.

Replays the library's SplitMix64 / Box-Muller stream so that the Haar mixing
unitary and the sampled unit vectors coincide, then evaluates
max_v ||(F_q(b~ (x) Delta b) chi(a~, Delta a) - U12 U13) v|| with dense numpy
algebra and a full scipy Schur form of Delta b.

    python3 corep_oracle.py > ../data/corep_oracle.json
"""
import json
import math

import numpy as np
import scipy.linalg as sl

MASK = (1 << 64) - 1


class SplitMix:
    def __init__(self, seed):
        self.state = seed & MASK

    def next(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)

    def uniform(self):
        return ((self.next() >> 11) + 0.5) * 2.0 ** -53

    def gaussian(self):
        u1 = self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2 * math.pi * u2)

    def complex_gaussian(self):
        re = self.gaussian()
        im = self.gaussian()
        return complex(re, im)


def unit_vector(rng, dim):
    v = np.array([rng.complex_gaussian() for _ in range(dim)])
    return v / np.linalg.norm(v)


def haar(rng, dim):
    g = np.zeros((dim, dim), complex)
    for j in range(dim):
        for i in range(dim):
            g[i, j] = rng.complex_gaussian()
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def centered(k, m):
    return ((k + m // 2) % m) - m // 2


def model(q, m):
    x = np.array([q ** centered(k, m) * np.exp(2j * np.pi * j / m)
                  for k in range(m) for j in range(m)])
    f = np.array([[np.exp(2j * np.pi * (j * l + jp * k) / m) / m
                   for l in range(m) for jp in range(m)]
                  for k in range(m) for j in range(m)])
    return x, f


def lattice_exponent(z, q):
    return int(round(math.log(abs(z)) / math.log(q)))


def fq(z, q):
    if z == 0:
        return 1.0 + 0j
    # singular set {-q^{-2m}}: the product is 0/0 there; value -1
    k = lattice_exponent(z, q)
    if k <= 0 and k % 2 == 0 and abs(z + q ** k) < 1e-9 * q ** k:
        return -1.0 + 0j
    p = 1.0 + 0j
    k = 0
    while True:
        t = q ** (2 * k)
        p *= (1 + t * np.conj(z)) / (1 + t * z)
        if t * abs(z) < 1e-18:
            return p / abs(p)
        k += 1


def chi(z1, z2, q):
    return np.exp(1j * (lattice_exponent(z2, q) * np.angle(z1) + lattice_exponent(z1, q) * np.angle(z2)))


def eig_unitary(t):
    w, v = np.linalg.eig(t)
    v, _ = np.linalg.qr(v)  # distinct eigenvalues of a normal matrix: orthogonal already
    return w, v


def schrodinger_block_pair(q, seed):
    xs, fs = model(q, 2)
    rng = SplitMix(seed)
    w = haar(rng, 4)
    bt = w @ fs.conj().T @ np.diag(xs) @ fs @ w.conj().T
    at = w @ np.diag(xs) @ w.conj().T
    return bt, at


def residual(bt, at, q, m, samples, seed):
    d = bt.shape[0]
    x, f = model(q, m)
    n = m * m
    a = np.diag(x)
    b = f.conj().T @ a @ f
    beta, vb = eig_unitary(bt)
    alpha, va = eig_unitary(at)
    beta = np.where(np.abs(beta) < 1e-9, 0, beta)

    wb = np.kron(vb, f.conj().T)
    u = wb @ np.diag([fq(bb * v, q) for bb in beta for v in x]) @ wb.conj().T
    wa = np.kron(va, np.eye(n))
    u = u @ (wa @ np.diag([chi(al, v, q) for al in alpha for v in x]) @ wa.conj().T)

    db = np.kron(a, b) + np.kron(b, np.eye(n))
    t, qs = sl.schur(db, output="complex")
    lam = np.diag(t)
    dvals = np.array([[fq(bb * l, q) for l in lam] for bb in beta])
    x12 = np.array([x1 * x2 for x1 in x for x2 in x])
    chis = np.array([[chi(al, v, q) for v in x12] for al in alpha])

    def lhs(v):
        v = v.reshape(d, n * n)
        v = va @ (chis * (va.conj().T @ v))
        v = vb.conj().T @ v @ qs.conj()
        v = dvals * v
        v = vb @ v @ qs.T
        return v.reshape(-1)

    def rhs(v):
        w = v.reshape(d, n, n).transpose(0, 2, 1).reshape(d * n, n)
        w = (u @ w).reshape(d, n, n).transpose(0, 2, 1).reshape(d * n, n)
        return (u @ w).reshape(-1)

    rng = SplitMix(seed)
    worst = 0.0
    for _ in range(samples):
        v = unit_vector(rng, d * n * n)
        worst = max(worst, float(np.linalg.norm(lhs(v) - rhs(v))))
    return worst


def main():
    q = 0.5
    seed = 1
    out = {"q": q, "seed": seed, "samples": 32, "schrodinger_block": {}}
    bt, at = schrodinger_block_pair(q, seed)
    for m in (4, 6):
        out["schrodinger_block"][str(m)] = residual(bt, at, q, m, 32, seed)
    out["backend_sensitive"] = ["schrodinger_block.*"]
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
