#!/usr/bin/env python3
"""Reference numbers for the quantum-core, estimator and repeater tests.

Born-rule probabilities are built from explicit Kronecker products, the fidelity
from scipy's sqrtm, and the bootstrap check from closed-form error propagation.
"""

import numpy as np
from scipy.linalg import sqrtm

np.set_printoptions(legacy="1.25")

H = np.array([1, 0], dtype=complex)
V = np.array([0, 1], dtype=complex)


def lin(deg):
    t = np.deg2rad(deg)
    return np.cos(t) * H + np.sin(t) * V


def proj(v):
    return np.outer(v, v.conj())


def werner(vis):
    phi = (np.kron(H, H) + np.kron(V, V)) / np.sqrt(2)
    return vis * proj(phi) + (1 - vis) * np.eye(4) / 4


def E(rho, a, b):
    tot = 0.0
    for sa, pa in ((1, lin(a)), (-1, lin(a + 90))):
        for sb, pb in ((1, lin(b)), (-1, lin(b + 90))):
            tot += sa * sb * np.trace(rho @ np.kron(proj(pa), proj(pb))).real
    return tot


def chsh(rho, a=0, a2=45, b=22.5, b2=67.5):
    return abs(E(rho, a, b) - E(rho, a, b2) + E(rho, a2, b) + E(rho, a2, b2))


def fidelity(r, s):
    q = sqrtm(r)
    return np.trace(sqrtm(q @ s @ q)).real ** 2


print("== quantum")
print("S(Werner 0.88):", repr(chsh(werner(0.88))))
phi = (np.kron(H, H) + np.kron(V, V)) / np.sqrt(2)
# Pure target: F = <phi|rho|phi>, avoiding sqrtm's rounding on the rank-deficient product.
print("F(Werner 0.827, Phi+):", repr((phi.conj() @ werner(0.827) @ phi).real))
th = 0.81 * np.pi / 4
swpe = np.cos(th) * np.kron(H, H) + np.sin(th) * np.kron(V, V)
print("swpe amplitudes:", repr(np.cos(th)), repr(np.sin(th)), " concurrence:", repr(np.sin(2 * th)))
print("S(swpe 0.81pi/4) canonical angles:", repr(chsh(proj(swpe))))
R = (H + 1j * V) / np.sqrt(2)
L = (H - 1j * V) / np.sqrt(2)
pRL = np.trace(proj(swpe) @ np.kron(proj(R), proj(L))).real
pRR = np.trace(proj(swpe) @ np.kron(proj(R), proj(R))).real
print("swpe P(R,L):", repr(pRL), " P(R,R):", repr(pRR))
rho = 0.6 * proj(np.kron(lin(10), lin(70))) + 0.4 * proj(swpe)
print("F(mixed, swpe):", repr(fidelity(rho, proj(swpe))))

print("\n== estimators")
C, N = 900.0, 100.0
print("V(900,100):", repr((C - N) / (C + N)), " binomial sigma:", repr(np.sqrt(4 * C * N / (C + N) ** 3)))
C, N = 90000.0, 10000.0
print("V(9e4,1e4) sigma:", repr(np.sqrt(4 * C * N / (C + N) ** 3)))

print("\n== repeater")
print("1-(0.99)^6:", repr(1 - 0.99 ** 6))
print("swap 1/2 g^2 eta^2 (0.157, 0.29):", repr(0.5 * 0.157 ** 2 * 0.29 ** 2))
print("eta_DC^2 (0.136):", repr(0.136 ** 2))
print("speedup n=1 m=6 eta=0.683:", repr(6 * 0.683 ** 2))
eta_bar = np.mean([0.689, 0.672, 0.705, 0.689, 0.680, 0.664])
print("mean eta_rc:", repr(eta_bar))
print("S_AB for S_A=S_B=2.49:", repr(2.49 ** 2 / (2 * np.sqrt(2))), " V=0.88 product:", repr(2 * np.sqrt(2) * 0.88 ** 2))
# Linear approximation bound: relative error of m p vs 1-(1-p)^m at m p = 0.01.
for m in (1, 2, 6, 100):
    p = 0.01 / m
    exact = 1 - (1 - p) ** m
    print(f"m={m} rel err linear: {(m * p - exact) / exact!r}")
# Time for n=2, L0=50 km, p_link=1e-3, swaps 1e-3, c=2e5 km/s.
L = 4 * 50.0
print("T n=2:", repr(L / 2e5 * 1.5 ** 2 / (1e-3 * 1e-3 * 1e-3)))
# BSM on two SWPE states: post-selection probability of equal polarisations after B's H<->V flip.
for theta in (np.pi / 4, th):
    c, s = np.cos(theta), np.sin(theta)
    print(f"BSM success theta={theta!r}:", repr(2 * c * c * s * s), " = sin^2(2 theta)/2:", repr(np.sin(2 * theta) ** 2 / 2))
print("prefactor chi sin2theta/sqrt2 at chi=0.01:", repr(0.01 * np.sin(2 * th) / np.sqrt(2)))
