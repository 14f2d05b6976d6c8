#!/usr/bin/env python3
"""Straight-line reference for the key schedule golden vectors.

Written independently of the C++ sources; its output is frozen into
tests/test_keyschedule.cpp and tests/acceptance.cpp.
"""
import math

M64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def splitmix_next(state):
    state = (state + GOLDEN) & M64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
    return state, z ^ (z >> 31)


def finalize(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
    return z ^ (z >> 31)


def derive_step_seed(key, tag):
    return finalize(key ^ (((tag + 1) * GOLDEN) & M64))


def draws(seed, count):
    out, s = [], seed
    for _ in range(count):
        s, z = splitmix_next(s)
        out.append(z)
    return out


def fisher_yates(seed, n):
    p = list(range(n))
    s = seed
    for i in range(n - 1, 0, -1):
        s, z = splitmix_next(s)
        j = z % (i + 1)
        p[i], p[j] = p[j], p[i]
    return p


if __name__ == "__main__":
    for seed in (0, 1, M64):
        print("splitmix", hex(seed), [hex(v) for v in draws(seed, 4)])
    print("step seeds key0", [hex(derive_step_seed(0, t)) for t in range(4)])
    print("step seeds key1", [hex(derive_step_seed(1, t)) for t in range(4)])
    print("uniform_below seed 42 n=6", [v % 6 for v in draws(42, 4)])
    print("perm seed 42 n=4", fisher_yates(42, 4))
    print("perm seed 0 n=4", fisher_yates(0, 4))
    print("symbols seed 42 n=8 m=8", [v % 8 for v in draws(42, 8)])
    print("log2(24*8^4*2^4*6^4)", math.log2(24 * 8**4 * 2**4 * 6**4), 24 * 8**4 * 2**4 * 6**4)
    print("log2 24", math.log2(24))
    print("log2 16!", math.log2(math.factorial(16)))
    print("512 all", math.log2(math.factorial(1024)) + 1024 * (3 + 1 + math.log2(6)))
    print("psnr16", 10 * math.log10(255**2 / 256))
