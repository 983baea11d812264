"""Shared generators and independent oracles for the test-suite.

Everything randomized takes an explicit numpy Generator so tests stay
reproducible; machines come out valid by construction.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from qdes.blm import Rblm
from qdes.linalg import Projector
from qdes.models import MmQfa, MoQfa, Qfac


def words_up_to(alphabet, max_len):
    for length in range(max_len + 1):
        yield from product(alphabet, repeat=length)


def random_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_state(rng, n):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_partition(rng, n, parts):
    """Split indices 0..n-1 into ``parts`` (possibly empty) random sets."""
    assignment = rng.integers(0, parts, size=n)
    return [frozenset(int(i) for i in np.flatnonzero(assignment == p)) for p in range(parts)]


def random_mo(rng, n, alphabet=("a", "b")):
    acc, _ = random_partition(rng, n, 2)
    accepting = Projector(acc, n)
    return MoQfa(
        alphabet=tuple(alphabet),
        unitaries={s: random_unitary(rng, n) for s in alphabet},
        initial=random_state(rng, n),
        accepting=accepting,
        rejecting=accepting.complement(),
    )


def random_mm(rng, n, alphabet=("a", "b")):
    acc, rej, go = random_partition(rng, n, 3)
    return MmQfa(
        alphabet=tuple(alphabet),
        unitaries={s: random_unitary(rng, n) for s in (*alphabet, "$")},
        initial=random_state(rng, n),
        accepting=Projector(acc, n),
        rejecting=Projector(rej, n),
        going=Projector(go, n),
    )


def random_qfac(rng, k, n, alphabet=("a", "b")):
    states = tuple(f"s{i}" for i in range(k))
    transitions = {
        (s, a): states[rng.integers(0, k)] for s in states for a in alphabet
    }
    unitaries = {(s, a): random_unitary(rng, n) for s in states for a in alphabet}
    accepting = {}
    for s in states:
        acc, _ = random_partition(rng, n, 2)
        accepting[s] = Projector(acc, n)
    return Qfac(
        classical_states=states,
        alphabet=tuple(alphabet),
        initial_classical=states[0],
        initial_quantum=random_state(rng, n),
        transitions=transitions,
        unitaries=unitaries,
        accepting=accepting,
    )


def random_rblm(rng, n, alphabet=("a", "b")):
    """Real-entried bilinear machine; real entries keep the word function real."""
    scale = 1.0 / np.sqrt(n)
    return Rblm(
        alphabet=tuple(alphabet),
        pi=rng.normal(size=n).astype(complex),
        matrices={a: (scale * rng.normal(size=(n, n))).astype(complex) for a in alphabet},
        eta=rng.normal(size=n).astype(complex),
    )


def similarity_transformed(rng, b: Rblm) -> Rblm:
    """Same word function, different coordinates (orthogonal change of basis)."""
    t, _ = np.linalg.qr(rng.normal(size=(b.n, b.n)))
    return Rblm(
        alphabet=b.alphabet,
        pi=t @ b.pi,
        matrices={a: t @ m @ t.T for a, m in b.matrices.items()},
        eta=b.eta @ t.T,
    )


def padded_with_dead_block(rng, b: Rblm, extra: int) -> Rblm:
    """Add states that can never contribute: their final functional is zero."""
    n = b.n + extra
    pi = np.concatenate([b.pi, rng.normal(size=extra)])
    eta = np.concatenate([b.eta, np.zeros(extra)])
    matrices = {}
    for a, m in b.matrices.items():
        big = np.zeros((n, n), dtype=complex)
        big[: b.n, : b.n] = m
        big[b.n:, b.n:] = rng.normal(size=(extra, extra)) / max(1.0, extra)
        matrices[a] = big
    return Rblm(b.alphabet, pi, matrices, eta)


def naive_kron(a, b):
    """Quadruple-loop tensor product, the hand oracle for block structure."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    out = np.zeros((a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]), dtype=complex)
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            for k in range(b.shape[0]):
                for l in range(b.shape[1]):
                    out[i * b.shape[0] + k, j * b.shape[1] + l] = a[i, j] * b[k, l]
    return out
