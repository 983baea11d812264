"""Parallel composition of plants.

Quantum plants over a shared alphabet compose by tensoring every
component; the composite acceptance probability is the product of the
component probabilities.  Classical automata compose in matrix form
over possibly different alphabets: shared events tensor both transition
matrices, private events tensor with an identity factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .linalg import Projector, tensor
from .models import Dfa, MoQfa, Qfac


@dataclass(frozen=True, eq=False)
class ClassicalMatrixAutomaton:
    """Finite automaton in 0/1 matrix form.

    States are basis vectors; entry (i, j) of an event matrix is 1 iff
    the event moves state i to state j.  Indicator vectors are rows and
    multiply from the left, so nondeterministic automata fit too.
    """

    n: int
    alphabet: tuple[str, ...]
    matrices: Mapping[str, np.ndarray]
    initial: np.ndarray
    marked: np.ndarray

    @classmethod
    def from_dfa(cls, d: Dfa) -> "ClassicalMatrixAutomaton":
        index = {q: i for i, q in enumerate(d.states)}
        n = len(d.states)
        matrices = {}
        for a in d.alphabet:
            m = np.zeros((n, n), dtype=int)
            for q in d.states:
                m[index[q], index[d.transitions[(q, a)]]] = 1
            matrices[a] = m
        initial = np.zeros(n, dtype=int)
        initial[index[d.initial]] = 1
        marked = np.zeros(n, dtype=int)
        for q in d.accepting:
            marked[index[q]] = 1
        return cls(n, d.alphabet, matrices, initial, marked)

    def run_indicator(self, w: Sequence[str]) -> np.ndarray:
        """0/1 indicator of the states reachable on ``w`` (boolean semiring)."""
        v = self.initial.copy()
        for sym in w:
            if sym not in self.matrices:
                raise ValueError(f"event {sym!r} not in alphabet")
            v = (v @ self.matrices[sym] > 0).astype(int)
        return v

    def marks(self, w: Sequence[str]) -> bool:
        return bool(np.any(self.run_indicator(w) & self.marked))


def parallel_classical(
    g1: ClassicalMatrixAutomaton, g2: ClassicalMatrixAutomaton
) -> ClassicalMatrixAutomaton:
    """Matrix-form parallel composition over the union alphabet.

    Shared events synchronize (tensor of both matrices); events private
    to one component interleave (tensor with the identity of the other).
    """
    shared = set(g1.alphabet) & set(g2.alphabet)
    union = tuple(dict.fromkeys((*g1.alphabet, *g2.alphabet)))
    i1 = np.eye(g1.n, dtype=int)
    i2 = np.eye(g2.n, dtype=int)
    matrices = {}
    for a in union:
        if a in shared:
            matrices[a] = np.kron(g1.matrices[a], g2.matrices[a])
        elif a in g1.matrices:
            matrices[a] = np.kron(g1.matrices[a], i2)
        else:
            matrices[a] = np.kron(i1, g2.matrices[a])
    return ClassicalMatrixAutomaton(
        n=g1.n * g2.n,
        alphabet=union,
        matrices=matrices,
        initial=np.kron(g1.initial, g2.initial),
        marked=np.kron(g1.marked, g2.marked),
    )


def _product_projector(p1: Projector, p2: Projector) -> Projector:
    idx = {i * p2.dim + j for i in p1.subset for j in p2.subset}
    return Projector(frozenset(idx), p1.dim * p2.dim)


def parallel_mo(m1: MoQfa, m2: MoQfa) -> MoQfa:
    """Tensor composition of measure-once automata; probabilities multiply."""
    if m1.alphabet != m2.alphabet:
        raise ValueError("parallel composition requires a shared alphabet")
    accepting = _product_projector(m1.accepting, m2.accepting)
    return MoQfa(
        alphabet=m1.alphabet,
        unitaries={a: tensor(m1.unitaries[a], m2.unitaries[a]) for a in m1.alphabet},
        initial=tensor(m1.initial, m2.initial),
        accepting=accepting,
        rejecting=accepting.complement(),
    )


def parallel_qfac(m1: Qfac, m2: Qfac) -> Qfac:
    """Tensor composition of classical-hybrid automata.

    Classical states pair up, unitaries and measurements tensor, and the
    composite accepts exactly when both components accept, which makes
    the acceptance probability the product of the components'.
    """
    if m1.alphabet != m2.alphabet:
        raise ValueError("parallel composition requires a shared alphabet")
    name = {(s1, s2): f"({s1},{s2})" for s1 in m1.classical_states for s2 in m2.classical_states}
    states = tuple(name[(s1, s2)] for s1 in m1.classical_states for s2 in m2.classical_states)
    transitions = {}
    unitaries = {}
    accepting = {}
    for s1 in m1.classical_states:
        for s2 in m2.classical_states:
            s = name[(s1, s2)]
            accepting[s] = _product_projector(m1.accepting[s1], m2.accepting[s2])
            for a in m1.alphabet:
                transitions[(s, a)] = name[(m1.transitions[(s1, a)], m2.transitions[(s2, a)])]
                unitaries[(s, a)] = tensor(m1.unitaries[(s1, a)], m2.unitaries[(s2, a)])
    return Qfac(
        classical_states=states,
        alphabet=m1.alphabet,
        initial_classical=name[(m1.initial_classical, m2.initial_classical)],
        initial_quantum=tensor(m1.initial_quantum, m2.initial_quantum),
        transitions=transitions,
        unitaries=unitaries,
        accepting=accepting,
    )
