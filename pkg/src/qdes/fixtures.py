"""Reference automata used across the test-suite and the CLI.

The quantum fixtures all derive from one primitive: a measure-once
automaton over the single-letter alphabet {0} whose acceptance
probability on 0^t is exactly 1 when a prime p divides t and certified
below a chosen bound otherwise.  It is built from d two-dimensional
rotation blocks with angles 2*pi*k_j/p, rotated so the initial state is
the first basis vector; the multipliers k_j come from a seeded random
search and the error bound is certified by an exhaustive sweep over all
residues, never assumed.

On top of it sit the three plant families:

* ``build_eg1``    -- hybrid acceptor of words whose 0/1-substring is
  shorter than 2N, or has length exactly 2N with the two binary halves
  summing to 2^N - 1 (exponential classical state blow-up for DFA).
* ``build_egadd``  -- hybrid acceptor of words whose 0/1-substring is
  shorter than N, or has length N with the number of zeros different
  from N/2 (quadratic DFA blow-up).
* ``build_eg2``    -- three-state measure-many acceptor of words with at
  most N zeros, acceptance (1-r)^{#zeros} (linear DFA blow-up).

Classical counterparts (counting DFAs and a minimal-DFA size oracle)
provide the state-complexity baselines.
"""

from __future__ import annotations

import math

import numpy as np

from .linalg import Projector, dagger, projected_norm_sq, unitary_power
from .models import Dfa, MmQfa, MoQfa, Qfac, mo_accept_prob


class FixtureSearchError(RuntimeError):
    """A randomized fixture search exhausted its retry budget."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def first_prime_in(lo: int, hi: int) -> int:
    """Smallest prime strictly between lo and hi."""
    for n in range(lo + 1, hi):
        if is_prime(n):
            return n
    raise ValueError(f"no prime in the open interval ({lo}, {hi})")


def eg1_prime(n_param: int) -> int:
    return first_prime_in(2 ** (n_param + 1), 2 ** (n_param + 2))


def egadd_prime(n_param: int) -> int:
    return first_prime_in(n_param * n_param, 2 * n_param * n_param)


def _rotation(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _householder_from_e0(target: np.ndarray) -> np.ndarray:
    """Real orthogonal matrix mapping e0 to ``target`` (a real unit vector)."""
    e0 = np.zeros_like(target)
    e0[0] = 1.0
    u = target - e0
    nrm = np.linalg.norm(u)
    if nrm < 1e-14:
        return np.eye(target.shape[0])
    u = u / nrm
    return np.eye(target.shape[0]) - 2.0 * np.outer(u, u)


def _block_rotation_automaton(p: int, ks: np.ndarray, accept_multiples: bool) -> MoQfa:
    d = len(ks)
    dim = 2 * d
    blocks = np.zeros((dim, dim), dtype=complex)
    for j, k in enumerate(ks):
        blocks[2 * j: 2 * j + 2, 2 * j: 2 * j + 2] = _rotation(2.0 * math.pi * k / p)
    psi = np.zeros(dim)
    psi[0::2] = 1.0 / math.sqrt(d)
    v = _householder_from_e0(psi)
    # Conjugating moves the uniform start state onto e0, so the
    # accepting set can stay a plain basis-index set.
    u0 = v.T @ blocks @ v
    initial = np.zeros(dim, dtype=complex)
    initial[0] = 1.0
    accepting = Projector(frozenset({0}), dim)
    if not accept_multiples:
        accepting = accepting.complement()
    return MoQfa(
        alphabet=("0",),
        unitaries={"0": u0.astype(complex)},
        initial=initial,
        accepting=accepting,
        rejecting=accepting.complement(),
    )


def residue_sweep(m: MoQfa, p: int) -> list[float]:
    """Acceptance probability of 0^t for every residue t in 1..p-1."""
    probs = []
    v = np.asarray(m.initial, dtype=complex)
    u = m.unitaries["0"]
    for _ in range(1, p):
        v = u @ v
        probs.append(projected_norm_sq(m.accepting, v))
    return probs


def build_af_modp(
    p: int,
    eps: float,
    seed: int = 0,
    accept_multiples: bool = True,
    max_blocks: int = 64,
    tries_per_block: int = 500,
) -> MoQfa:
    """Mod-p rotation automaton over {0} with a certified error bound.

    With ``accept_multiples`` the automaton accepts 0^t with probability
    exactly 1 when p | t and strictly below ``eps`` otherwise; with the
    flag off the roles flip (probability 0 at multiples, above 1 - eps
    elsewhere).  The block count grows from 1 until a seeded random draw
    of multipliers passes the exhaustive residue sweep; the sweep is the
    certificate.  U(0)^p = I holds structurally since every block's
    order divides p.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if not (0.0 < eps < 1.0):
        raise ValueError("error bound must lie strictly between 0 and 1")
    rng = np.random.default_rng(seed)
    for d in range(1, max_blocks + 1):
        for _ in range(tries_per_block):
            if d <= p - 1:
                ks = rng.choice(np.arange(1, p), size=d, replace=False)
            else:
                ks = rng.integers(1, p, size=d)
            # Certify on the residue profile of the candidate multipliers.
            worst = 0.0
            for t in range(1, p):
                amp = float(np.mean(np.cos(2.0 * math.pi * ks * t / p)))
                worst = max(worst, amp * amp)
            if worst >= eps:
                continue
            m = _block_rotation_automaton(p, ks, accept_multiples)
            # Re-certify on the built matrices, not just the formula.
            sweep = residue_sweep(m, p)
            if accept_multiples:
                ok = max(sweep) < eps
            else:
                ok = min(sweep) > 1.0 - eps
            period = unitary_power(m.unitaries["0"], p)
            ok = ok and float(np.max(np.abs(period - np.eye(2 * d)))) <= 1e-9
            if ok:
                return m
    raise FixtureSearchError(
        f"no multiplier set certified eps={eps} for p={p} within {max_blocks} blocks"
    )


def build_eg1(n_param: int, eps: float, seed: int = 0) -> Qfac:
    """Hybrid acceptor of the halves-sum language over {0, 1, 2}.

    Words whose 0/1-substring is shorter than 2N are accepted exactly;
    longer ones are rejected exactly; at length exactly 2N the two
    binary halves x, y are accepted with probability 1 when
    x + y = 2^N - 1 and below ``eps`` otherwise.  Symbol 2 is neutral.
    2N+2 classical states; the quantum dimension is whatever the mod-p
    certificate needed.
    """
    if n_param < 1:
        raise ValueError("N must be at least 1")
    p = eg1_prime(n_param)
    core = build_af_modp(p, eps, seed)
    u0 = core.unitaries["0"]
    dim = core.dim
    n_states = 2 * n_param + 2
    states = tuple(f"s{i}" for i in range(n_states))
    last, dead = states[-2], states[-1]

    identity = np.eye(dim, dtype=complex)
    powers = {0: identity}

    def power(e: int) -> np.ndarray:
        if e not in powers:
            powers[e] = unitary_power(u0, e)
        return powers[e]

    transitions: dict[tuple[str, str], str] = {}
    unitaries: dict[tuple[str, str], np.ndarray] = {}
    accepting: dict[str, Projector] = {}
    for i, s in enumerate(states):
        transitions[(s, "2")] = s
        unitaries[(s, "2")] = identity
        for sym in ("0", "1"):
            transitions[(s, sym)] = states[min(i + 1, n_states - 1)]
            if i < 2 * n_param:
                weight = 2 ** (n_param - 1 - (i % n_param))
                unitaries[(s, sym)] = power(int(sym) * weight)
            else:
                unitaries[(s, sym)] = identity
        if i < 2 * n_param:
            accepting[s] = Projector.full(dim)
        elif s == last:
            accepting[s] = core.accepting
        else:
            accepting[s] = Projector.empty(dim)
    assert accepting[dead].subset == frozenset()

    return Qfac(
        classical_states=states,
        alphabet=("0", "1", "2"),
        initial_classical=states[0],
        initial_quantum=power(p - 2 ** n_param + 1) @ core.initial,
        transitions=transitions,
        unitaries=unitaries,
        accepting=accepting,
    )


def build_egadd(n_param: int, eps: float, seed: int = 0) -> Qfac:
    """Hybrid acceptor of the zero-imbalance language over {0, 1, 2}.

    Words whose 0/1-substring is shorter than N are accepted exactly;
    longer ones rejected exactly; at length exactly N the probability is
    exactly 0 when the zero count is N/2 and above 1 - eps otherwise.
    N+2 classical states; reading 0 advances the rotation by N/2 steps,
    reading 1 undoes N/2 steps, so the final rotation count is
    (zeros - N/2) * N, divisible by p only when it is zero.
    """
    if n_param < 2 or n_param % 2 != 0:
        raise ValueError("N must be even and at least 2")
    p = egadd_prime(n_param)
    core = build_af_modp(p, eps, seed, accept_multiples=False)
    u0 = core.unitaries["0"]
    dim = core.dim
    n_states = n_param + 2
    states = tuple(f"s{i}" for i in range(n_states))
    last, dead = states[-2], states[-1]

    identity = np.eye(dim, dtype=complex)
    forward = unitary_power(u0, n_param // 2)
    backward = dagger(forward)

    transitions: dict[tuple[str, str], str] = {}
    unitaries: dict[tuple[str, str], np.ndarray] = {}
    accepting: dict[str, Projector] = {}
    for i, s in enumerate(states):
        transitions[(s, "2")] = s
        unitaries[(s, "2")] = identity
        for sym in ("0", "1"):
            transitions[(s, sym)] = states[min(i + 1, n_states - 1)]
            unitaries[(s, sym)] = forward if sym == "0" else backward
        if i < n_param:
            accepting[s] = Projector.full(dim)
        elif s == last:
            accepting[s] = core.accepting
        else:
            accepting[s] = Projector.empty(dim)
    assert accepting[dead].subset == frozenset()

    return Qfac(
        classical_states=states,
        alphabet=("0", "1", "2"),
        initial_classical=states[0],
        initial_quantum=np.asarray(core.initial, dtype=complex),
        transitions=transitions,
        unitaries=unitaries,
        accepting=accepting,
    )


def eg2_rate(n_param: int, cutpoint: float) -> float:
    """Decay rate for the bounded-zeros acceptor: midpoint of the valid interval.

    The interval [1 - cutpoint^(1/(N+1)), 1 - cutpoint^(1/N)) makes
    (1-r)^N exceed the cut-point while (1-r)^(N+1) stays at or below it.
    """
    if not (0.0 < cutpoint < 1.0):
        raise ValueError("cut-point must lie strictly between 0 and 1")
    lo = 1.0 - cutpoint ** (1.0 / (n_param + 1))
    hi = 1.0 - cutpoint ** (1.0 / n_param)
    return 0.5 * (lo + hi)


def build_eg2(n_param: int, cutpoint: float) -> MmQfa:
    """Three-state measure-many acceptor of words with at most N zeros.

    Acceptance is (1-r)^m for a word with m zeros: each 0 leaks mass r
    from the going state into the rejecting state, 1 leaves the state
    untouched, and the end marker moves the surviving mass into the
    accepting state.
    """
    r = eg2_rate(n_param, cutpoint)
    u0 = np.array(
        [
            [math.sqrt(1.0 - r), -math.sqrt(r), 0.0],
            [math.sqrt(r), math.sqrt(1.0 - r), 0.0],
            [0.0, 0.0, 1.0],
        ],
        dtype=complex,
    )
    u_end = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=complex)
    return MmQfa(
        alphabet=("0", "1"),
        unitaries={"0": u0, "1": np.eye(3, dtype=complex), "$": u_end},
        initial=np.array([1.0, 0.0, 0.0], dtype=complex),
        accepting=Projector(frozenset({2}), 3),
        rejecting=Projector(frozenset({1}), 3),
        going=Projector(frozenset({0}), 3),
    )


def build_eg2_spec(m: MmQfa) -> MmQfa:
    """Restriction of the bounded-zeros acceptor that kills words containing 1.

    Replaces U(1) = I by the swap of the going and rejecting states, so
    any 1 moves the surviving mass into the rejecting state and the word
    function vanishes on every word with a 1 in it.
    """
    swap = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=complex)
    unitaries = dict(m.unitaries)
    unitaries["1"] = swap
    return MmQfa(
        alphabet=m.alphabet,
        unitaries=unitaries,
        initial=m.initial,
        accepting=m.accepting,
        rejecting=m.rejecting,
        going=m.going,
    )


def build_spec_variant(fixture: Qfac, dead_state: str, symbol: str = "2") -> Qfac:
    """Retarget every ``symbol`` transition to an identically-rejecting state.

    The result generates the same word function on symbol-free words and
    0 on any word containing the symbol (the dead state must reject
    identically and is absorbing in the stock fixtures).
    """
    if dead_state not in fixture.classical_states:
        raise ValueError(f"unknown classical state {dead_state!r}")
    if fixture.accepting[dead_state].subset != frozenset():
        raise ValueError(f"state {dead_state!r} does not reject identically")
    transitions = dict(fixture.transitions)
    for s in fixture.classical_states:
        transitions[(s, symbol)] = dead_state
    return Qfac(
        classical_states=fixture.classical_states,
        alphabet=fixture.alphabet,
        initial_classical=fixture.initial_classical,
        initial_quantum=fixture.initial_quantum,
        transitions=transitions,
        unitaries=fixture.unitaries,
        accepting=fixture.accepting,
    )


def dfa_bounded_zeros(n_param: int) -> Dfa:
    """Counting DFA for words over {0, 1} with at most N zeros (N+2 states)."""
    states = tuple(f"z{i}" for i in range(n_param + 1)) + ("dead",)
    transitions = {}
    for i in range(n_param + 1):
        transitions[(f"z{i}", "1")] = f"z{i}"
        transitions[(f"z{i}", "0")] = f"z{i + 1}" if i < n_param else "dead"
    transitions[("dead", "0")] = "dead"
    transitions[("dead", "1")] = "dead"
    return Dfa(
        states=states,
        alphabet=("0", "1"),
        transitions=transitions,
        initial="z0",
        accepting=frozenset(states[:-1]),
    )


def dfa_halves_sum_tracking(n_param: int) -> Dfa:
    """Prefix-sum tracking DFA for the halves-sum language restricted to {0, 1}.

    States record (length so far, weighted bit sum so far); words longer
    than 2N fall into a dead state.  Deliberately unminimized; feed it
    to ``minimal_dfa_size`` for the lower-bound counts.
    """
    level_values: list[set[int]] = [{0}]
    for level in range(2 * n_param):
        weight = 2 ** (n_param - 1 - (level % n_param))
        level_values.append({v + b * weight for v in level_values[level] for b in (0, 1)})

    def name(level: int, value: int) -> str:
        return f"l{level}v{value}"

    states = [name(lv, v) for lv in range(2 * n_param + 1) for v in sorted(level_values[lv])]
    states.append("dead")
    transitions = {}
    accepting = set()
    for level in range(2 * n_param + 1):
        for v in level_values[level]:
            s = name(level, v)
            if level < 2 * n_param:
                weight = 2 ** (n_param - 1 - (level % n_param))
                transitions[(s, "0")] = name(level + 1, v)
                transitions[(s, "1")] = name(level + 1, v + weight)
                accepting.add(s)
            else:
                transitions[(s, "0")] = "dead"
                transitions[(s, "1")] = "dead"
                if v == 2 ** n_param - 1:
                    accepting.add(s)
    transitions[("dead", "0")] = "dead"
    transitions[("dead", "1")] = "dead"
    return Dfa(
        states=tuple(states),
        alphabet=("0", "1"),
        transitions=transitions,
        initial=name(0, 0),
        accepting=frozenset(accepting),
    )


def dfa_zero_imbalance_tracking(n_param: int) -> Dfa:
    """Prefix tracking DFA for the zero-imbalance language restricted to {0, 1}."""

    def name(length: int, zeros: int) -> str:
        return f"l{length}z{zeros}"

    states = [name(l, z) for l in range(n_param + 1) for z in range(l + 1)]
    states.append("dead")
    transitions = {}
    accepting = set()
    for l in range(n_param + 1):
        for z in range(l + 1):
            s = name(l, z)
            if l < n_param:
                transitions[(s, "0")] = name(l + 1, z + 1)
                transitions[(s, "1")] = name(l + 1, z)
                accepting.add(s)
            else:
                transitions[(s, "0")] = "dead"
                transitions[(s, "1")] = "dead"
                if z != n_param // 2:
                    accepting.add(s)
    transitions[("dead", "0")] = "dead"
    transitions[("dead", "1")] = "dead"
    return Dfa(
        states=tuple(states),
        alphabet=("0", "1"),
        transitions=transitions,
        initial=name(0, 0),
        accepting=frozenset(accepting),
    )


def minimal_dfa_size(d: Dfa) -> int:
    """Number of states of the minimal DFA: reachable trim, then partition refinement."""
    reachable = {d.initial}
    stack = [d.initial]
    while stack:
        q = stack.pop()
        for a in d.alphabet:
            nxt = d.transitions[(q, a)]
            if nxt not in reachable:
                reachable.add(nxt)
                stack.append(nxt)

    accepting = frozenset(q for q in reachable if q in d.accepting)
    others = frozenset(reachable - accepting)
    partition = {p for p in (accepting, others) if p}
    worklist = set(partition)
    while worklist:
        splitter = worklist.pop()
        for a in d.alphabet:
            into = {q for q in reachable if d.transitions[(q, a)] in splitter}
            for block in list(partition):
                inside = block & into
                outside = block - into
                if inside and outside:
                    partition.remove(block)
                    partition.add(frozenset(inside))
                    partition.add(frozenset(outside))
                    if block in worklist:
                        worklist.remove(block)
                        worklist.add(frozenset(inside))
                        worklist.add(frozenset(outside))
                    else:
                        worklist.add(min(frozenset(inside), frozenset(outside), key=len))
    return len(partition)


def fact2_witness(m: MoQfa, s, sigma: str, tol: float = 1e-9, cap: int = 100_000) -> int:
    """Smallest k >= 1 with |prob(s sigma^k) - prob(s)| <= tol.

    For measure-once automata such a k always exists because unitary
    powers return arbitrarily close to the identity; it is what makes
    prefix-closed languages out of reach for this model.  Rational
    rotations return exactly (k = rotation order); irrational ones at
    tight tolerances may exceed ``cap``, which is reported, not hidden.
    """
    if sigma not in m.alphabet:
        raise ValueError(f"symbol {sigma!r} not in alphabet")
    base = mo_accept_prob(m, s)
    v = np.asarray(m.initial, dtype=complex)
    for sym in s:
        v = m.unitaries[sym] @ v
    u = m.unitaries[sigma]
    for k in range(1, cap + 1):
        v = u @ v
        if abs(projected_norm_sq(m.accepting, v) - base) <= tol:
            return k
    raise FixtureSearchError(f"no probability return within {cap} repetitions at tol {tol}")
