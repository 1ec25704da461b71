"""Deterministic instance generators.

Random instances use a self-contained xoshiro256** generator seeded through
splitmix64, so corpora are reproducible bit-for-bit from the seed alone (no
dependence on Python's random module internals).  The exact construction:

  * seeding: starting from the 64-bit seed, four successive splitmix64
    outputs become the xoshiro256** state s[0..3];
  * splitmix64 step: z = (x + 0x9E3779B97F4A7C15) mod 2^64, then
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9, z = (z ^ (z >> 27)) *
    0x94D049BB133111EB, output z ^ (z >> 31) (all mod 2^64);
  * xoshiro256** output: rotl(s[1] * 5, 7) * 9, followed by the standard
    state transition (t = s[1] << 17; s[2] ^= s[0]; s[3] ^= s[1];
    s[1] ^= s[2]; s[0] ^= s[3]; s[2] ^= t; s[3] = rotl(s[3], 45));
  * bounded draws in [0, n) use rejection below the largest multiple of n
    that fits in 2^64, then reduce modulo n.

The hardness gadget encodes 3-partition: a yes/no question about splitting
3n' integers into n' triples of equal sum K becomes a question about whether
a cheap flush schedule exists.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import DamParams, Flush, InstanceError, Schedule, TreeTopology, WormsInstance

_MASK = (1 << 64) - 1


def _splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return x, (z ^ (z >> 31)) & _MASK


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & _MASK


class Xoshiro256StarStar:
    """xoshiro256** with splitmix64 seeding; see the module docstring for
    the bit-exact definition."""

    def __init__(self, seed):
        state = []
        x = seed & _MASK
        for _ in range(4):
            x, out = _splitmix64(x)
            state.append(out)
        self.s = state

    def next_u64(self):
        s = self.s
        result = (_rotl((s[1] * 5) & _MASK, 7) * 9) & _MASK
        t = (s[1] << 17) & _MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def bounded(self, n):
        """Uniform integer in [0, n) by rejection sampling."""
        if n <= 0:
            raise ValueError("bounded() needs n >= 1")
        threshold = ((1 << 64) // n) * n
        while True:
            r = self.next_u64()
            if r < threshold:
                return r % n


@dataclass(frozen=True)
class GeneratorSpec:
    seed: int
    height: int
    fanout: int
    law: tuple  # ("constant", c) | ("uniform", a, b) | ("zipf", s) | ("total", n)
    B: int
    P: int

    def __post_init__(self):
        if self.height < 1:
            raise InstanceError("height must be >= 1")
        if self.fanout < 2:
            raise InstanceError("fanout must be >= 2")
        kind = self.law[0]
        if kind not in ("constant", "uniform", "zipf", "total"):
            raise InstanceError("unknown message law %r" % (kind,))


_ZIPF_SUPPORT = 64


def _draw_count(rng, law):
    kind = law[0]
    if kind == "constant":
        return law[1]
    if kind == "uniform":
        a, b = law[1], law[2]
        return a + rng.bounded(b - a + 1)
    # zipf over 1..64 with P(k) proportional to k^-s; weights and the
    # cumulative table are IEEE doubles evaluated left to right
    s = law[1]
    weights = [k ** -s for k in range(1, _ZIPF_SUPPORT + 1)]
    total = 0.0
    cum = []
    for w in weights:
        total += w
        cum.append(total)
    u = rng.next_u64() / 2.0 ** 64 * total
    for k, c in enumerate(cum, start=1):
        if u < c:
            return k
    return _ZIPF_SUPPORT


def generate_random(spec: GeneratorSpec) -> WormsInstance:
    """Complete tree of the given height and fanout; per-leaf message counts
    drawn from the law, leaves in ascending id order.  Identical specs give
    byte-identical instance documents.
    """
    parent = [None]
    level = [0]
    for _ in range(spec.height):
        nxt = []
        for v in level:
            for _ in range(spec.fanout):
                parent.append(v)
                nxt.append(len(parent) - 1)
        level = nxt
    leaves = level
    rng = Xoshiro256StarStar(spec.seed)
    targets = []
    if spec.law[0] == "total":
        # exactly n messages, each aimed at a uniformly drawn leaf
        for _ in range(spec.law[1]):
            targets.append(leaves[rng.bounded(len(leaves))])
    else:
        for leaf in leaves:
            for _ in range(_draw_count(rng, spec.law)):
                targets.append(leaf)
    if not targets:
        raise InstanceError("empty instance: the law produced zero messages")
    tree = TreeTopology(parent)
    return WormsInstance(tree, targets, DamParams(P=spec.P, B=spec.B))


@dataclass(frozen=True)
class GadgetResult:
    instance: WormsInstance
    C1: int
    C2: int
    X: int
    triple_leaves: tuple  # leaf node per input integer, in input order
    padding_paths: tuple  # (middle node, leaf node) per filler message


def generate_gadget_3partition(sizes, K) -> GadgetResult:
    """Instance whose optimal cost is at most C2 iff the 3-partition input
    (sizes, K) is a yes-instance.

    Tree: root, one hub child x with a leaf per input integer, plus one
    length-2 path per filler message.  The integer i contributes X+i
    messages to its leaf; a triple summing to K is exactly B = 3X+K
    messages, one full root flush.  Filler messages (one per filler leaf)
    pad the schedule so that any wasted step is unaffordable.
    """
    sizes = list(sizes)
    if len(sizes) % 3 != 0:
        raise InstanceError("need 3n' integers, got %d" % len(sizes))
    n_prime = len(sizes) // 3
    if sum(sizes) != n_prime * K:
        raise InstanceError("sizes sum to %d, expected n'K = %d"
                            % (sum(sizes), n_prime * K))
    for i in sizes:
        if not (K / 4 < i < K / 2):
            raise InstanceError("size %d outside (K/4, K/2)" % i)

    X = 12 * n_prime ** 2 * K
    B = 3 * X + K
    M1 = n_prime * K + 3 * n_prime * X
    C1 = sum(4 * (i - 1) * (3 * X + K) + 9 * X + 4 * K
             for i in range(1, n_prime + 1))
    M2 = 8 * n_prime * M1 + C1
    C2 = C1 + 4 * n_prime * M2 + sum(2 * i for i in range(1, M2 + 1))

    parent = [None, 0]           # 0 = root, 1 = hub x
    triple_leaves = []
    for _ in sizes:
        parent.append(1)
        triple_leaves.append(len(parent) - 1)
    padding = []
    for _ in range(M2):
        parent.append(0)
        mid = len(parent) - 1
        parent.append(mid)
        padding.append((mid, len(parent) - 1))

    targets = []
    for leaf, size in zip(triple_leaves, sizes):
        targets.extend([leaf] * (X + size))
    assert len(targets) == M1
    for _, leaf in padding:
        targets.append(leaf)

    tree = TreeTopology(parent)
    instance = WormsInstance(tree, targets, DamParams(P=1, B=B))
    return GadgetResult(instance, C1, C2, X, tuple(triple_leaves), tuple(padding))


def canonical_gadget_schedule(gadget: GadgetResult, partition) -> Schedule:
    """The cheap schedule certifying a yes-instance.

    partition lists n' triples of indices into the gadget's input sizes,
    each triple summing to K.  Per triple: one full flush root -> hub, then
    one flush per leaf; afterwards each filler message takes its two hops.
    """
    instance = gadget.instance
    by_leaf = {}
    for m, t in enumerate(instance.targets):
        by_leaf.setdefault(t, []).append(m)
    steps = []
    for triple in partition:
        batch = []
        for idx in triple:
            batch.extend(by_leaf[gadget.triple_leaves[idx]])
        if len(batch) != instance.params.B:
            raise InstanceError("triple %r does not sum to K" % (triple,))
        steps.append([Flush(0, 1, batch)])
        for idx in triple:
            leaf = gadget.triple_leaves[idx]
            steps.append([Flush(1, leaf, by_leaf[leaf])])
    for m, (mid, leaf) in enumerate(gadget.padding_paths):
        msg = by_leaf[leaf][0]
        steps.append([Flush(0, mid, [msg])])
        steps.append([Flush(mid, leaf, [msg])])
    return Schedule(steps)
