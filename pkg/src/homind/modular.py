"""Prime fields, primality testing, prime sampling, and size bounds.

The randomized decision procedure works modulo primes drawn from a range
``(L, L**2]`` whose lower end ``L = N * ceil(log2 n)`` grows out of an
explicit bound ``N`` on the dimension of the vector spaces the closure
computation can build:

* treewidth variant:   ``N = max(k**(2*C*n**k), 2*C*n**k)``
* pathwidth variant:   ``N = 2*C*n**k + k - 1``
* Lasserre variant:    ``N = 2*t * 4**(n**(2*t))``

where ``n`` bounds the order of the two input graphs, ``k`` is the label
arity, ``C`` the automaton state count, and ``t`` the Lasserre level.  Any
difference between two homomorphism counts is an integer of magnitude at
most ``n**N``, so a single uniformly random prime in ``(L, L**2]`` divides
it with probability at most 1/2; running ``ceil(4*log2 L)`` independent
trials pushes the one-sided error below ``2**-trials`` (a prime in that
range exceeds ``L``, at most ``N * log2(n)`` prime factors fit into
``n**N``, and the range holds at least twice that many primes).

The deterministic pathwidth mode replaces sampling by the Chinese remainder
theorem: the smallest primes ``2, 3, 5, ...`` whose product exceeds
``n**N`` jointly detect any nonzero difference of counts.

All randomness flows through an explicit, seedable generator (xoshiro256**
seeded through splitmix64) so identical seeds reproduce identical runs
bit for bit; nothing in this module touches ambient RNG state.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "Xoshiro256StarStar",
    "FieldElement",
    "Bounds",
    "BoundOverflow",
    "splitmix64",
    "derive_seed",
    "is_prime",
    "sample_prime_in_range",
    "bound_tw",
    "bound_pw",
    "bound_lasserre",
    "smallest_primes_with_product_exceeding",
    "ceil_log2",
]

_MASK64 = (1 << 64) - 1


def splitmix64(state: int) -> tuple[int, int]:
    """One step of the splitmix64 sequence: returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    z = z ^ (z >> 31)
    return state, z


def derive_seed(master_seed: int, index: int) -> int:
    """Deterministically derive an independent child seed from a master seed.

    Used to give each trial of the randomized procedure its own generator:
    trial i uses ``Xoshiro256StarStar(derive_seed(seed, i))``, so trials are
    reproducible individually and insensitive to evaluation order.
    """
    state = (master_seed ^ (0xA3EC647659359ACD * (index + 1))) & _MASK64
    state, a = splitmix64(state)
    _, b = splitmix64(state)
    return (a << 32 | b >> 32) & _MASK64


class Xoshiro256StarStar:
    """xoshiro256** generator with splitmix64 seeding.

    Pure-Python and platform independent: the same seed yields the same
    stream everywhere, which is what makes ``--seed`` reproduce whole runs.
    """

    def __init__(self, seed: int):
        self.seed = seed & _MASK64
        state = self.seed
        s = []
        for _ in range(4):
            state, out = splitmix64(state)
            s.append(out)
        if not any(s):  # all-zero state is the one forbidden configuration
            s[0] = 1
        self._s = s

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = ((s1 * 5) & _MASK64)
        result = (((result << 7) | (result >> 57)) & _MASK64)
        result = (result * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & _MASK64
        self._s = [s0, s1, s2, s3]
        return result

    def randbits(self, bits: int) -> int:
        """Uniform integer in [0, 2**bits), any bit width."""
        if bits <= 0:
            return 0
        words = (bits + 63) // 64
        value = 0
        for _ in range(words):
            value = (value << 64) | self.next_u64()
        return value >> (words * 64 - bits)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection sampling."""
        if n <= 0:
            raise ValueError("randbelow requires n >= 1")
        bits = (n - 1).bit_length()
        while True:
            value = self.randbits(bits)
            if value < n:
                return value

    def randrange(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi)."""
        if hi <= lo:
            raise ValueError("empty range")
        return lo + self.randbelow(hi - lo)

    def shuffle(self, items: list) -> None:
        """Fisher-Yates shuffle in place."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def choice(self, items):
        if not items:
            raise ValueError("empty sequence")
        return items[self.randbelow(len(items))]


@dataclass(frozen=True)
class FieldElement:
    """An element of the prime field F_p, always reduced to [0, p).

    The closure engine works on raw residues in bulk arrays for speed; this
    class is the reference arithmetic the bulk paths are tested against.
    """

    value: int
    p: int

    def __post_init__(self):
        if self.p < 2:
            raise ValueError("modulus must be at least 2")
        object.__setattr__(self, "value", self.value % self.p)

    def _check(self, other: "FieldElement") -> None:
        if self.p != other.p:
            raise ValueError("mixed moduli: %d vs %d" % (self.p, other.p))

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.value + other.value, self.p)

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.value - other.value, self.p)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.value * other.value, self.p)

    def __neg__(self) -> "FieldElement":
        return FieldElement(-self.value, self.p)

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise ZeroDivisionError("inverse of zero in F_%d" % self.p)
        return FieldElement(pow(self.value, -1, self.p), self.p)

    def __pow__(self, exponent: int) -> "FieldElement":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return FieldElement(pow(self.value, exponent, self.p), self.p)


_SMALL_PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61,
    67, 71, 73, 79, 83, 89, 97,
)

# Deterministic Miller-Rabin witnesses: this set is exact for all n < 2**64.
_MR_WITNESSES_64 = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _miller_rabin_round(n: int, d: int, r: int, base: int) -> bool:
    """One Miller-Rabin round; True means "possibly prime"."""
    base %= n
    if base == 0:
        return True
    x = pow(base, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(r - 1):
        x = (x * x) % n
        if x == n - 1:
            return True
    return False


def is_prime(p: int) -> bool:
    """Primality test.

    Exact for p < 2**64 (deterministic Miller-Rabin over the witness set
    {2,3,5,7,...,37}).  Above 2**64 it runs 64 Miller-Rabin rounds with
    bases derived deterministically from p itself, so the function stays
    pure; the error probability (at most 4**-64 per composite) is
    negligible against the 2**-trials error budget of the randomized
    decision procedure that consumes these primes.
    """
    if p < 2:
        return False
    for q in _SMALL_PRIMES:
        if p == q:
            return True
        if p % q == 0:
            return False
    d = p - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    if p < (1 << 64):
        witnesses = _MR_WITNESSES_64
    else:
        state = (p & _MASK64) ^ 0xD6E8FEB86659FD93
        drawn = []
        while len(drawn) < 64:
            state, out = splitmix64(state)
            base = 2 + out % (p - 3)
            drawn.append(base)
        witnesses = drawn
    for base in witnesses:
        if not _miller_rabin_round(p, d, r, base):
            return False
    return True


def sample_prime_in_range(L: int, rng: Xoshiro256StarStar):
    """Draw a uniform integer from (L, L**2] and return it if prime.

    Returns the drawn prime, or None to report a miss (the draw was
    composite).  The caller's trial loop absorbs misses: each trial simply
    counts as a failure to find a certifying prime, which only makes the
    procedure more conservative.
    """
    if L < 2:
        raise ValueError("sample_prime_in_range requires L >= 2")
    draw = rng.randrange(L + 1, L * L + 1)
    if is_prime(draw):
        return draw
    return None


class BoundOverflow(Exception):
    """The requested bound would have more bits than the configured cap."""


@dataclass(frozen=True)
class Bounds:
    """Size bound N, trial-range base L = N*max(1, ceil(log2 n)), and the
    number of randomized trials ceil(4*log2 L)."""

    N: int
    L: int
    trials: int


def ceil_log2(n: int) -> int:
    """ceil(log2 n) for n >= 1."""
    if n < 1:
        raise ValueError("ceil_log2 requires n >= 1")
    return (n - 1).bit_length()


def _make_bounds(N: int, n: int) -> Bounds:
    # For n = 1, ceil(log2 n) = 0 would collapse L below N and break the
    # invariant L >= N; clamp the factor to 1 (a larger L is always sound).
    L = N * max(1, ceil_log2(n))
    # ceil(4*log2 L) == bit_length(L**4 - 1):  4*log2(L) <= x  iff  L**4 <= 2**x.
    trials = (L ** 4 - 1).bit_length()
    return Bounds(N=N, L=L, trials=trials)


def _checked_power(base: int, exponent: int, bit_cap: int) -> int:
    """base**exponent, refusing (BoundOverflow) if the result needs more
    than bit_cap bits; the check runs before materializing the power."""
    if base < 1 or exponent < 0:
        raise ValueError("power arguments out of range")
    if base == 1 or exponent == 0:
        return 1
    blen = base.bit_length()
    # 2**(blen-1) <= base < 2**blen bounds the result's bit length in
    # [exponent*(blen-1) + 1, exponent*blen + 1].
    low = exponent * (blen - 1) + 1
    high = exponent * blen + 1
    if low > bit_cap:
        raise BoundOverflow(
            "bound needs at least %d bits, cap is %d" % (low, bit_cap)
        )
    if high <= bit_cap:
        return base ** exponent
    value = base ** exponent
    if value.bit_length() > bit_cap:
        raise BoundOverflow(
            "bound needs %d bits, cap is %d" % (value.bit_length(), bit_cap)
        )
    return value


DEFAULT_BIT_CAP = 1 << 20


def bound_tw(n: int, k: int, C: int, bit_cap: int = DEFAULT_BIT_CAP) -> Bounds:
    """Class-size bound for the treewidth variant: N = max(k**(2*C*n**k), 2*C*n**k).

    n bounds the order of either input graph, k is the label arity, C the
    automaton state count.  Raises BoundOverflow when N would exceed
    bit_cap bits (default 2**20).
    """
    if n < 1 or k < 1 or C < 1:
        raise ValueError("bound_tw requires n, k, C >= 1")
    e = 2 * C * n ** k
    N = max(_checked_power(k, e, bit_cap), e)
    if N.bit_length() > bit_cap:
        raise BoundOverflow(
            "bound needs %d bits, cap is %d" % (N.bit_length(), bit_cap)
        )
    return _make_bounds(N, n)


def bound_pw(n: int, k: int, C: int, bit_cap: int = DEFAULT_BIT_CAP) -> Bounds:
    """Class-size bound for the pathwidth variant: N = 2*C*n**k + k - 1."""
    if n < 1 or k < 1 or C < 1:
        raise ValueError("bound_pw requires n, k, C >= 1")
    N = 2 * C * n ** k + k - 1
    if N.bit_length() > bit_cap:
        raise BoundOverflow(
            "bound needs %d bits, cap is %d" % (N.bit_length(), bit_cap)
        )
    return _make_bounds(N, n)


def bound_lasserre(n: int, t: int, bit_cap: int = DEFAULT_BIT_CAP) -> Bounds:
    """Class-size bound for the Lasserre variant: N = 2*t * 4**(n**(2*t))."""
    if n < 1 or t < 1:
        raise ValueError("bound_lasserre requires n, t >= 1")
    e = n ** (2 * t)
    N = 2 * t * _checked_power(4, e, bit_cap)
    if N.bit_length() > bit_cap:
        raise BoundOverflow(
            "bound needs %d bits, cap is %d" % (N.bit_length(), bit_cap)
        )
    return _make_bounds(N, n)


def smallest_primes_with_product_exceeding(B: int) -> list[int]:
    """Smallest prefix of 2, 3, 5, ... whose product strictly exceeds B.

    The deterministic mode works modulo these primes: a nonzero integer of
    magnitude at most B cannot vanish modulo all of them at once.
    """
    if B < 1:
        raise ValueError("requires B >= 1")
    primes = []
    product = 1
    candidate = 2
    while product <= B:
        while not is_prime(candidate):
            candidate += 1
        primes.append(candidate)
        product *= candidate
        candidate += 1
    return primes
