"""Metropolis acceptance tests and the deterministic random streams behind them.

Two acceptance rules live here. ``exact_accept`` is the textbook real-valued
Boltzmann test ``exp(-dC/T) >= u``. ``fixed_accept`` is an integer-only
approximation of the same test: the uniform draw is a 24-bit integer, the
temperature is rescaled to base-2 units (``t_hat = T * ln 2``), and
``-log2(rand / 2^24)`` is approximated by the count of leading zeros of the
24-bit word. The resulting comparison ``dC < t_hat * clz(rand)`` needs no
exponentiation or division, which is the whole point.

All randomness is generated from a splitmix-style 64-bit counter generator so
that every stream is reproducible from a seed, cheap to fork per neuron, and
identical between the scalar and the vectorised code paths.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

MASK64 = (1 << 64) - 1

#: Weyl increment of the splitmix64 generator.
GOLDEN = 0x9E3779B97F4A7C15

#: Odd salt used to derive independent per-stream states from one master seed.
STREAM_SALT = 0xD1B54A32D192ED03

#: Stream index reserved for drawing random initial assignments.
INIT_STREAM = 1 << 32

RAND_BITS = 24
RAND_MAX = (1 << RAND_BITS) - 1

_G = np.uint64(GOLDEN)
_SALT = np.uint64(STREAM_SALT)
_C1 = np.uint64(0xBF58476D1CE4E5B9)
_C2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S40 = np.uint64(40)


def mix64(v: int) -> int:
    """Finalizer of splitmix64: bijective avalanche mix of a 64-bit word."""
    v &= MASK64
    v ^= v >> 30
    v = (v * 0xBF58476D1CE4E5B9) & MASK64
    v ^= v >> 27
    v = (v * 0x94D049BB133111EB) & MASK64
    v ^= v >> 31
    return v


def mix64_array(states: np.ndarray) -> np.ndarray:
    """Vectorised :func:`mix64` over a uint64 array."""
    z = states ^ (states >> _S30)
    z = z * _C1
    z ^= z >> _S27
    z = z * _C2
    z ^= z >> _S31
    return z


def stream_seed(seed: int, stream: int) -> int:
    """Derive the initial generator state for one numbered stream.

    ``stream_seed(seed, i)`` gives neuron ``i`` its private state; auxiliary
    consumers use indices at or above :data:`INIT_STREAM` so they can never
    collide with a neuron. The map is ``mix64(seed ^ (STREAM_SALT * (stream
    + 1)))``: the salt is odd, so distinct streams hit distinct states.
    """
    return mix64((seed & MASK64) ^ ((STREAM_SALT * (stream + 1)) & MASK64))


def stream_seed_array(seed: int, streams: np.ndarray) -> np.ndarray:
    """Vectorised :func:`stream_seed` for an array of stream indices."""
    s = streams.astype(np.uint64)
    return mix64_array(np.uint64(seed & MASK64) ^ (_SALT * (s + np.uint64(1))))


class Rng24:
    """Seedable generator of uniform 24-bit integers.

    One draw advances a 64-bit state by the golden-ratio increment and emits
    the top 24 bits of the finalised state. The sequence is a pure function
    of the seed.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next24(self) -> int:
        """Uniform integer in ``[0, 2^24 - 1]``."""
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state) >> 40

    def next_unit(self) -> float:
        """Uniform float in ``[0, 1)`` with 53 random mantissa bits."""
        self.state = (self.state + GOLDEN) & MASK64
        return (mix64(self.state) >> 11) * 2.0**-53

    def next_below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)`` as ``next24() % bound``.

        The modulo bias is below ``bound / 2^24``, irrelevant for the small
        ranges this serves (refractory spans, shuffle positions); using the
        24-bit draw keeps scalar and vectorised consumers on one code path.
        """
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        return self.next24() % bound


def rand24_stream(seed: int, count: int) -> np.ndarray:
    """First ``count`` draws of ``Rng24(seed)`` as one vectorised batch.

    splitmix64 is counter-based, so draw ``k`` is just the finalised value of
    ``seed + k * GOLDEN``; the result is bit-identical to ``count`` scalar
    ``next24()`` calls.
    """
    if count < 0:
        raise ValueError(f"count must be non-negative, got {count}")
    ks = np.arange(1, count + 1, dtype=np.uint64)
    states = np.uint64(seed & MASK64) + ks * _G
    return (mix64_array(states) >> _S40).astype(np.int64)


def advance24_array(states: np.ndarray, idx) -> np.ndarray:
    """Advance the selected per-stream states in place; return their draws.

    ``states`` is a ``uint64`` array of independent generator states and
    ``idx`` selects which streams draw this call (indices must be distinct).
    Each selected state takes one golden-ratio increment and emits the top
    24 bits of its finalised value, exactly matching a scalar ``next24()``
    on that stream. Returns an ``int64`` array aligned with ``idx``.
    """
    states[idx] += _G
    return (mix64_array(states[idx]) >> _S40).astype(np.int64)


def clz24(rand: int) -> int:
    """Count of leading zeros in the 24-bit representation of ``rand``.

    ``clz24(0)`` is defined as 24; callers that must never see that value
    short-circuit the zero draw first (see :func:`fixed_accept`).
    """
    if not 0 <= rand <= RAND_MAX:
        raise ValueError(f"rand must be a 24-bit value, got {rand}")
    return RAND_BITS - rand.bit_length()


def clz24_array(rands: np.ndarray) -> np.ndarray:
    """Vectorised :func:`clz24`. Exact: frexp on float64 is lossless below 2^53."""
    _, exp = np.frexp(rands.astype(np.float64))
    return RAND_BITS - exp.astype(np.int64)


def exact_accept(delta_c: float, temperature: float, u: float) -> bool:
    """Real-valued Metropolis test: accept iff ``exp(-delta_c / T) >= u``.

    A non-positive ``delta_c`` is always accepted. ``temperature`` must be
    strictly positive.
    """
    if temperature <= 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    if delta_c <= 0:
        return True
    return math.exp(-delta_c / temperature) >= u


def temp_to_that(temperature: float) -> int:
    """Map a real temperature to integer base-2 units: ``round(T * ln 2)``.

    Rounds half away from zero and clamps at zero, so ``t_hat == 0`` is the
    greedy limit.
    """
    return max(0, math.floor(temperature * math.log(2.0) + 0.5))


def fixed_accept(delta_c: int, t_hat: int, rand: int) -> bool:
    """Integer Metropolis test used by the parallel solver.

    Accepts when the cost decreases, when the draw is exactly zero, and
    otherwise iff ``delta_c < t_hat * clz24(rand)``. The two short-circuits
    keep the inequality path away from ``clz = 24``. Pure function of its
    three arguments; exact integer comparison throughout.
    """
    if not 0 <= rand <= RAND_MAX:
        raise ValueError(f"rand must be a 24-bit value, got {rand}")
    if delta_c < 0:
        return True
    if rand == 0:
        return True
    return delta_c < t_hat * clz24(rand)


def fixed_accept_probability(delta_c: int, t_hat: int) -> Fraction:
    """Exact acceptance probability of :func:`fixed_accept` under uniform draws.

    For ``delta_c >= 0``: of the ``2^24`` equally likely draws, the zero word
    always accepts, and the ``2^(23-k)`` words with ``clz = k`` (for ``k`` in
    ``[0, 23]``) accept iff ``t_hat * k > delta_c``. Returned as an exact
    rational with denominator ``2^24``.
    """
    if delta_c < 0:
        raise ValueError(f"delta_c must be non-negative, got {delta_c}")
    accepted = 1  # the rand == 0 word
    for k in range(RAND_BITS):
        if t_hat * k > delta_c:
            accepted += 1 << (23 - k)
    return Fraction(accepted, 1 << RAND_BITS)
