"""
algorithms/number_theory.py

Classical helpers for order finding: modular powers, continued-fraction
period recovery and the gcd step that turns a period into factors.
"""

from enum import Enum
from fractions import Fraction
from math import gcd
from typing import Iterator, Optional, Union


class ShorFailure(str, Enum):
    NO_INFORMATION = "no-information"
    NO_PERIOD = "no-period"
    ODD_PERIOD = "odd-period"
    TRIVIAL_ROOT = "a^{r/2}≡−1"
    TRIVIAL_GCD = "trivial-gcd"


def modpow(base: int, exponent: int, modulus: int) -> int:
    """Square-and-multiply (Python's three-argument pow)."""
    return pow(base, exponent, modulus)


def power_residues(base: int, modulus: int, count: int) -> list[int]:
    """[base^n mod modulus for n in range(count)]."""
    out = []
    value = 1 % modulus
    for _ in range(count):
        out.append(value)
        value = (value * base) % modulus
    return out


def multiplicative_order(base: int, modulus: int) -> int:
    """Smallest r > 0 with base^r ≡ 1; brute force, used as a test oracle."""
    if gcd(base, modulus) != 1:
        raise ValueError(f"{base} is not invertible mod {modulus}")
    value, r = base % modulus, 1
    while value != 1 % modulus:
        value = (value * base) % modulus
        r += 1
    return r


def convergents(numerator: int, denominator: int) -> Iterator[Fraction]:
    """Convergents of numerator/denominator, denominators increasing."""
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    num, den = numerator, denominator
    while den:
        a, rem = divmod(num, den)
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        yield Fraction(h, k)
        num, den = den, rem


def continued_fraction_period(y: int, q: int, composite: int, base: int) -> Optional[int]:
    """
    Recover the period from a sampled peak y of a register of size q.

    Takes the first convergent m/r′ of y/q (numerator nonzero, r′ ≤ composite)
    with |y/q − m/r′| ≤ 1/(2q), then returns the first multiple of r′ not
    exceeding `composite` with base^r ≡ 1. None when y carries no information
    or no multiple passes.
    """
    if not 0 <= y < q:
        raise ValueError(f"Sample {y} out of range for register size {q}")
    if y == 0:
        return None
    target = Fraction(y, q)
    bound = Fraction(1, 2 * q)
    candidate = None
    for c in convergents(y, q):
        if c.denominator > composite:
            break
        if c.numerator and abs(target - c) <= bound:
            candidate = c.denominator
            break
    if candidate is None:
        return None
    r = candidate
    while r <= composite:
        if modpow(base, r, composite) == 1:
            return r
        r += candidate
    return None


def factors_from_period(base: int, composite: int, r: int) -> Union[tuple[int, int], ShorFailure]:
    """gcd(a^{r/2} ± 1, N) when r is even and a^{r/2} ≢ −1."""
    if r % 2:
        return ShorFailure.ODD_PERIOD
    x = modpow(base, r // 2, composite)
    if x == composite - 1:
        return ShorFailure.TRIVIAL_ROOT
    for g in (gcd(x - 1, composite), gcd(x + 1, composite)):
        if 1 < g < composite:
            return tuple(sorted((g, composite // g)))
    return ShorFailure.TRIVIAL_GCD
