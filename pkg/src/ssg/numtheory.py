from math import gcd, isqrt

from .errors import SearchExhausted, ValidationError

DEFAULT_PRIME_LIMIT = 10 ** 7


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for q in range(3, isqrt(n) + 1, 2):
        if n % q == 0:
            return False
    return True


def prime_factors(n: int) -> set:
    n = abs(n)
    out = set()
    q = 2
    while q * q <= n:
        while n % q == 0:
            out.add(q)
            n //= q
        q += 1
    if n > 1:
        out.add(n)
    return out


def dirichlet_primes(d: int, forbidden=(), limit: int = DEFAULT_PRIME_LIMIT):
    """Odd primes p, in increasing order, with 2|d| dividing p - 1."""
    if d == 0:
        raise ValidationError("d must be nonzero")
    step = 2 * abs(d)
    forbidden = set(forbidden)
    p = step + 1
    while p <= limit:
        if p > 2 and p not in forbidden and is_prime(p):
            yield p
        p += step
    raise SearchExhausted(f"no admissible prime <= {limit} for d={d}")


def dirichlet_prime(d: int, forbidden=(), limit: int = DEFAULT_PRIME_LIMIT) -> int:
    return next(dirichlet_primes(d, forbidden, limit))


def solve2_mod(M, rhs, p):
    """Solve the 2x2 system M v = rhs over Z/p; M must be invertible mod p."""
    (m11, m12), (m21, m22) = M
    det = (m11 * m22 - m12 * m21) % p
    if det == 0 or gcd(det, p) != 1:
        raise ValidationError("system is singular mod p")
    inv = pow(det, -1, p)
    r1, r2 = rhs
    v1 = (inv * (m22 * r1 - m12 * r2)) % p
    v2 = (inv * (-m21 * r1 + m11 * r2)) % p
    return v1, v2


def primitive(v):
    """Divide an integer vector by its content; first nonzero entry positive."""
    g = 0
    for x in v:
        g = gcd(g, x)
    if g == 0:
        raise ValidationError("zero vector")
    v = [x // g for x in v]
    lead = next(x for x in v if x != 0)
    if lead < 0:
        v = [-x for x in v]
    return tuple(v)
