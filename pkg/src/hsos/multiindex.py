"""Multi-index enumeration, graded-lex ranking and exact combinatorics.

Multi-indices are plain tuples of non-negative ints.  Within a fixed total
degree the canonical order is lexicographic with the largest leading exponent
first, so for n=2, M=3 the basis reads (3,0), (2,1), (1,2), (0,3).
"""

from __future__ import annotations

import math
from typing import Iterator, Sequence

MultiIndex = tuple[int, ...]


def degree(alpha: Sequence[int]) -> int:
    return sum(alpha)


def validate_index(alpha: Sequence[int]) -> MultiIndex:
    a = tuple(int(x) for x in alpha)
    if not a:
        raise ValueError("multi-index must have at least one entry")
    if any(x < 0 for x in a):
        raise ValueError(f"negative exponent in multi-index {a}")
    return a


def dim_homogeneous(n: int, M: int) -> int:
    """Number of degree-M monomials in n variables, C(M+n-1, n-1)."""
    if n < 1 or M < 0:
        raise ValueError(f"invalid (n, M) = ({n}, {M})")
    return math.comb(M + n - 1, n - 1)


def iter_degree(n: int, M: int) -> Iterator[MultiIndex]:
    if n < 1 or M < 0:
        raise ValueError(f"invalid (n, M) = ({n}, {M})")
    if n == 1:
        yield (M,)
        return
    for k in range(M, -1, -1):
        for rest in iter_degree(n - 1, M - k):
            yield (k,) + rest


def enumerate_degree(n: int, M: int) -> list[MultiIndex]:
    """All multi-indices of degree M in graded-lex order."""
    return list(iter_degree(n, M))


def rank_of(alpha: Sequence[int]) -> int:
    """Position of alpha within enumerate_degree(len(alpha), sum(alpha)).

    Computed combinatorially in O(n * degree) without materializing the list.
    """
    a = validate_index(alpha)
    n = len(a)
    rank = 0
    rem = sum(a)
    for i in range(n - 1):
        for k in range(rem, a[i], -1):
            rank += dim_homogeneous(n - 1 - i, rem - k)
        rem -= a[i]
    return rank


def factorial(k: int) -> int:
    if k < 0:
        raise ValueError("factorial of negative integer")
    return math.factorial(k)


def multinomial(alpha: Sequence[int]) -> int:
    """|alpha|! / alpha!, exact."""
    a = validate_index(alpha)
    out = factorial(sum(a))
    for x in a:
        out //= factorial(x)
    return out


def index_factorial(alpha: Sequence[int]) -> int:
    """alpha! = prod_i alpha_i!, exact."""
    a = validate_index(alpha)
    out = 1
    for x in a:
        out *= factorial(x)
    return out


def add(alpha: Sequence[int], beta: Sequence[int]) -> MultiIndex:
    if len(alpha) != len(beta):
        raise ValueError("multi-index length mismatch")
    return tuple(x + y for x, y in zip(alpha, beta))


def graded_lex_key(alpha: Sequence[int]):
    """Sort key realizing the canonical order across degrees."""
    a = tuple(alpha)
    return (sum(a), tuple(-x for x in a))
