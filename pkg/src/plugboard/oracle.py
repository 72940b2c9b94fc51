"""Reference implementations written directly against plain Python callables.

Nothing here touches graphs or the evaluators; these are the baselines the
graph calculus is checked against.
"""

from __future__ import annotations

from typing import Callable

from .errors import RangeError

ACK_MAX_M = 3
ACK_MAX_N = 5


def oracle_compose(f: Callable, g: Callable) -> Callable:
    return lambda x: g(f(x))


def oracle_iter(n: int, f: Callable) -> Callable:
    if n < 1:
        raise ValueError(f"iteration count must be positive, got {n}")

    def run(x):
        for _ in range(n):
            x = f(x)
        return x

    return run


def oracle_rec(a, c: Callable, k: int):
    """R(a)(c)(1) = a and R(a)(c)(k+1) = c(k)(R(a)(c)(k)), by plain recursion."""
    if k < 1:
        raise ValueError(f"recursion index must be positive, got {k}")
    if k == 1:
        return a
    return c(k - 1)(oracle_rec(a, c, k - 1))


def oracle_ackermann(m: int, n: int) -> int:
    """Standard 0-based Ackermann-Peter function for m <= 3, n <= 5."""
    if m < 0 or n < 0:
        raise RangeError(f"Ackermann arguments are natural numbers, got ({m}, {n})")
    if m > ACK_MAX_M or n > ACK_MAX_N:
        raise RangeError(f"Ackermann({m}, {n}) is outside the supported range m <= {ACK_MAX_M}, n <= {ACK_MAX_N}")
    memo = {}
    stack = [(m, n)]
    while stack:
        i, j = stack[-1]
        if (i, j) in memo:
            stack.pop()
            continue
        if i == 0:
            memo[(i, j)] = j + 1
            stack.pop()
        elif j == 0:
            if (i - 1, 1) in memo:
                memo[(i, j)] = memo[(i - 1, 1)]
                stack.pop()
            else:
                stack.append((i - 1, 1))
        elif (i, j - 1) not in memo:
            stack.append((i, j - 1))
        else:
            inner = memo[(i, j - 1)]
            if (i - 1, inner) in memo:
                memo[(i, j)] = memo[(i - 1, inner)]
                stack.pop()
            else:
                stack.append((i - 1, inner))
    return memo[(m, n)]


def ack1(m: int, n: int) -> int:
    """The 1-based shift: Ack1(m, n) = Ack(m-1, n-1) + 1."""
    if m < 1 or n < 1:
        raise RangeError(f"Ack1 takes positive numerals, got ({m}, {n})")
    return oracle_ackermann(m - 1, n - 1) + 1
