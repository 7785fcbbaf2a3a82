from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache


@dataclass(frozen=True)
class Permutation:
    """A bijection of {1..n}, stored as the image sequence (sigma(1), ..., sigma(n))."""

    images: tuple

    def __post_init__(self):
        n = len(self.images)
        if sorted(self.images) != list(range(1, n + 1)):
            raise ValueError(f"{self.images} is not a permutation of 1..{n}")

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    @property
    def sign(self) -> int:
        inv = sum(1 for a, b in itertools.combinations(self.images, 2) if a > b)
        return -1 if inv % 2 else 1

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, s in enumerate(self.images, start=1):
            inv[s - 1] = i
        return Permutation(tuple(inv))

    def __mul__(self, other: "Permutation") -> "Permutation":
        """(self * other)(i) = self(other(i))."""
        if other.n != self.n:
            raise ValueError("permutation sizes differ")
        return Permutation(tuple(self(other(i)) for i in range(1, self.n + 1)))

    def extend(self, r: int) -> "Permutation":
        """Act as the identity on r extra trailing points."""
        return Permutation(self.images + tuple(range(self.n + 1, self.n + r + 1)))

    def shift(self, k: int) -> "Permutation":
        """Act on {k+1..k+n}, fixing the first k points."""
        return Permutation(tuple(range(1, k + 1)) + tuple(s + k for s in self.images))

    def __repr__(self):
        return f"Permutation{self.images}"


def identity(n: int) -> Permutation:
    return Permutation(tuple(range(1, n + 1)))


def transposition(n: int, i: int, j: int) -> Permutation:
    images = list(range(1, n + 1))
    images[i - 1], images[j - 1] = j, i
    return Permutation(tuple(images))


def sigma_pq(p: int, q: int) -> Permutation:
    """1..p -> q+1..q+p and p+1..p+q -> 1..q."""
    return Permutation(tuple(q + i for i in range(1, p + 1)) + tuple(range(1, q + 1)))


def sigma_pq_r(p: int, q: int, r: int) -> Permutation:
    """sigma_pq acting on the first p+q points, identity on the last r."""
    return sigma_pq(p, q).extend(r)


def move_last(n: int, i: int) -> Permutation:
    """Send slot i to position n, keeping the order of the others."""
    images = []
    for k in range(1, n + 1):
        if k < i:
            images.append(k)
        elif k == i:
            images.append(n)
        else:
            images.append(k - 1)
    return Permutation(tuple(images))


@lru_cache(maxsize=None)
def all_permutations(n: int) -> tuple[Permutation, ...]:
    return tuple(Permutation(tuple(p)) for p in itertools.permutations(range(1, n + 1)))
