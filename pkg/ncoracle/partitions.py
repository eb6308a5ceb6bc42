"""Non-crossing set partitions and pairings of {0, …, n−1}."""

import math
from dataclasses import dataclass
from functools import lru_cache

from config import NC2_MAX_N, NC_MAX_N
from errors import DomainError, SizeGuardError


@dataclass(frozen=True)
class SetPartition:
    """Blocks are sorted tuples of positions, ordered by their smallest element."""

    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(sorted((tuple(sorted(b)) for b in self.blocks), key=lambda b: b[0]))
        seen = [x for b in blocks for x in b]
        if any(len(b) == 0 for b in blocks) or sorted(seen) != list(range(self.n)):
            raise DomainError(f"blocks {self.blocks} do not partition range({self.n})")
        object.__setattr__(self, "blocks", blocks)

    @property
    def block_sizes(self) -> list[int]:
        return [len(b) for b in self.blocks]

    @property
    def is_pairing(self) -> bool:
        return all(len(b) == 2 for b in self.blocks)

    @property
    def is_crossing(self) -> bool:
        """True iff some a < c < b < d has a, b in one block and c, d in another."""
        label = [0] * self.n
        for idx, block in enumerate(self.blocks):
            for x in block:
                label[x] = idx
        for block in self.blocks:
            for a, b in zip(block, block[1:]):
                for c in range(a + 1, b):
                    other = label[c]
                    if other != label[a] and self.blocks[other][-1] > b:
                        return True
        return False


def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


@lru_cache(maxsize=None)
def _nc_shapes(length: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """All NC partitions of range(length) as tuples of blocks."""
    if length == 0:
        return ((),)
    shapes = []
    rest = range(1, length)
    for mask in range(1 << (length - 1)):
        block = (0,) + tuple(x for i, x in enumerate(rest) if mask >> i & 1)
        bounds = list(block) + [length]
        gaps = [(lo + 1, hi) for lo, hi in zip(bounds, bounds[1:]) if hi > lo + 1]
        partials = [(block,)]
        for lo, hi in gaps:
            partials = [
                done + tuple(tuple(x + lo for x in b) for b in inner)
                for done in partials
                for inner in _nc_shapes(hi - lo)
            ]
        shapes.extend(partials)
    return tuple(shapes)


@lru_cache(maxsize=None)
def _nc2_shapes(length: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """All non-crossing pairings of range(length); 0 pairs with an odd position j."""
    if length == 0:
        return ((),)
    shapes = []
    for j in range(1, length, 2):
        for inside in _nc2_shapes(j - 1):
            for outside in _nc2_shapes(length - j - 1):
                shapes.append(
                    ((0, j),)
                    + tuple(tuple(x + 1 for x in b) for b in inside)
                    + tuple(tuple(x + j + 1 for x in b) for b in outside)
                )
    return tuple(shapes)


def enumerate_nc(n: int) -> list[SetPartition]:
    if not 1 <= n <= NC_MAX_N:
        raise SizeGuardError(f"enumerate_nc supports 1 <= n <= {NC_MAX_N}, got {n}")
    return [SetPartition(n, blocks) for blocks in _nc_shapes(n)]


def enumerate_nc2(n: int) -> list[SetPartition]:
    if n % 2:
        raise DomainError(f"pairings need an even ground set, got n={n}")
    if not 0 <= n <= NC2_MAX_N:
        raise SizeGuardError(f"enumerate_nc2 supports n <= {NC2_MAX_N}, got {n}")
    return [SetPartition(n, blocks) for blocks in _nc2_shapes(n)]


class _UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def joins_to_full(partition: SetPartition, interval: int) -> bool:
    """π ∨ σ = 1̂ where σ cuts {0, …, n−1} into consecutive intervals of the given length."""
    if interval < 1 or partition.n % interval:
        raise DomainError(f"interval length {interval} does not divide n={partition.n}")
    uf = _UnionFind(partition.n)
    for block in partition.blocks:
        for x in block[1:]:
            uf.union(block[0], x)
    for start in range(0, partition.n, interval):
        for x in range(start + 1, start + interval):
            uf.union(start, x)
    root = uf.find(0)
    return all(uf.find(x) == root for x in range(partition.n))


def is_parity_respecting(pairing: SetPartition) -> bool:
    """Every pair joins an even and an odd position."""
    return all((b[1] - b[0]) % 2 == 1 for b in pairing.blocks)


def all_pairings_parity_respecting(n: int) -> bool:
    return all(is_parity_respecting(pi) for pi in enumerate_nc2(n))
