"""Binary-trie populations of fixed-length chromosomes.

A population is stored as a prefix tree with four node shapes: a leaf
(end of chromosome), a node with only a 0-edge, a node with only a 1-edge,
and a node with both.  Equal chromosomes therefore occupy one path, and
chromosomes sharing a prefix share the nodes of that prefix, which is what
makes per-prefix work during evaluation happen once instead of once per
member.  Trees are immutable: insert returns a new tree reusing every
untouched subtree.
"""

from __future__ import annotations

from dataclasses import dataclass

Chromosome = tuple[int, ...]


class Node:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Leaf(Node):
    pass


@dataclass(frozen=True, slots=True)
class Zero(Node):
    child: Node


@dataclass(frozen=True, slots=True)
class One(Node):
    child: Node


@dataclass(frozen=True, slots=True)
class ZeroOne(Node):
    zero: Node
    one: Node


LEAF = Leaf()


@dataclass(frozen=True, slots=True)
class PopulationTree:
    """Immutable population; depth is the chromosome length, root None = empty."""

    depth: int
    root: Node | None = None


def empty_tree(depth: int) -> PopulationTree:
    return PopulationTree(depth)


def _chain(bits: Chromosome, k: int) -> Node:
    node: Node = LEAF
    for b in reversed(bits[k:]):
        node = One(node) if b else Zero(node)
    return node


def _ins(node: Node, bits: Chromosome, k: int) -> Node:
    if isinstance(node, Leaf):
        return node  # duplicate member
    b = bits[k]
    if isinstance(node, Zero):
        if b == 0:
            return Zero(_ins(node.child, bits, k + 1))
        return ZeroOne(node.child, _chain(bits, k + 1))
    if isinstance(node, One):
        if b == 1:
            return One(_ins(node.child, bits, k + 1))
        return ZeroOne(_chain(bits, k + 1), node.child)
    if b == 0:
        return ZeroOne(_ins(node.zero, bits, k + 1), node.one)
    return ZeroOne(node.zero, _ins(node.one, bits, k + 1))


def insert(tree: PopulationTree, chromosome: Chromosome) -> PopulationTree:
    """Tree with the chromosome added; inserting a member again is a no-op."""
    if len(chromosome) != tree.depth:
        raise ValueError(
            "chromosome length %d does not match tree depth %d"
            % (len(chromosome), tree.depth)
        )
    if any(b not in (0, 1) for b in chromosome):
        raise ValueError("chromosome bits must be 0 or 1")
    if tree.root is None:
        return PopulationTree(tree.depth, _chain(chromosome, 0))
    return PopulationTree(tree.depth, _ins(tree.root, chromosome, 0))


def cardinality(tree: PopulationTree) -> int:
    """Number of distinct chromosomes stored."""

    def count(node: Node) -> int:
        if isinstance(node, Leaf):
            return 1
        if isinstance(node, ZeroOne):
            return count(node.zero) + count(node.one)
        return count(node.child)

    return 0 if tree.root is None else count(tree.root)


def contains(tree: PopulationTree, chromosome: Chromosome) -> bool:
    node = tree.root
    if node is None or len(chromosome) != tree.depth:
        return False
    for b in chromosome:
        if isinstance(node, Zero):
            if b != 0:
                return False
            node = node.child
        elif isinstance(node, One):
            if b != 1:
                return False
            node = node.child
        elif isinstance(node, ZeroOne):
            node = node.one if b else node.zero
        else:
            return False
    return isinstance(node, Leaf)


def members(tree: PopulationTree):
    """All chromosomes in 0-before-1 path order (i.e. sorted)."""

    def walk(node: Node, prefix: list[int]):
        if isinstance(node, Leaf):
            yield tuple(prefix)
            return
        if isinstance(node, ZeroOne):
            prefix.append(0)
            yield from walk(node.zero, prefix)
            prefix[-1] = 1
            yield from walk(node.one, prefix)
            prefix.pop()
            return
        bit = 1 if isinstance(node, One) else 0
        prefix.append(bit)
        yield from walk(node.child, prefix)
        prefix.pop()

    if tree.root is not None:
        yield from walk(tree.root, [])


def traverse_evaluate(tree: PopulationTree, rate):
    """Every member paired with the sum of rate(i, prefix of length 2i).

    rate is charged once per tree node sitting at an even depth, so members
    sharing a prefix share the rating of every gene pair inside it; the
    rating for a node happens after its subtree has been walked.
    """
    results: list[list] = []

    def walk(node: Node, prefix: tuple[int, ...]):
        if isinstance(node, Leaf):
            results.append([prefix, 0])
            mine = [len(results) - 1]
        elif isinstance(node, ZeroOne):
            mine = walk(node.zero, prefix + (0,))
            mine += walk(node.one, prefix + (1,))
        else:
            bit = 1 if isinstance(node, One) else 0
            mine = walk(node.child, prefix + (bit,))
        d = len(prefix)
        if d and d % 2 == 0:
            r = rate(d // 2, prefix)
            for k in mine:
                results[k][1] += r
        return mine

    if tree.root is not None:
        walk(tree.root, ())
    return [(chrom, total) for chrom, total in results]
