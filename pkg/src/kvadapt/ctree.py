"""Classification trees: binary trees of classifier words and access sequences.

An inner node carries a classifier ``e`` and two subtrees; a word ``w``
belongs on the ``hi`` (accepting) side when ``mq(w + e)`` holds and on the
``lo`` side otherwise. A leaf carries the access sequence of one hypothesis
state.

Trees are persistent values. Every editor returns a new tree and leaves the
receiver untouched; node references (plain integers) stay valid across edits
for all nodes that survive them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator, Optional, Union

from .errors import InputError, ParseError, StructuralError

MembershipOracle = Callable[[str], bool]
NodeRef = int


@dataclass(frozen=True)
class Leaf:
    access: str


@dataclass(frozen=True)
class Inner:
    classifier: str
    lo: NodeRef
    hi: NodeRef

    def child(self, outcome: bool) -> NodeRef:
        return self.hi if outcome else self.lo


class ClassificationTree:
    """Arena-backed classification tree.

    Build small trees with :meth:`leaf` and :meth:`node`::

        t = ClassificationTree.node("", ClassificationTree.leaf(""), ClassificationTree.leaf("a"))
    """

    __slots__ = ("_nodes", "_parents", "_root", "_next")

    def __init__(self, nodes, parents, root, next_id):
        self._nodes = nodes
        self._parents = parents
        self._root = root
        self._next = next_id

    # -- construction ---------------------------------------------------------

    @classmethod
    def leaf(cls, access: str = "") -> "ClassificationTree":
        return cls({0: Leaf(access)}, {0: None}, 0, 1)

    @classmethod
    def node(cls, classifier: str, lo: "ClassificationTree", hi: "ClassificationTree"):
        """Join two trees under a fresh inner node (ids are renumbered)."""
        return cls.from_nested(
            {"classifier": classifier, "lo": lo.to_nested(), "hi": hi.to_nested()}
        )

    @classmethod
    def from_nested(cls, obj) -> "ClassificationTree":
        """Build from the nested dict form; ids are assigned in pre-order."""
        nodes, parents = {}, {}
        seen = set()

        def build(o, parent):
            nid = len(nodes)
            nodes[nid] = None
            parents[nid] = parent
            if not isinstance(o, dict):
                raise ParseError(f"tree node must be an object, got {type(o).__name__}")
            if set(o) == {"access"} and isinstance(o["access"], str):
                if o["access"] in seen:
                    raise StructuralError(f"duplicate access sequence {o['access']!r}")
                seen.add(o["access"])
                nodes[nid] = Leaf(o["access"])
            elif set(o) == {"classifier", "lo", "hi"} and isinstance(o["classifier"], str):
                lo = build(o["lo"], (nid, False))
                hi = build(o["hi"], (nid, True))
                nodes[nid] = Inner(o["classifier"], lo, hi)
            else:
                raise ParseError(f"malformed tree node with keys {sorted(o)}")
            return nid

        build(obj, None)
        return cls(nodes, parents, 0, len(nodes))

    def to_nested(self, n: Optional[NodeRef] = None):
        node = self[self._root if n is None else n]
        if isinstance(node, Leaf):
            return {"access": node.access}
        return {
            "classifier": node.classifier,
            "lo": self.to_nested(node.lo),
            "hi": self.to_nested(node.hi),
        }

    # -- accessors --------------------------------------------------------------

    @property
    def root(self) -> NodeRef:
        return self._root

    def __getitem__(self, n: NodeRef) -> Union[Leaf, Inner]:
        try:
            return self._nodes[n]
        except KeyError:
            raise StructuralError(f"stale or unknown node reference {n!r}") from None

    def __contains__(self, n) -> bool:
        return n in self._nodes

    def __len__(self) -> int:
        return len(self._nodes)

    def __eq__(self, other):
        if not isinstance(other, ClassificationTree):
            return NotImplemented
        return self.to_nested() == other.to_nested()

    def __hash__(self):
        return hash(self.dumps())

    def __repr__(self):
        return f"ClassificationTree({self.to_nested()!r})"

    def is_leaf(self, n: NodeRef) -> bool:
        return isinstance(self[n], Leaf)

    def child(self, n: NodeRef, outcome: bool) -> Optional[NodeRef]:
        node = self[n]
        if isinstance(node, Leaf):
            return None
        return node.child(outcome)

    def children(self, n: NodeRef) -> tuple:
        node = self[n]
        if isinstance(node, Leaf):
            return ()
        return (node.lo, node.hi)

    def _preorder(self, n: NodeRef) -> Iterator[NodeRef]:
        stack = [n]
        while stack:
            m = stack.pop()
            yield m
            node = self._nodes[m]
            if isinstance(node, Inner):
                stack.append(node.hi)
                stack.append(node.lo)

    def nodes(self, n: Optional[NodeRef] = None) -> list:
        """All nodes of the (sub)tree in pre-order, ``lo`` before ``hi``."""
        start = self._root if n is None else n
        self[start]
        return list(self._preorder(start))

    def leaves(self, n: Optional[NodeRef] = None) -> list:
        """Leaves of the (sub)tree in pre-order."""
        start = self._root if n is None else n
        self[start]
        return [m for m in self._preorder(start) if isinstance(self._nodes[m], Leaf)]

    def n_leaves(self) -> int:
        return (len(self._nodes) + 1) // 2

    def label(self, n: NodeRef) -> str:
        node = self[n]
        return node.access if isinstance(node, Leaf) else node.classifier

    def access_sequences(self) -> list:
        return [self._nodes[m].access for m in self.leaves()]

    def find_leaf(self, access: str) -> Optional[NodeRef]:
        for m in self.leaves():
            if self._nodes[m].access == access:
                return m
        return None

    def parent(self, n: NodeRef) -> Optional[NodeRef]:
        self[n]
        link = self._parents[n]
        return None if link is None else link[0]

    def outcome(self, n: NodeRef) -> Optional[bool]:
        """Whether ``n`` is the hi-child (True) or lo-child (False) of its parent."""
        self[n]
        link = self._parents[n]
        return None if link is None else link[1]

    def depth(self, n: NodeRef) -> int:
        d = 0
        while (n := self.parent(n)) is not None:
            d += 1
        return d

    def ancestors(self, n: NodeRef) -> list:
        """``(ancestor, outcome)`` pairs from the parent of ``n`` up to the root."""
        out = []
        self[n]
        while (link := self._parents[n]) is not None:
            out.append(link)
            n = link[0]
        return out

    def lca(self, la: NodeRef, lb: NodeRef) -> NodeRef:
        """Lowest common ancestor of two distinct leaves."""
        if la == lb:
            raise InputError("lca needs two distinct leaves")
        if not (self.is_leaf(la) and self.is_leaf(lb)):
            raise InputError("lca is defined on leaves")
        above_a = {la} | {p for p, _ in self.ancestors(la)}
        n = lb
        while n not in above_a:
            n = self._parents[n][0]
        return n

    # -- editors ------------------------------------------------------------------

    def _copy(self) -> "ClassificationTree":
        return ClassificationTree(dict(self._nodes), dict(self._parents), self._root, self._next)

    def _attach(self, parent: Optional[NodeRef], outcome: Optional[bool], n: NodeRef):
        # in-place; only used on fresh copies
        self._parents[n] = None if parent is None else (parent, outcome)
        if parent is None:
            self._root = n
            return
        p = self._nodes[parent]
        self._nodes[parent] = Inner(p.classifier, n, p.hi) if not outcome else Inner(p.classifier, p.lo, n)

    def _drop(self, n: NodeRef, keep: Optional[NodeRef] = None):
        for m in list(self._preorder(n)):
            if keep is not None and m == keep:
                continue
            if keep is not None and self._is_under(m, keep):
                continue
            del self._nodes[m]
            del self._parents[m]

    def _is_under(self, m: NodeRef, top: NodeRef) -> bool:
        while m is not None:
            if m == top:
                return True
            link = self._parents.get(m)
            m = None if link is None else link[0]
        return False

    def _graft(self, sub: "ClassificationTree") -> NodeRef:
        offset = self._next
        for m, node in sub._nodes.items():
            if isinstance(node, Inner):
                node = Inner(node.classifier, node.lo + offset, node.hi + offset)
            self._nodes[m + offset] = node
            link = sub._parents[m]
            self._parents[m + offset] = None if link is None else (link[0] + offset, link[1])
        self._next = offset + sub._next
        return sub._root + offset

    def set_child(self, p: NodeRef, outcome: bool, n) -> "ClassificationTree":
        """Make ``n`` the ``outcome``-child of inner node ``p``.

        ``n`` is either another tree (grafted in with fresh ids) or a node of
        this tree, whose subtree is moved. The displaced child subtree is
        discarded.
        """
        if not isinstance(self[p], Inner):
            raise StructuralError("set_child needs an inner node")
        t = self._copy()
        old = t._nodes[p].child(outcome)
        if isinstance(n, ClassificationTree):
            new = t._graft(n)
            t._drop(old)
        else:
            self[n]
            # only a node from the displaced subtree can move, else the
            # result would not be a tree
            if not self._is_under(n, old):
                raise StructuralError("moved node must come from the displaced subtree")
            new = n
            t._drop(old, keep=n)
        t._attach(p, outcome, new)
        return t

    def set_label(self, leaf: NodeRef, access: str) -> "ClassificationTree":
        if not isinstance(self[leaf], Leaf):
            raise StructuralError("set_label needs a leaf")
        if self._nodes[leaf].access != access and self.find_leaf(access) is not None:
            raise StructuralError(f"access sequence {access!r} already present")
        t = self._copy()
        t._nodes[leaf] = Leaf(access)
        return t

    def remove_leaf(self, leaf: NodeRef) -> "ClassificationTree":
        """Delete ``leaf`` and its parent; the sibling takes the parent's place."""
        if not isinstance(self[leaf], Leaf):
            raise StructuralError("remove_leaf needs a leaf")
        parent = self.parent(leaf)
        if parent is None:
            raise StructuralError("cannot remove the only leaf")
        sibling = self.child(parent, not self.outcome(leaf))
        t = self._copy()
        link = t._parents[parent]
        del t._nodes[leaf], t._parents[leaf]
        del t._nodes[parent], t._parents[parent]
        if link is None:
            t._attach(None, None, sibling)
        else:
            t._attach(link[0], link[1], sibling)
        return t

    def split(self, leaf: NodeRef, access: str, classifier: str, outcome: bool):
        """Replace ``leaf`` by an inner node with classifier ``classifier``.

        The old leaf keeps its id and label; a new leaf labelled ``access``
        becomes the ``outcome``-child. Returns ``(tree, new_leaf_ref)``.
        """
        if not isinstance(self[leaf], Leaf):
            raise StructuralError("split needs a leaf")
        if self.find_leaf(access) is not None:
            raise StructuralError(f"access sequence {access!r} already present")
        t = self._copy()
        inner, new_leaf = t._next, t._next + 1
        t._next += 2
        link = t._parents[leaf]
        t._nodes[new_leaf] = Leaf(access)
        lo, hi = (leaf, new_leaf) if outcome else (new_leaf, leaf)
        t._nodes[inner] = Inner(classifier, lo, hi)
        t._parents[leaf] = (inner, not outcome)
        t._parents[new_leaf] = (inner, outcome)
        t._attach(None if link is None else link[0], None if link is None else link[1], inner)
        return t, new_leaf

    # -- serialization --------------------------------------------------------------

    def dumps(self) -> str:
        return json.dumps(self.to_nested(), ensure_ascii=False) + "\n"

    @classmethod
    def loads(cls, text: str) -> "ClassificationTree":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid tree JSON: {exc.msg}", exc.lineno, exc.colno) from None
        return cls.from_nested(obj)


def sift(tree: ClassificationTree, mq: MembershipOracle, word: str) -> NodeRef:
    """Leaf reached by descending with ``mq(word + classifier)`` at each inner node."""
    nodes = tree._nodes
    n = tree.root
    node = nodes[n]
    while isinstance(node, Inner):
        n = node.hi if mq(word + node.classifier) else node.lo
        node = nodes[n]
    return n


def minimize_tree(tree: ClassificationTree, mq: MembershipOracle) -> ClassificationTree:
    """Remove every leaf whose access sequence no longer sifts back to it.

    Leaves are visited in pre-order of a snapshot and each is sifted in the
    current, partially pruned tree. Passes repeat until one removes nothing,
    so every surviving leaf sifts to itself under ``mq``.
    """
    changed = True
    while changed and tree.n_leaves() > 1:
        changed = False
        for leaf in tree.leaves():
            if tree.n_leaves() == 1:
                break
            if sift(tree, mq, tree.label(leaf)) != leaf:
                tree = tree.remove_leaf(leaf)
                changed = True
    return tree


def invariant_violations(tree: ClassificationTree, mq: MembershipOracle) -> list:
    """``(leaf, ancestor)`` pairs where the leaf sits on the wrong side.

    For an ancestor with classifier ``e`` a leaf ``s`` below its hi-child must
    satisfy ``mq(s + e)`` and one below its lo-child must not.
    """
    bad = []
    for leaf in tree.leaves():
        s = tree.label(leaf)
        for anc, side in tree.ancestors(leaf):
            if mq(s + tree.label(anc)) != side:
                bad.append((leaf, anc))
    return bad


def save_tree(tree: ClassificationTree, path) -> None:
    Path(path).write_text(tree.dumps(), encoding="utf-8")


def load_tree(path) -> ClassificationTree:
    return ClassificationTree.loads(Path(path).read_text(encoding="utf-8"))
