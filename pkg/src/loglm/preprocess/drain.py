"""Fixed-depth prefix-tree template miner.

Lines are routed first by token count, then by their leading tokens down to
a fixed depth; a token containing digits routes to the wildcard child, and a
full child set routes to a catch-all wildcard child.  Within a leaf, a line
merges into the most similar stored template when the token-wise similarity
reaches the threshold, turning every differing position into ``<*>``;
otherwise it becomes a new template.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

WILDCARD = "<*>"


@dataclass
class LogTemplate:
    """A mined message skeleton; wildcard positions hold the literal ``<*>``.

    ``template_id`` is a content hash of the tokens the template was created
    with, so it is stable across replays even though merges may later turn
    more positions into wildcards.  The token count never changes.
    """

    template_id: str
    tokens: list[str]
    match_count: int = 0

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


def _template_id(tokens: list[str]) -> str:
    return hashlib.sha1(" ".join(tokens).encode("utf-8")).hexdigest()[:16]


def _has_digit(token: str) -> bool:
    return any(ch.isdigit() for ch in token)


@dataclass
class _Node:
    children: dict[str, "_Node"] = field(default_factory=dict)
    templates: list[LogTemplate] = field(default_factory=list)


class DrainTree:
    """Mines templates from tokenized log content.

    Mutation is single-writer: call :meth:`insert` while mining, then treat
    the tree as immutable and share it freely for read-only :meth:`match`.
    """

    def __init__(self, depth: int = 4, similarity_threshold: float = 0.4, max_children: int = 100):
        if depth < 2:
            raise ValueError("depth must be >= 2")
        if not 0.0 < similarity_threshold <= 1.0:
            raise ValueError("similarity_threshold must be in (0, 1]")
        if max_children < 1:
            raise ValueError("max_children must be >= 1")
        self.depth = depth
        self.similarity_threshold = similarity_threshold
        self.max_children = max_children
        self._root: dict[int, _Node] = {}  # token count -> subtree
        self.templates: list[LogTemplate] = []  # creation order

    # Routing uses the first (depth - 2) tokens below the token-count level.
    @property
    def _prefix_len(self) -> int:
        return self.depth - 2

    def insert(self, content: str) -> LogTemplate:
        """Mine one line, returning the (new or merged) template."""
        tokens = content.split()
        if not tokens:
            raise ValueError("cannot mine empty content")
        leaf = self._route(tokens, create=True)
        assert leaf is not None
        best, best_sim = self._best_match(leaf, tokens)
        if best is not None and best_sim >= self.similarity_threshold:
            for i, (have, got) in enumerate(zip(best.tokens, tokens)):
                if have != got:
                    best.tokens[i] = WILDCARD
            best.match_count += 1
            return best
        template = LogTemplate(template_id=_template_id(tokens), tokens=list(tokens), match_count=1)
        leaf.templates.append(template)
        self.templates.append(template)
        return template

    def match(self, content: str) -> LogTemplate | None:
        """Read-only lookup against the mined templates; never mutates."""
        tokens = content.split()
        if not tokens:
            return None
        leaf = self._route(tokens, create=False)
        if leaf is None:
            return None
        best, best_sim = self._best_match(leaf, tokens)
        if best is not None and best_sim >= self.similarity_threshold:
            return best
        return None

    def _route(self, tokens: list[str], create: bool) -> _Node | None:
        node = self._root.get(len(tokens))
        if node is None:
            if not create:
                return None
            node = self._root[len(tokens)] = _Node()
        for token in tokens[: self._prefix_len]:
            step = self._child_key(node, token, create)
            child = node.children.get(step)
            if child is None:
                if not create:
                    return None
                child = node.children[step] = _Node()
            node = child
        return node

    def _child_key(self, node: _Node, token: str, create: bool) -> str:
        if _has_digit(token):
            return WILDCARD
        if token in node.children:
            return token
        if not create:
            # A literal miss falls back to the wildcard branch if one exists.
            return WILDCARD if WILDCARD in node.children else token
        if len(node.children) >= self.max_children:
            return WILDCARD
        return token

    @staticmethod
    def _similarity(template: LogTemplate, tokens: list[str]) -> float:
        same = sum(1 for have, got in zip(template.tokens, tokens) if have == got)
        return same / len(tokens)

    def _best_match(self, leaf: _Node, tokens: list[str]) -> tuple[LogTemplate | None, float]:
        best: LogTemplate | None = None
        best_sim = -1.0
        for template in leaf.templates:
            sim = self._similarity(template, tokens)
            if sim > best_sim:
                best, best_sim = template, sim
        return best, best_sim
