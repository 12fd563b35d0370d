"""Template-to-key registry: dense vocabulary indices for mined templates."""

from __future__ import annotations

from dataclasses import dataclass

from loglm.preprocess.drain import LogTemplate


@dataclass(frozen=True)
class LogKey:
    """A dense integer id for a mined template."""

    key_index: int
    template_id: str


class KeyRegistry:
    """Assigns dense key indices to templates in registration order.

    Registration is idempotent: the same ``template_id`` always resolves to
    the same index, so replaying a corpus reproduces the assignment exactly.
    """

    def __init__(self) -> None:
        self._index_of: dict[str, int] = {}
        self._templates: list[LogTemplate] = []

    def __len__(self) -> int:
        return len(self._index_of)

    def register(self, template: LogTemplate) -> LogKey:
        index = self._index_of.get(template.template_id)
        if index is None:
            index = len(self._templates)
            self._index_of[template.template_id] = index
            self._templates.append(template)
        return LogKey(key_index=index, template_id=template.template_id)

    def lookup(self, template_id: str) -> LogKey | None:
        index = self._index_of.get(template_id)
        if index is None:
            return None
        return LogKey(key_index=index, template_id=template_id)

    def template_at(self, key_index: int) -> LogTemplate:
        return self._templates[key_index]

    @property
    def templates(self) -> tuple[LogTemplate, ...]:
        return tuple(self._templates)
