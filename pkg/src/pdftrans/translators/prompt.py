"""Chat prompt templates with {lang_in}, {lang_out} and {text} variables."""
from __future__ import annotations

import hashlib
import json
import string
from dataclasses import dataclass, field
from pathlib import Path

from .base import TranslateRequest
from .errors import InvalidTemplate, UnknownVariable
from .languages import display_name

VARIABLES = ("lang_in", "lang_out", "text")

DEFAULT_TEMPLATE = (
    "Translate the following text from {lang_in} to {lang_out}. "
    "Characters from the Unicode private use area are placeholders for formulas: "
    "copy each of them unchanged to the matching place in the translation. "
    "Reply with the translation only.\n\n{text}"
)


def _fields(template: str) -> list[str]:
    try:
        return [f for _, f, _, _ in string.Formatter().parse(template) if f is not None]
    except ValueError as exc:
        raise InvalidTemplate(str(exc)) from exc


def _substitute(template: str, values: dict[str, str]) -> str:
    out = []
    for literal, name, spec, conv in string.Formatter().parse(template):
        out.append(literal)
        if name is None:
            continue
        if name not in values:
            raise UnknownVariable(name)
        if spec or conv:
            raise InvalidTemplate(f"format specs are not supported in {{{name}}}")
        out.append(values[name])
    return "".join(out)


@dataclass(frozen=True)
class PromptTemplate:
    template: str = DEFAULT_TEMPLATE
    system: str | None = None
    examples: tuple[tuple[str, str], ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        names = _fields(self.template)
        for name in names:
            if name not in VARIABLES:
                raise UnknownVariable(name)
        if names.count("text") != 1:
            raise InvalidTemplate("template must contain {text} exactly once")
        if self.system is not None:
            for name in _fields(self.system):
                if name not in ("lang_in", "lang_out"):
                    raise UnknownVariable(name)

    def digest(self) -> str:
        payload = json.dumps(
            {"template": self.template, "system": self.system, "examples": [list(e) for e in self.examples]},
            sort_keys=True,
            ensure_ascii=False,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def render_prompt(t: PromptTemplate, req: TranslateRequest) -> list[dict[str, str]]:
    """System message (optional), few-shot user/assistant pairs, final user turn."""
    langs = {"lang_in": display_name(req.lang_in), "lang_out": display_name(req.lang_out)}
    messages: list[dict[str, str]] = []
    if t.system is not None:
        messages.append({"role": "system", "content": _substitute(t.system, langs)})
    for source, target in t.examples:
        messages.append({"role": "user", "content": _substitute(t.template, {**langs, "text": source})})
        messages.append({"role": "assistant", "content": target})
    messages.append({"role": "user", "content": _substitute(t.template, {**langs, "text": req.text})})
    return messages


def load_prompt(path: str | Path) -> PromptTemplate:
    """Read a template file.

    ``.json`` files hold ``{"template", "system", "examples": [[src, tgt], ...]}``;
    anything else is taken as the bare user template.
    """
    p = Path(path)
    raw = p.read_text(encoding="utf-8")
    if p.suffix.lower() == ".json":
        data = json.loads(raw)
        return PromptTemplate(
            template=data.get("template", DEFAULT_TEMPLATE),
            system=data.get("system"),
            examples=tuple((str(a), str(b)) for a, b in data.get("examples", [])),
        )
    return PromptTemplate(template=raw)
