"""Bundled services: three offline test services and the chat-protocol client."""
from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Any, Mapping

from .base import BaseTranslator, ServiceDescriptor, ServiceRegistry, TranslateRequest, registry
from .openai import ChatConfig, openai_chat_call
from .prompt import PromptTemplate, render_prompt
from .retry import CallStats, RetryPolicy

_WORD = re.compile(r"\w+", re.UNICODE)


class IdentityTranslator(BaseTranslator):
    descriptor = ServiceDescriptor("identity", "test", identity_class=True, description="returns the input")

    def do_translate(self, req: TranslateRequest) -> str:
        return req.text


class ReverserTranslator(BaseTranslator):
    """Reverses the string; placeholders are single scalars so they stay atomic."""

    descriptor = ServiceDescriptor("reverser", "test", identity_class=True, description="reverses characters")

    def do_translate(self, req: TranslateRequest) -> str:
        return req.text[::-1]


class DictionaryTranslator(BaseTranslator):
    """Replaces whole words found in a lexicon; others pass through."""

    descriptor = ServiceDescriptor(
        "dictionary",
        "test",
        optional_config=("lexicon", "lexicon-path"),
        identity_class=True,
        description="word-for-word lexicon lookup",
    )

    def __init__(self, config: Mapping[str, Any] | None = None) -> None:
        super().__init__(config)
        lexicon = dict(self.config.get("lexicon") or {})
        path = self.config.get("lexicon-path")
        if path:
            lexicon.update(json.loads(Path(path).read_text(encoding="utf-8")))
        self.lexicon = {str(k): str(v) for k, v in lexicon.items()}

    def do_translate(self, req: TranslateRequest) -> str:
        return _WORD.sub(lambda m: self.lexicon.get(m.group(0), m.group(0)), req.text)


class ChatTranslator(BaseTranslator):
    """Any endpoint speaking the OpenAI chat-completions protocol."""

    descriptor = ServiceDescriptor(
        "openai-like",
        "llm-chat",
        required_config=("base-url", "model", "api-key"),
        optional_config=("temperature", "timeout", "max-retries"),
        handles_retry=True,
        description="generic OpenAI-protocol chat endpoint",
    )

    def __init__(self, config: Mapping[str, Any] | None = None) -> None:
        super().__init__(config)
        self.prompt: PromptTemplate = self.config.pop("prompt", None) or PromptTemplate()
        self.client = self.config.pop("http-client", None)
        self.stats: CallStats | None = self.config.pop("stats", None)
        retry = self.config.pop("retry", None) or RetryPolicy(max_attempts=int(self.config.get("max-retries", 3)))
        self.chat = ChatConfig(
            base_url=str(self.config["base-url"]),
            model=str(self.config["model"]),
            api_key=str(self.config.get("api-key", "")),
            temperature=float(self.config.get("temperature", 0.0)),
            timeout=float(self.config.get("timeout", 60.0)),
            retry=retry,
        )

    def do_translate(self, req: TranslateRequest) -> str:
        return openai_chat_call(render_prompt(self.prompt, req), self.chat, self.client, self.stats)


# Well-known hosts that speak the same protocol; only the defaults differ.
CHAT_PRESETS: dict[str, dict[str, str]] = {
    "openai": {"base-url": "https://api.openai.com/v1", "model": "gpt-4o-mini"},
    "deepseek": {"base-url": "https://api.deepseek.com/v1", "model": "deepseek-chat"},
    "ollama": {"base-url": "http://localhost:11434/v1", "model": "gemma2", "api-key": "ollama"},
    "xinference": {"base-url": "http://localhost:9997/v1", "api-key": "xinference"},
    "groq": {"base-url": "https://api.groq.com/openai/v1"},
    "grok": {"base-url": "https://api.x.ai/v1", "model": "grok-2-1212"},
    "silicon": {"base-url": "https://api.siliconflow.cn/v1"},
    "zhipu": {"base-url": "https://open.bigmodel.cn/api/paas/v4", "model": "glm-4-flash"},
    "modelscope": {"base-url": "https://api-inference.modelscope.cn/v1"},
    "gemini": {"base-url": "https://generativelanguage.googleapis.com/v1beta/openai", "model": "gemini-1.5-flash"},
}


def _preset_factory(defaults: dict[str, str]):
    def factory(config: Mapping[str, Any]) -> BaseTranslator:
        return ChatTranslator({**defaults, **{k: v for k, v in config.items() if v not in (None, "")}})

    return factory


def register_builtins(target: ServiceRegistry) -> None:
    for cls in (IdentityTranslator, DictionaryTranslator, ReverserTranslator, ChatTranslator):
        target.register(cls.descriptor, cls)
    for name, defaults in CHAT_PRESETS.items():
        required = tuple(k for k in ChatTranslator.descriptor.required_config if k not in defaults)
        desc = ServiceDescriptor(
            name,
            "llm-chat",
            required_config=required,
            optional_config=tuple(k for k in ("base-url", "model", "api-key") if k in defaults)
            + ChatTranslator.descriptor.optional_config,
            handles_retry=True,
            description=f"OpenAI-protocol endpoint at {defaults['base-url']}",
        )
        target.register(desc, _preset_factory(defaults))


register_builtins(registry)
