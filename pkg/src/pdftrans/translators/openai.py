"""Client for chat-completion endpoints that follow the OpenAI protocol."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Any

import httpx

from .errors import ProtocolError, ServiceError
from .retry import CallStats, RetryPolicy

logger = logging.getLogger(__name__)


@dataclass
class ChatConfig:
    base_url: str
    model: str
    api_key: str = ""
    temperature: float = 0.0
    timeout: float = 60.0
    retry: RetryPolicy = field(default_factory=RetryPolicy)


def _classify(resp: httpx.Response) -> ServiceError | None:
    code = resp.status_code
    if code == 429 or code >= 500:
        return ServiceError(f"HTTP {code}", "transient", code)
    if code >= 400:
        detail = resp.text[:200]
        return ServiceError(f"HTTP {code}: {detail}", "permanent", code)
    return None


def _content(resp: httpx.Response) -> str:
    try:
        data = resp.json()
    except (json.JSONDecodeError, ValueError) as exc:
        raise ProtocolError(f"response is not JSON: {resp.text[:100]!r}") from exc
    try:
        content = data["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError) as exc:
        raise ProtocolError(f"response has no choices[0].message.content: {str(data)[:200]}") from exc
    if not isinstance(content, str):
        raise ProtocolError("message content is not a string")
    return content.strip()


def openai_chat_call(
    messages: list[dict[str, str]],
    cfg: ChatConfig,
    client: httpx.Client | None = None,
    stats: CallStats | None = None,
) -> str:
    """POST ``messages`` to ``<base_url>/chat/completions``; returns the reply text."""
    url = cfg.base_url.rstrip("/") + "/chat/completions"
    body: dict[str, Any] = {"model": cfg.model, "messages": messages, "temperature": cfg.temperature}
    headers = {"Content-Type": "application/json"}
    if cfg.api_key:
        headers["Authorization"] = f"Bearer {cfg.api_key}"
    own = client is None
    http = client or httpx.Client(timeout=cfg.timeout)

    def attempt() -> str:
        try:
            resp = http.post(url, json=body, headers=headers, timeout=cfg.timeout)
        except httpx.TimeoutException as exc:
            raise ServiceError(f"timeout calling {url}", "transient") from exc
        except httpx.TransportError as exc:
            raise ServiceError(f"transport error calling {url}: {exc}", "transient") from exc
        err = _classify(resp)
        if err is not None:
            logger.debug("chat call failed: %s", err)
            raise err
        return _content(resp)

    try:
        return cfg.retry.run(attempt, stats)
    finally:
        if own:
            http.close()
