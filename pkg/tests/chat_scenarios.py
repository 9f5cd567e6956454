"""Twelve scripted conversations with the chat-completions stub.

Each scenario returns normally when the client behaved as required and
raises AssertionError otherwise.
"""
from __future__ import annotations

import random

from stub_server import Reply, StubServer, completion

from pdftrans.translators import (
    CallStats,
    ChatConfig,
    ProtocolError,
    PromptTemplate,
    RetryPolicy,
    ServiceError,
    TranslateRequest,
    openai_chat_call,
    registry,
    render_prompt,
)

MESSAGES = [{"role": "user", "content": "Translate to Spanish: hello"}]


def _policy(sleeps: list[float]) -> RetryPolicy:
    return RetryPolicy(sleep=sleeps.append, rng=random.Random(0))


def _call(stub: StubServer, sleeps: list[float], stats: CallStats, **kw) -> str:
    cfg = ChatConfig(stub.base_url, "stub-model", "sk-test", retry=_policy(sleeps), **kw)
    return openai_chat_call(MESSAGES, cfg, stats=stats)


def _expect(exc_type, fn):
    try:
        fn()
    except exc_type as exc:
        return exc
    raise AssertionError(f"expected {exc_type.__name__}")


def request_body_shape() -> None:
    with StubServer([Reply(200, completion("hola"))]) as stub:
        stats = CallStats()
        assert _call(stub, [], stats) == "hola"
        (req,) = stub.requests
        assert req.path == "/v1/chat/completions"
        assert req.body == {"model": "stub-model", "messages": MESSAGES, "temperature": 0.0}
        assert req.headers["Authorization"] == "Bearer sk-test"
        assert req.headers["Content-Type"].startswith("application/json")


def retry_429_twice_then_ok() -> None:
    with StubServer([Reply(429, {"error": "slow down"}), Reply(429, {"error": "slow down"}), Reply(200, completion("hola"))]) as stub:
        stats, sleeps = CallStats(), []
        assert _call(stub, sleeps, stats) == "hola"
        assert len(stub.requests) == 3 and stats.attempts == 3 and stats.retries == 2
        # full jitter: retry k sleeps within [0, 1 * 2**(k-1)]
        assert len(sleeps) == 2 and 0 <= sleeps[0] <= 1 and 0 <= sleeps[1] <= 2


def retry_429_exhausted() -> None:
    with StubServer([Reply(429, {"error": "slow down"})]) as stub:
        stats = CallStats()
        exc = _expect(ServiceError, lambda: _call(stub, [], stats))
        assert exc.kind == "transient" and exc.status == 429
        assert len(stub.requests) == 3 and stats.attempts == 3


def server_error_then_ok() -> None:
    with StubServer([Reply(500, b"oops"), Reply(200, completion("bonjour"))]) as stub:
        stats = CallStats()
        assert _call(stub, [], stats) == "bonjour"
        assert len(stub.requests) == 2


def unavailable_exhausted() -> None:
    with StubServer([Reply(503, b"down")]) as stub:
        exc = _expect(ServiceError, lambda: _call(stub, [], CallStats()))
        assert exc.kind == "transient" and exc.status == 503
        assert len(stub.requests) == 3


def bad_request_not_retried() -> None:
    with StubServer([Reply(400, {"error": {"message": "bad model"}})]) as stub:
        sleeps: list[float] = []
        exc = _expect(ServiceError, lambda: _call(stub, sleeps, CallStats()))
        assert exc.kind == "permanent" and exc.status == 400
        assert len(stub.requests) == 1 and sleeps == []


def unauthorized_not_retried() -> None:
    with StubServer([Reply(401, {"error": "no key"})]) as stub:
        exc = _expect(ServiceError, lambda: _call(stub, [], CallStats()))
        assert exc.kind == "permanent" and exc.status == 401
        assert len(stub.requests) == 1


def missing_choices() -> None:
    with StubServer([Reply(200, {"id": "x", "object": "chat.completion"})]) as stub:
        _expect(ProtocolError, lambda: _call(stub, [], CallStats()))
        assert len(stub.requests) == 1


def malformed_json() -> None:
    with StubServer([Reply(200, b"{not json")]) as stub:
        _expect(ProtocolError, lambda: _call(stub, [], CallStats()))


def whitespace_trimmed_first_choice() -> None:
    with StubServer([Reply(200, completion("  hola mundo \n", extra_choices=2))]) as stub:
        assert _call(stub, [], CallStats()) == "hola mundo"


def timeout_is_transient() -> None:
    with StubServer([Reply(200, completion("late"), delay=0.6), Reply(200, completion("tarde"))]) as stub:
        stats = CallStats()
        assert _call(stub, [], stats, timeout=0.2) == "tarde"
        assert stats.attempts == 2


def chat_service_end_to_end() -> None:
    """The registered openai-like service renders the prompt and keeps placeholders."""
    with StubServer([Reply(200, completion("hola  mundo"))]) as stub:
        prompt = PromptTemplate(system="You translate.", examples=(("cat", "gato"),))
        svc = registry.create(
            "openai-like",
            {"base-url": stub.base_url + "/", "model": "m", "api-key": "k", "prompt": prompt, "retry": _policy([])},
        )
        req = TranslateRequest("hello  world", "en", "es")
        assert svc.translate(req) == "hola  mundo"
        (sent,) = stub.requests
        assert sent.path == "/v1/chat/completions"
        assert sent.body["messages"] == render_prompt(prompt, req)
        assert [m["role"] for m in sent.body["messages"]] == ["system", "user", "assistant", "user"]


SCENARIOS = {
    "request body shape": request_body_shape,
    "429 twice then 200": retry_429_twice_then_ok,
    "429 until attempts run out": retry_429_exhausted,
    "500 then 200": server_error_then_ok,
    "503 until attempts run out": unavailable_exhausted,
    "400 is permanent": bad_request_not_retried,
    "401 is permanent": unauthorized_not_retried,
    "body without choices": missing_choices,
    "body is not JSON": malformed_json,
    "first choice, trimmed": whitespace_trimmed_first_choice,
    "timeout retried": timeout_is_transient,
    "registered chat service": chat_service_end_to_end,
}
