from __future__ import annotations

import json
import random
import subprocess
import sys
import threading
import time

import pytest
from chat_scenarios import SCENARIOS
from hypothesis import given, settings
from hypothesis import strategies as st
from language_table import LISTED_LANGUAGES

from pdftrans.translators import (
    LANGUAGES,
    BaseTranslator,
    CacheIoError,
    CallStats,
    DuplicateService,
    InvalidTemplate,
    MissingConfig,
    PromptTemplate,
    RateLimiter,
    RetryPolicy,
    ServiceDescriptor,
    ServiceError,
    ServiceRegistry,
    TranslateRequest,
    TranslationCache,
    TranslationClient,
    UnknownLanguage,
    UnknownService,
    UnknownVariable,
    cache_key,
    load_plugin,
    load_prompt,
    lookup_language,
    registry,
    render_prompt,
)
from pdftrans.translators.services import register_builtins

PUA = ""


def req(text: str, lang_in: str = "en", lang_out: str = "es", **options) -> TranslateRequest:
    return TranslateRequest(text, lang_in, lang_out, options)


# -- registry -----------------------------------------------------------------------------


def fresh_registry() -> ServiceRegistry:
    reg = ServiceRegistry()
    register_builtins(reg)
    return reg


def test_identity_constructible():
    svc = fresh_registry().create("identity")
    assert svc.translate(req(f"hola {PUA}")) == f"hola {PUA}"


def test_duplicate_service():
    reg = fresh_registry()
    with pytest.raises(DuplicateService):
        reg.register(ServiceDescriptor("identity", "test"), lambda c: None)


def test_missing_config_order():
    reg = fresh_registry()
    with pytest.raises(MissingConfig) as info:
        reg.create("openai-like", {"model": "m", "api-key": "k"})
    assert info.value.key == "base-url"
    with pytest.raises(MissingConfig) as info:
        reg.create("openai-like", {"base-url": "http://x"})
    assert info.value.key == "model"


def test_unknown_service_lists_names():
    with pytest.raises(UnknownService, match="identity"):
        fresh_registry().create("nosuch")


def test_presets_fill_defaults():
    svc = fresh_registry().create("deepseek", {"api-key": "sk"})
    assert svc.chat.base_url == "https://api.deepseek.com/v1"
    assert svc.chat.temperature == 0.0
    with pytest.raises(MissingConfig):
        fresh_registry().create("deepseek")


def test_same_language_rejected_unless_identity_class():
    reg = fresh_registry()
    with pytest.raises(ValueError):
        reg.create("openai-like", {"base-url": "http://x", "model": "m", "api-key": "k"}).translate(req("a", "en", "en"))
    assert reg.create("identity").translate(req("a", "en", "en")) == "a"


def test_empty_request_text_rejected():
    with pytest.raises(ValueError):
        req("")


# -- test services ------------------------------------------------------------------------------


def test_dictionary_service():
    svc = fresh_registry().create("dictionary", {"lexicon": {"hello": "hola"}})
    assert svc.translate(req(f"hello {PUA} world")) == f"hola {PUA} world"


def test_dictionary_from_file(tmp_path):
    path = tmp_path / "lex.json"
    path.write_text(json.dumps({"cat": "gato"}), encoding="utf-8")
    svc = fresh_registry().create("dictionary", {"lexicon-path": str(path)})
    assert svc.translate(req("the cat.")) == "the gato."


def test_reverser_service():
    svc = fresh_registry().create("reverser")
    assert svc.translate(req("abc")) == "cba"
    assert svc.translate(req(f"a{PUA}b")) == f"b{PUA}a"


def _brute_reverse(text: str) -> str:
    out = []
    for i in range(len(text) - 1, -1, -1):
        out.append(text[i])
    return "".join(out)


_masked = st.text(st.sampled_from(list("abc xyz.,") + [chr(0xE000 + k) for k in range(4)]), min_size=1, max_size=30)


@settings(max_examples=200)
@given(_masked, st.sampled_from(["identity", "reverser", "dictionary"]))
def test_placeholders_pass_through(text, name):
    svc = fresh_registry().create(name, {"lexicon": {"abc": "xyz"}} if name == "dictionary" else None)
    out = svc.translate(req(text))
    tokens = sorted(c for c in text if 0xE000 <= ord(c) <= 0xF8FF)
    assert sorted(c for c in out if 0xE000 <= ord(c) <= 0xF8FF) == tokens
    if name == "reverser":
        assert out == _brute_reverse(text)


# -- prompts ---------------------------------------------------------------------------------------


def test_default_prompt():
    (msg,) = render_prompt(PromptTemplate(), req("hi", "en", "es"))
    assert msg["role"] == "user"
    assert "hi" in msg["content"] and "English" in msg["content"] and "Spanish" in msg["content"]


def test_unknown_variable():
    with pytest.raises(UnknownVariable):
        PromptTemplate(template="{undefined} {text}")


@pytest.mark.parametrize("template", ["no text variable", "{text} and {text}", "{text:>10}", "{text"])
def test_invalid_templates(template):
    with pytest.raises((InvalidTemplate, UnknownVariable)):
        render_prompt(PromptTemplate(template=template), req("x"))


def test_few_shot_message_count():
    t = PromptTemplate(system="You translate {lang_in} to {lang_out}.", examples=(("a", "b"), ("c", "d")))
    msgs = render_prompt(t, req("hi"))
    assert len(msgs) == 6
    assert [m["role"] for m in msgs] == ["system", "user", "assistant", "user", "assistant", "user"]
    assert msgs[0]["content"] == "You translate English (US) to Spanish."


@given(st.text(min_size=1, max_size=40))
def test_rendered_prompt_contains_text_once(text):
    t = PromptTemplate(template="<<{text}>> to {lang_out}")
    (msg,) = render_prompt(t, req(text))
    assert msg["content"] == f"<<{text}>> to Spanish"


def test_load_prompt_files(tmp_path):
    plain = tmp_path / "p.txt"
    plain.write_text("Render in {lang_out}: {text}", encoding="utf-8")
    assert load_prompt(plain).template == "Render in {lang_out}: {text}"
    js = tmp_path / "p.json"
    js.write_text(json.dumps({"template": "{text}", "system": "sys", "examples": [["x", "y"]]}), encoding="utf-8")
    t = load_prompt(js)
    assert t.system == "sys" and t.examples == (("x", "y"),)


def test_prompt_digest_changes_with_content():
    assert PromptTemplate().digest() == PromptTemplate().digest()
    assert PromptTemplate().digest() != PromptTemplate(system="x").digest()


# -- OpenAI protocol -------------------------------------------------------------------------------


@pytest.mark.parametrize("name", list(SCENARIOS))
def test_chat_protocol(name):
    SCENARIOS[name]()


# -- retry and rate limiting -------------------------------------------------------------------------


def test_retry_bounds_and_backoff():
    sleeps: list[float] = []
    policy = RetryPolicy(max_attempts=4, sleep=sleeps.append, rng=random.Random(1))
    stats = CallStats()
    calls = []

    def flaky():
        calls.append(1)
        raise ServiceError("busy", "transient")

    with pytest.raises(ServiceError):
        policy.run(flaky, stats)
    assert len(calls) == 4 and stats.attempts == 4 and stats.retries == 3
    for k, s in enumerate(sleeps, 1):
        assert 0 <= s <= 2 ** (k - 1)


def test_permanent_error_not_retried():
    policy = RetryPolicy(sleep=lambda s: None)
    calls = []

    def broken():
        calls.append(1)
        raise ServiceError("no", "permanent")

    with pytest.raises(ServiceError):
        policy.run(broken)
    assert calls == [1]


class FakeClock:
    def __init__(self) -> None:
        self.now = 0.0

    def __call__(self) -> float:
        return self.now

    def sleep(self, d: float) -> None:
        self.now += max(d, 0.0)


@settings(max_examples=50)
@given(st.floats(min_value=0.3, max_value=12), st.lists(st.floats(min_value=0, max_value=0.4), min_size=5, max_size=60))
def test_rate_limiter_window(qps, gaps):
    clock = FakeClock()
    limiter = RateLimiter(qps, clock=clock, sleep=clock.sleep)
    starts = []
    for g in gaps:
        clock.now += g
        starts.append(limiter.acquire())
    cap = limiter.capacity
    assert cap == -(-qps // 1)
    # no half-open 1s window anchored at any start holds more than cap starts
    for s in starts:
        assert sum(1 for t in starts if s <= t < s + 1.0) <= cap


def test_rate_limiter_disabled():
    clock = FakeClock()
    limiter = RateLimiter(None, clock=clock, sleep=clock.sleep)
    for _ in range(100):
        limiter.acquire()
    assert clock.now == 0.0


# -- cache ------------------------------------------------------------------------------------------


def test_cache_key_stable_and_sensitive():
    base = ("svc", {"b": 1, "a": 2}, "en", "es", "p", "text")
    key = cache_key(*base)
    assert key == cache_key("svc", {"a": 2, "b": 1}, "en", "es", "p", "text")
    # a separate interpreter (fresh hash seed) derives the same key
    code = "from pdftrans.translators import cache_key; print(cache_key('svc', {'a': 2, 'b': 1}, 'en', 'es', 'p', 'text'))"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True)
    assert out.stdout.strip() == key
    for i in range(6):
        changed = list(base)
        changed[i] = {"b": 1, "a": 3} if i == 1 else base[i] + "x"
        assert cache_key(*changed) != key


def test_cache_put_get(tmp_path):
    cache = TranslationCache(tmp_path / "c.jsonl")
    assert cache.get("k") is None
    cache.put("k", "v")
    assert cache.get("k") == "v"
    assert cache.get("k", ignore_cache=True) is None
    assert TranslationCache(tmp_path / "c.jsonl").get("k") == "v"


def test_cache_refresh_still_writes(tmp_path):
    path = tmp_path / "c.jsonl"
    client = TranslationClient(fresh_registry().create("reverser"), TranslationCache(path), ignore_cache=True)
    client.translate(req("abc"))
    client.translate(req("abc"))
    assert client.stats.calls == 2 and client.stats.cache_hits == 0
    again = TranslationClient(fresh_registry().create("reverser"), TranslationCache(path))
    assert again.translate(req("abc")) == "cba"
    assert again.stats.calls == 0 and again.stats.cache_hits == 1


def test_cache_repairs_torn_tail(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text(json.dumps({"k": "a", "v": "1"}) + "\n" + '{"k": "b", "v', encoding="utf-8")
    cache = TranslationCache(path)
    assert cache.get("a") == "1" and cache.get("b") is None
    cache.put("c", "3")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert [json.loads(line)["k"] for line in lines] == ["a", "c"]


def test_cache_unreadable_degrades(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    cache = TranslationCache(blocker / "sub" / "c.jsonl")
    assert cache.degraded
    cache.put("k", "v")
    assert cache.get("k") == "v"


def test_cache_io_error_type():
    assert issubclass(CacheIoError, Exception)


def test_cache_key_excludes_secrets():
    a = fresh_registry().create("deepseek", {"api-key": "one"})
    b = fresh_registry().create("deepseek", {"api-key": "two"})
    assert TranslationClient(a).key(req("x")) == TranslationClient(b).key(req("x"))


class CountingTranslator(BaseTranslator):
    descriptor = ServiceDescriptor("counting", "test", identity_class=True, single_flight=True)

    def __init__(self, config=None) -> None:
        super().__init__(config)
        self.active = 0
        self.peak = 0
        self.lock = threading.Lock()

    def do_translate(self, r):
        with self.lock:
            self.active += 1
            self.peak = max(self.peak, self.active)
        try:
            return r.text.upper()
        finally:
            with self.lock:
                self.active -= 1


def test_single_flight_serializes():
    svc = CountingTranslator()
    client = TranslationClient(svc)
    threads = [threading.Thread(target=client.translate, args=(req(f"t{i}"),)) for i in range(16)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert svc.peak == 1 and client.stats.calls == 16


def test_concurrent_duplicates_call_once():
    class Slow(BaseTranslator):
        descriptor = ServiceDescriptor("slow", "test", identity_class=True)
        calls = 0

        def do_translate(self, r):
            type(self).calls += 1
            time.sleep(0.05)
            return r.text.upper()

    client = TranslationClient(Slow())
    results: list[str] = []
    threads = [threading.Thread(target=lambda: results.append(client.translate(req("same")))) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert results == ["SAME"] * 8
    assert Slow.calls == 1 and client.stats.calls == 1 and client.stats.cache_hits == 7
    assert client._pending == {}
    # ignore_cache bypasses the sharing: every request reaches the service
    client.ignore_cache = True
    threads = [threading.Thread(target=client.translate, args=(req("same"),)) for _ in range(3)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert Slow.calls == 4


def test_client_retries_transient_service_errors():
    class Flaky(BaseTranslator):
        descriptor = ServiceDescriptor("flaky", "test", identity_class=True)
        failures = 2

        def do_translate(self, r):
            if self.failures:
                self.failures -= 1
                raise ServiceError("busy", "transient")
            return r.text

    client = TranslationClient(Flaky(), retry=RetryPolicy(sleep=lambda s: None))
    assert client.translate(req("ok")) == "ok"
    assert client.stats.attempts == 3 and client.stats.calls == 1


# -- plugins -------------------------------------------------------------------------------------------


def test_load_plugin_from_path(tmp_path):
    plugin = tmp_path / "upper_plugin.py"
    plugin.write_text(
        "from pdftrans.translators import BaseTranslator, ServiceDescriptor\n"
        "class Upper(BaseTranslator):\n"
        "    descriptor = ServiceDescriptor('upper-test', 'test')\n"
        "    def do_translate(self, req):\n"
        "        return req.text.upper()\n"
        "def register(reg):\n"
        "    reg.register(Upper.descriptor, Upper)\n",
        encoding="utf-8",
    )
    reg = fresh_registry()
    load_plugin(str(plugin), reg)
    assert reg.create("upper-test").translate(req("abc")) == "ABC"


# -- languages -----------------------------------------------------------------------------------------


def test_language_registry_size():
    assert len(LANGUAGES) >= 56
    assert len({lang.code for lang in LANGUAGES}) == len(LANGUAGES)


@pytest.mark.parametrize("name", LISTED_LANGUAGES)
def test_listed_language_present(name):
    assert lookup_language(name).name == name


def test_codes_and_aliases():
    assert lookup_language("zh").code == "zh-CN"
    assert lookup_language("EN").script == "Latin"
    assert lookup_language("pt_br").code == "pt-BR"
    with pytest.raises(UnknownLanguage):
        lookup_language("klingon")


def test_codes_are_bcp47_like():
    import re

    pattern = re.compile(r"^[a-z]{2,3}(-[A-Z][a-z]{3})?(-[A-Z]{2})?$")
    for lang in LANGUAGES:
        assert pattern.match(lang.code), lang.code


def test_global_registry_has_builtins():
    for name in ("identity", "dictionary", "reverser", "openai-like", "openai", "ollama"):
        assert name in registry
