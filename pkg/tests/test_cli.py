from __future__ import annotations

import io
import json
import os
import subprocess
import sys
from unittest import mock

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from pdftrans.cli import run_cli
from pdftrans.config import DEFAULTS, SERVICE_KEYS
from pdftrans.pdf import parse_document
from pdftrans.pipeline import CancellationToken


def _scrub_env() -> dict[str, str]:
    names = set()
    for key in DEFAULTS:
        bare = key.upper().replace("-", "_")
        names |= {bare, "PDFTRANS_" + bare, "OPENAI_LIKE_" + bare}
    names.add("PDFTRANS_CONFIG")
    return {k: v for k, v in os.environ.items() if k not in names}


@pytest.fixture(autouse=True)
def clean_env(tmp_path, monkeypatch):
    """No stray settings from the machine running the tests."""
    env = _scrub_env()
    env["XDG_CONFIG_HOME"] = str(tmp_path / "xdg")
    with mock.patch.dict(os.environ, env, clear=True):
        yield


def cli(*argv: str, cancel=None) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(list(argv), out, err, cancel)
    return code, out.getvalue(), err.getvalue()


def config_value(dump: str, key: str) -> tuple[str, str]:
    for line in dump.splitlines():
        k, rest = line.split(" = ", 1)
        if k == key:
            value, origin = rest.rsplit("  # ", 1)
            return value, origin
    raise KeyError(key)


@pytest.fixture
def doc(tmp_path, corpus):
    path = tmp_path / "article.pdf"
    path.write_bytes(corpus["single_column"])
    return path


# -- translate --------------------------------------------------------------------------------


def test_translate_writes_mono_and_dual(tmp_path, doc):
    outdir = tmp_path / "out"
    code, out, err = cli("translate", str(doc), "-s", "reverser", "-lo", "fr", "-o", str(outdir), "--cache-path", "none")
    assert code == 0, err
    mono, dual = outdir / "article-mono.pdf", outdir / "article-dual.pdf"
    assert len(parse_document(mono.read_bytes()).pages) == 1
    assert len(parse_document(dual.read_bytes()).pages) == 2
    assert "article-mono.pdf" in out
    assert "[translate]" in err


def test_json_diagnostics(tmp_path, doc):
    code, out, err = cli("translate", str(doc), "-o", str(tmp_path), "--cache-path", "none", "--json")
    assert code == 0
    (done,) = [json.loads(line) for line in out.splitlines()]
    assert done["event"] == "done" and done["pages"] == 1 and len(done["outputs"]) == 2
    events = [json.loads(line) for line in err.splitlines()]
    assert {e["event"] for e in events} == {"progress"}


def test_quiet_suppresses_progress(tmp_path, doc):
    code, _, err = cli("translate", str(doc), "-o", str(tmp_path), "--cache-path", "none", "-q")
    assert code == 0 and err == ""


def test_cache_file_used_across_runs(tmp_path, doc):
    cache = tmp_path / "cache.jsonl"
    args = ("translate", str(doc), "-s", "reverser", "-lo", "fr", "-o", str(tmp_path), "--cache-path", str(cache), "--json", "-q")
    first = json.loads(cli(*args)[1])
    second = json.loads(cli(*args)[1])
    assert first["translator_calls"] > 0 and second["translator_calls"] == 0
    assert second["cache_hits"] == first["translator_calls"] + first["cache_hits"]


def test_one_bad_input_fails_the_batch_but_not_the_others(tmp_path, doc):
    bad = tmp_path / "broken.pdf"
    bad.write_bytes(b"%PDF-1.4\nthis is not a pdf")
    outdir = tmp_path / "out"
    code, _, err = cli("translate", str(doc), str(bad), "-o", str(outdir), "--cache-path", "none", "-q")
    assert code == 1
    assert sorted(p.name for p in outdir.iterdir()) == ["article-dual.pdf", "article-mono.pdf"]
    assert "broken.pdf" in err


def test_missing_input_file(tmp_path):
    code, _, err = cli("translate", str(tmp_path / "absent.pdf"), "-o", str(tmp_path))
    assert code == 1 and "absent.pdf" in err


def test_stdin_to_stdout(corpus, tmp_path):
    env = _scrub_env()
    env["XDG_CONFIG_HOME"] = str(tmp_path)
    proc = subprocess.run(
        [sys.executable, "-m", "pdftrans.cli", "translate", "-", "-s", "reverser", "-lo", "fr", "--cache-path", "none", "-q"],
        input=corpus["formula"],
        capture_output=True,
        env=env,
        timeout=120,
    )
    assert proc.returncode == 0, proc.stderr.decode()
    assert len(parse_document(proc.stdout).pages) == 1
    assert b"<stdout>" in proc.stderr


def test_cancelled_run_writes_nothing(tmp_path, doc):
    token = CancellationToken()
    token.cancel()
    outdir = tmp_path / "out"
    code, _, err = cli("translate", str(doc), str(doc), "-o", str(outdir), "--cache-path", "none", "-q", cancel=token)
    assert code == 1 and "cancelled" in err
    assert not outdir.exists() or list(outdir.iterdir()) == []


def test_plugin_service_from_the_command_line(tmp_path, doc):
    code, out, err = cli(
        "translate", str(doc), "--plugin", "pdftrans.plugins.shout", "-s", "shout", "-lo", "fr",
        "-o", str(tmp_path), "--cache-path", "none", "-q",
    )
    assert code == 0, err
    texts = [r.text for r in parse_document((tmp_path / "article-mono.pdf").read_bytes()).pages[0].runs]
    assert any(t.isupper() and len(t) > 20 for t in texts)


# -- usage errors -------------------------------------------------------------------------------


@pytest.mark.parametrize(
    "argv, fragment",
    [
        (["-s", "nosuch"], "identity"),
        (["-p", "3-1"], "backwards"),
        (["-p", "0"], "numbered from 1"),
        (["--bogus-flag"], "unrecognized"),
        (["-lo", "xx-Nope"], "languages"),
        (["-t", "0"], "threads"),
        (["--layout", "model"], "layout-model"),
        (["--plugin", "no.such.module"], "plugin"),
        (["-s", "openai-like", "--cache-path", "none"], "OPENAI_LIKE_"),
    ],
)
def test_usage_errors_exit_2(doc, argv, fragment):
    code, _, err = cli("translate", str(doc), *argv)
    assert code == 2
    assert fragment in err


def test_no_command_is_usage_error():
    assert cli()[0] == 2


def test_malformed_config_file(tmp_path, doc):
    conf = tmp_path / "bad.conf"
    conf.write_text("lang-out = de\nthis line has no equals sign\n")
    code, _, err = cli("translate", str(doc), "--config", str(conf))
    assert code == 2 and "bad.conf:2" in err
    conf.write_text("threads = many\n")
    assert cli("translate", str(doc), "--config", str(conf))[0] == 2
    assert cli("translate", str(doc), "--config", str(tmp_path / "none.conf"))[0] == 2


# -- settings precedence ---------------------------------------------------------------------------


def test_flag_beats_environment(doc):
    os.environ["THREADS"] = "2"
    _, out, _ = cli("translate", str(doc), "--threads", "8", "--print-config")
    assert config_value(out, "threads") == ("8", "flag")
    _, out, _ = cli("translate", str(doc), "--print-config")
    assert config_value(out, "threads") == ("2", "env:THREADS")
    os.environ["PDFTRANS_THREADS"] = "3"
    _, out, _ = cli("translate", str(doc), "--print-config")
    assert config_value(out, "threads") == ("3", "env:PDFTRANS_THREADS")


def test_environment_beats_file_beats_default(tmp_path, doc):
    conf = tmp_path / "xdg" / "pdftrans" / "config"
    conf.parent.mkdir(parents=True)
    conf.write_text("# defaults for this machine\nlang-out = de\nthreads = 5\n")
    _, out, _ = cli("translate", str(doc), "--print-config")
    assert config_value(out, "lang-out")[0] == "de"
    assert config_value(out, "threads")[0] == "5"
    assert config_value(out, "service") == ("identity", "default")
    os.environ["LANG_OUT"] = "ja"
    _, out, _ = cli("translate", str(doc), "--print-config")
    assert config_value(out, "lang-out") == ("ja", "env:LANG_OUT")


def test_service_credentials_from_environment(doc):
    os.environ["OPENAI_LIKE_API_KEY"] = "sk-from-env"
    os.environ["OPENAI_LIKE_BASE_URL"] = "http://127.0.0.1:9/v1"
    _, out, _ = cli("translate", str(doc), "-s", "openai-like", "--print-config")
    assert config_value(out, "api-key") == ("***", "env:OPENAI_LIKE_API_KEY")
    assert config_value(out, "base-url")[0] == "http://127.0.0.1:9/v1"
    assert "sk-from-env" not in out
    os.environ["PDFTRANS_API_KEY"] = "sk-override"
    _, out, _ = cli("translate", str(doc), "-s", "openai-like", "--print-config")
    assert config_value(out, "api-key") == ("***", "env:PDFTRANS_API_KEY")


def test_bare_service_keys_are_not_read(doc):
    # a stray MODEL variable belongs to some other program
    os.environ["MODEL"] = "unrelated"
    _, out, _ = cli("translate", str(doc), "--print-config")
    assert config_value(out, "model") == ("", "default")
    assert "model" in SERVICE_KEYS


_secret = st.text(st.characters(min_codepoint=33, max_codepoint=126), min_size=8, max_size=40).map(lambda s: "sk-" + s)


@settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(secret=_secret, via=st.sampled_from(["PDFTRANS_API_KEY", "OPENAI_LIKE_API_KEY", "file"]))
def test_print_config_never_shows_secrets(tmp_path, doc, secret, via):
    env = {}
    conf = tmp_path / "secret.conf"
    conf.write_text("")
    if via == "file":
        conf.write_text(f"api-key = {secret}\n")
    else:
        env[via] = secret
    with mock.patch.dict(os.environ, env):
        code, out, _ = cli("translate", str(doc), "-s", "openai-like", "--config", str(conf), "--print-config")
    assert code == 0
    assert secret not in out
    assert config_value(out, "api-key")[0] == "***"


# -- other commands -----------------------------------------------------------------------------------


def test_services_listing():
    code, out, _ = cli("services", "--json")
    names = {json.loads(line)["name"] for line in out.splitlines()}
    assert code == 0 and {"identity", "dictionary", "reverser", "openai-like"} <= names


def test_languages_listing():
    code, out, _ = cli("languages", "--json")
    rows = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and len(rows) >= 56
    assert {"code", "name", "script"} <= set(rows[0])


def test_bench_command():
    code, out, _ = cli("bench", "--runs", "1", "--pages", "2", "--json")
    res = json.loads(out)
    assert code == 0 and res["pages"] == 2 and res["within_budget"]
