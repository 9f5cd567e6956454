"""Layered settings: command-line flags > environment > config file > defaults.

The config file is flat ``key = value`` text; ``#`` starts a comment::

    lang-in = en
    lang-out = de
    service = openai-like
    base-url = http://localhost:8000/v1
    model = qwen2.5
    threads = 8
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

logger = logging.getLogger(__name__)

DEFAULTS: dict[str, Any] = {
    "lang-in": "en",
    "lang-out": "zh-CN",
    "service": "identity",
    "pages": None,
    "threads": 4,
    "ignore-cache": False,
    "prompt": None,
    "output": ".",
    "layout": "rules",
    "layout-model": None,
    "font-dir": None,
    "font": None,
    "download-fonts": False,
    "cache-path": None,
    "qps": None,
    "api-key": None,
    "base-url": None,
    "model": None,
    "temperature": None,
}
INT_KEYS = frozenset({"threads"})
FLOAT_KEYS = frozenset({"qps", "temperature"})
BOOL_KEYS = frozenset({"ignore-cache", "download-fonts"})
SERVICE_KEYS = ("api-key", "base-url", "model", "temperature")
SECRET_MARKERS = ("api-key", "token", "secret", "password")
REDACTED = "***"


class ConfigParseError(ValueError):
    pass


def is_secret(key: str) -> bool:
    k = key.lower()
    return any(m in k for m in SECRET_MARKERS)


def default_config_path() -> Path:
    root = os.environ.get("XDG_CONFIG_HOME") or os.path.join(os.path.expanduser("~"), ".config")
    return Path(root) / "pdftrans" / "config"


def _coerce(key: str, value: Any, origin: str) -> Any:
    if value is None or not isinstance(value, str):
        return value
    v = value.strip()
    try:
        if key in INT_KEYS:
            return int(v)
        if key in FLOAT_KEYS:
            return float(v)
    except ValueError as exc:
        raise ConfigParseError(f"{origin}: {key} must be a number, got {value!r}") from exc
    if key in BOOL_KEYS:
        low = v.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off", ""):
            return False
        raise ConfigParseError(f"{origin}: {key} must be a boolean, got {value!r}")
    return v


def parse_config_text(text: str, origin: str = "<config>") -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith(("#", ";")):
            continue
        if "=" not in line:
            raise ConfigParseError(f"{origin}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip().lower().replace("_", "-")
        if not key or any(c.isspace() for c in key):
            raise ConfigParseError(f"{origin}:{lineno}: bad key {key!r}")
        value = value.strip()
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
            value = value[1:-1]
        out[key] = value
    return out


def _env_name(key: str) -> str:
    return key.upper().replace("-", "_").replace(".", "_")


@dataclass
class CliConfig:
    values: dict[str, Any] = field(default_factory=dict)
    sources: dict[str, str] = field(default_factory=dict)

    def __getitem__(self, key: str) -> Any:
        return self.values.get(key)

    def get(self, key: str, default: Any = None) -> Any:
        v = self.values.get(key)
        return default if v is None else v

    def service_config(self) -> dict[str, Any]:
        """Options for the selected service, keyed the way services expect."""
        return {k: self.values[k] for k in SERVICE_KEYS if self.values.get(k) is not None}

    def redacted(self) -> dict[str, Any]:
        return {k: (REDACTED if is_secret(k) and v is not None else v) for k, v in sorted(self.values.items())}

    def dump(self) -> str:
        lines = []
        for k, v in self.redacted().items():
            shown = "" if v is None else str(v).lower() if isinstance(v, bool) else str(v)
            lines.append(f"{k} = {shown}  # {self.sources.get(k, 'default')}")
        return "\n".join(lines) + "\n"


def load_config(
    paths: list[str | Path] | None = None,
    env: Mapping[str, str] | None = None,
    flags: Mapping[str, Any] | None = None,
    explicit_path: bool = False,
) -> CliConfig:
    """Merge defaults, config files, environment and flags (later wins).

    A missing config file is skipped unless ``explicit_path`` says the user
    named it. Environment variables are ``PDFTRANS_<KEY>`` or bare ``<KEY>``
    (prefixed wins); service credentials also come from ``<SERVICE>_API_KEY``,
    ``<SERVICE>_BASE_URL`` and ``<SERVICE>_MODEL``.
    """
    env = dict(os.environ if env is None else env)
    cfg = CliConfig(dict(DEFAULTS), {k: "default" for k in DEFAULTS})

    def put(key: str, value: Any, origin: str) -> None:
        if key not in DEFAULTS:
            logger.warning("%s: unknown setting %r ignored", origin, key)
            return
        cfg.values[key] = _coerce(key, value, origin)
        cfg.sources[key] = origin

    for path in paths or []:
        p = Path(path).expanduser()
        if not p.is_file():
            if explicit_path:
                raise ConfigParseError(f"config file {p} not found")
            continue
        try:
            text = p.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise ConfigParseError(f"cannot read config file {p}: {exc}") from exc
        for k, v in parse_config_text(text, str(p)).items():
            put(k, v, f"file:{p}")

    for key in DEFAULTS:
        bare, prefixed = _env_name(key), "PDFTRANS_" + _env_name(key)
        if prefixed in env:
            put(key, env[prefixed], f"env:{prefixed}")
        elif bare in env and key not in SERVICE_KEYS:
            put(key, env[bare], f"env:{bare}")

    # the service may itself be chosen by a flag, so resolve it first
    service = (flags or {}).get("service") or cfg.values["service"]
    for key in SERVICE_KEYS:
        name = f"{_env_name(service)}_{_env_name(key)}"
        if name in env and not cfg.sources[key].startswith("env:PDFTRANS_"):
            put(key, env[name], f"env:{name}")

    for k, v in (flags or {}).items():
        if v is not None:
            put(k, v, "flag")
    return cfg
