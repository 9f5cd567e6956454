"""Translator base class and the service registry."""
from __future__ import annotations

import importlib
import importlib.util
import logging
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

from .errors import DuplicateService, MissingConfig, UnknownService

logger = logging.getLogger(__name__)

SERVICE_KINDS = ("test", "translation-api", "llm-chat")
SECRET_KEYS = frozenset({"api-key"})


@dataclass(frozen=True)
class TranslateRequest:
    text: str
    lang_in: str
    lang_out: str
    options: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("translation text must be non-empty")


@dataclass(frozen=True)
class ServiceDescriptor:
    name: str
    kind: str = "translation-api"
    required_config: tuple[str, ...] = ()
    optional_config: tuple[str, ...] = ()
    # services that may translate a language into itself
    identity_class: bool = False
    # the pipeline never overlaps calls to a single-flight service
    single_flight: bool = False
    # service retries internally; the middleware must not retry again
    handles_retry: bool = False
    secret_keys: frozenset[str] = SECRET_KEYS
    description: str = ""

    def __post_init__(self) -> None:
        if not self.name or not self.name.replace("-", "").replace("_", "").isalnum():
            raise ValueError(f"service name must be a token, got {self.name!r}")
        if self.kind not in SERVICE_KINDS:
            raise ValueError(f"unknown service kind {self.kind!r}")


class BaseTranslator:
    """Subclasses implement :meth:`do_translate`; everything else is shared."""

    descriptor: ServiceDescriptor

    def __init__(self, config: Mapping[str, Any] | None = None) -> None:
        self.config = dict(config or {})

    def do_translate(self, req: TranslateRequest) -> str:
        raise NotImplementedError

    def translate(self, req: TranslateRequest) -> str:
        if req.lang_in == req.lang_out and not self.descriptor.identity_class:
            raise ValueError(f"{self.descriptor.name}: source and target language are both {req.lang_in}")
        return self.do_translate(req)

    def cache_options(self) -> dict[str, Any]:
        """Config that affects output; secrets never reach the cache key."""
        return {k: v for k, v in self.config.items() if k not in self.descriptor.secret_keys}


Factory = Callable[[Mapping[str, Any]], BaseTranslator]


class ServiceRegistry:
    def __init__(self) -> None:
        self._services: dict[str, tuple[ServiceDescriptor, Factory]] = {}
        self._lock = threading.Lock()

    def register(self, desc: ServiceDescriptor, factory: Factory) -> None:
        with self._lock:
            if desc.name in self._services:
                raise DuplicateService(f"service {desc.name!r} already registered")
            self._services[desc.name] = (desc, factory)

    def unregister(self, name: str) -> None:
        with self._lock:
            self._services.pop(name, None)

    def descriptor(self, name: str) -> ServiceDescriptor:
        try:
            return self._services[name][0]
        except KeyError:
            raise UnknownService(f"unknown service {name!r}; known: {', '.join(self.names())}") from None

    def names(self) -> list[str]:
        return sorted(self._services)

    def descriptors(self) -> list[ServiceDescriptor]:
        return [self._services[n][0] for n in self.names()]

    def create(self, name: str, config: Mapping[str, Any] | None = None) -> BaseTranslator:
        desc = self.descriptor(name)
        config = dict(config or {})
        for key in desc.required_config:
            if config.get(key) in (None, ""):
                raise MissingConfig(key, name)
        translator = self._services[name][1](config)
        translator.descriptor = desc
        return translator

    def __contains__(self, name: str) -> bool:
        return name in self._services


registry = ServiceRegistry()


def register_service(desc: ServiceDescriptor, factory: Factory) -> None:
    registry.register(desc, factory)


def load_plugin(spec: str, target: ServiceRegistry | None = None) -> None:
    """Import a plugin by module name or ``.py`` path.

    A plugin either registers services at import time or exposes
    ``register(registry)``.
    """
    target = target or registry
    if spec.endswith(".py"):
        mod_spec = importlib.util.spec_from_file_location(f"pdftrans_plugin_{abs(hash(spec))}", spec)
        if mod_spec is None or mod_spec.loader is None:
            raise ImportError(f"cannot load plugin {spec!r}")
        module = importlib.util.module_from_spec(mod_spec)
        mod_spec.loader.exec_module(module)
    else:
        module = importlib.import_module(spec)
    hook = getattr(module, "register", None)
    if callable(hook):
        hook(target)
    logger.info("loaded translator plugin %s", spec)


def load_entry_points(target: ServiceRegistry | None = None) -> None:
    from importlib.metadata import entry_points

    for ep in entry_points(group="pdftrans.services"):
        try:
            hook = ep.load()
            hook(target or registry)
        except Exception as exc:  # noqa: BLE001 - a broken plugin must not break the CLI
            logger.warning("plugin %s failed to load: %s", ep.name, exc)
