from .base import (
    BaseTranslator,
    ServiceDescriptor,
    ServiceRegistry,
    TranslateRequest,
    load_plugin,
    register_service,
    registry,
)
from .cache import TranslationCache, cache_key, default_cache_path
from .errors import (
    CacheIoError,
    DuplicateService,
    InvalidTemplate,
    MissingConfig,
    ProtocolError,
    ServiceError,
    UnknownLanguage,
    UnknownService,
    UnknownVariable,
)
from .languages import LANGUAGES, Language, lookup as lookup_language
from .middleware import TranslationClient
from .openai import ChatConfig, openai_chat_call
from .prompt import DEFAULT_TEMPLATE, PromptTemplate, load_prompt, render_prompt
from .retry import CallStats, RateLimiter, RetryPolicy
from .services import ChatTranslator, DictionaryTranslator, IdentityTranslator, ReverserTranslator

__all__ = [
    "BaseTranslator", "CacheIoError", "CallStats", "ChatConfig", "ChatTranslator", "DEFAULT_TEMPLATE",
    "DictionaryTranslator", "DuplicateService", "IdentityTranslator", "InvalidTemplate", "LANGUAGES",
    "Language", "MissingConfig", "PromptTemplate", "ProtocolError", "RateLimiter", "RetryPolicy",
    "ReverserTranslator", "ServiceDescriptor", "ServiceError", "ServiceRegistry", "TranslateRequest",
    "TranslationCache", "TranslationClient", "UnknownLanguage", "UnknownService", "UnknownVariable",
    "cache_key", "default_cache_path", "load_plugin", "load_prompt", "lookup_language", "openai_chat_call",
    "register_service", "registry", "render_prompt",
]
