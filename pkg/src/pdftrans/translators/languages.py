"""Supported input/output languages with the script used to render them."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import UnknownLanguage


@dataclass(frozen=True)
class Language:
    code: str
    name: str
    script: str


LANGUAGES: tuple[Language, ...] = (
    Language("am", "Amharic", "Ethiopic"),
    Language("ar", "Arabic", "Arabic"),
    Language("eu", "Basque", "Latin"),
    Language("bn", "Bengali", "Bengali"),
    Language("en-GB", "English (UK)", "Latin"),
    Language("pt-BR", "Portuguese (Brazil)", "Latin"),
    Language("bg", "Bulgarian", "Cyrillic"),
    Language("ca", "Catalan", "Latin"),
    Language("chr", "Cherokee", "Cherokee"),
    Language("hr", "Croatian", "Latin"),
    Language("cs", "Czech", "Latin"),
    Language("da", "Danish", "Latin"),
    Language("nl", "Dutch", "Latin"),
    Language("en-US", "English (US)", "Latin"),
    Language("et", "Estonian", "Latin"),
    Language("fil", "Filipino", "Latin"),
    Language("fi", "Finnish", "Latin"),
    Language("fr", "French", "Latin"),
    Language("de", "German", "Latin"),
    Language("el", "Greek", "Greek"),
    Language("gu", "Gujarati", "Gujarati"),
    Language("he", "Hebrew", "Hebrew"),
    Language("hi", "Hindi", "Devanagari"),
    Language("hu", "Hungarian", "Latin"),
    Language("is", "Icelandic", "Latin"),
    Language("id", "Indonesian", "Latin"),
    Language("it", "Italian", "Latin"),
    Language("ja", "Japanese", "Japanese"),
    Language("kn", "Kannada", "Kannada"),
    Language("ko", "Korean", "Hangul"),
    Language("lv", "Latvian", "Latin"),
    Language("lt", "Lithuanian", "Latin"),
    Language("ms", "Malay", "Latin"),
    Language("ml", "Malayalam", "Malayalam"),
    Language("mr", "Marathi", "Devanagari"),
    Language("no", "Norwegian", "Latin"),
    Language("pl", "Polish", "Latin"),
    Language("pt-PT", "Portuguese (Portugal)", "Latin"),
    Language("ro", "Romanian", "Latin"),
    Language("ru", "Russian", "Cyrillic"),
    Language("sr", "Serbian", "Cyrillic"),
    Language("zh-CN", "Chinese (Simplified)", "HanSimplified"),
    Language("sk", "Slovak", "Latin"),
    Language("sl", "Slovenian", "Latin"),
    Language("es", "Spanish", "Latin"),
    Language("sw", "Swahili", "Latin"),
    Language("sv", "Swedish", "Latin"),
    Language("ta", "Tamil", "Tamil"),
    Language("te", "Telugu", "Telugu"),
    Language("th", "Thai", "Thai"),
    Language("zh-TW", "Chinese (Traditional)", "HanTraditional"),
    Language("tr", "Turkish", "Latin"),
    Language("ur", "Urdu", "Arabic"),
    Language("uk", "Ukrainian", "Cyrillic"),
    Language("vi", "Vietnamese", "Latin"),
    Language("cy", "Welsh", "Latin"),
)

# shorthand and legacy codes people actually type
ALIASES = {
    "en": "en-US",
    "en-uk": "en-GB",
    "pt": "pt-PT",
    "zh": "zh-CN",
    "zh-hans": "zh-CN",
    "zh-hant": "zh-TW",
    "cn": "zh-CN",
    "tw": "zh-TW",
    "nb": "no",
    "nn": "no",
    "iw": "he",
    "in": "id",
    "tl": "fil",
    "jp": "ja",
    "kr": "ko",
    "english": "en-US",
    "chinese": "zh-CN",
    "portuguese": "pt-PT",
}

_BY_CODE = {lang.code.lower(): lang for lang in LANGUAGES}
_BY_NAME = {lang.name.lower(): lang for lang in LANGUAGES}


def lookup(value: str) -> Language:
    """Resolve a code, alias or display name (case-insensitive)."""
    key = value.strip().replace("_", "-").lower()
    if key in _BY_CODE:
        return _BY_CODE[key]
    if key in ALIASES:
        return _BY_CODE[ALIASES[key].lower()]
    if key in _BY_NAME:
        return _BY_NAME[key]
    raise UnknownLanguage(f"unknown language {value!r}")


def display_name(value: str) -> str:
    """Human name for prompts; unknown codes pass through unchanged."""
    try:
        return lookup(value).name
    except UnknownLanguage:
        return value


def script_of(value: str) -> str:
    return lookup(value).script
