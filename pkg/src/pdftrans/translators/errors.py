from __future__ import annotations


class TranslatorError(Exception):
    pass


class ServiceError(TranslatorError):
    """A translation call failed; ``kind`` is "transient" or "permanent"."""

    def __init__(self, message: str, kind: str = "permanent", status: int | None = None) -> None:
        super().__init__(message)
        if kind not in ("transient", "permanent"):
            raise ValueError(f"bad error kind {kind!r}")
        self.kind = kind
        self.status = status

    @property
    def transient(self) -> bool:
        return self.kind == "transient"


class ProtocolError(ServiceError):
    """The service answered with something that is not a valid response."""

    def __init__(self, message: str) -> None:
        super().__init__(message, "permanent")


class DuplicateService(TranslatorError):
    pass


class UnknownService(TranslatorError):
    pass


class MissingConfig(TranslatorError):
    def __init__(self, key: str, service: str = "") -> None:
        super().__init__(f"service {service!r} needs config key {key!r}" if service else key)
        self.key = key
        self.service = service


class UnknownVariable(TranslatorError):
    def __init__(self, name: str) -> None:
        super().__init__(f"unknown prompt variable {{{name}}}")
        self.name = name


class InvalidTemplate(TranslatorError):
    pass


class UnknownLanguage(TranslatorError):
    pass


class CacheIoError(TranslatorError):
    pass
