"""Shared error types. Every error carries a short machine-readable code."""


class ToolkitError(Exception):
    """Base error. `code` is a stable identifier, `message` is for humans."""

    def __init__(self, code: str, message: str = ""):
        self.code = code
        self.message = message or code
        super().__init__(f"{code}: {self.message}" if message else code)


class CorpusError(ToolkitError):
    pass


class AudioError(ToolkitError):
    pass


class EmbedError(ToolkitError):
    pass


class MetricError(ToolkitError):
    pass


class ServiceError(ToolkitError):
    pass
