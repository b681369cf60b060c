"""Error type shared by every module.

Mathematical rejections carry a short machine-readable ``code`` (for example
``"height-exceeded"``) so that the CLI can map them to structured output.
"""


class KisinRamError(ValueError):
    """A computation was rejected for a mathematical reason."""

    def __init__(self, code, message=None, **context):
        self.code = code
        self.message = message or code
        self.context = context
        super().__init__(f"{code}: {self.message}")

    def as_dict(self):
        return {"code": self.code, "message": self.message, "context": self.context}
