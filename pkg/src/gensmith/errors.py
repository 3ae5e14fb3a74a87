"""Exception hierarchy shared across the package."""


class GensmithError(Exception):
    """Base class for all package errors."""


# --- prompt templates -------------------------------------------------------

class UnknownTemplate(GensmithError):
    pass


class MissingBinding(GensmithError):
    def __init__(self, name: str):
        super().__init__(f"no binding for placeholder {name!r}")
        self.name = name


# --- LLM gateway ------------------------------------------------------------

class InvalidDialogue(GensmithError):
    pass


class TransportError(GensmithError):
    """Backend unreachable or scripted mock exhausted."""


class BudgetExceeded(GensmithError):
    """The campaign token or cost cap would be exceeded by this request."""


class EmptyReply(GensmithError):
    pass


class MockScriptMismatch(GensmithError):
    """The orchestrator requested a template kind the mock script did not expect."""


class EmptyScript(GensmithError):
    pass


class UnknownModel(GensmithError):
    def __init__(self, model_id: str):
        super().__init__(f"no price entry for model {model_id!r}")
        self.model_id = model_id


# --- feature catalog --------------------------------------------------------

class UnparseableReply(GensmithError):
    pass


# --- generator forge --------------------------------------------------------

class SynthesisFailure(GensmithError):
    """Base for generator synthesis failures; carries the final error text."""

    def __init__(self, message: str, error_info: str = ""):
        super().__init__(message)
        self.error_info = error_info


class SynthesisExhausted(SynthesisFailure):
    """All initial attempts and debug rounds were spent without a working script."""


class LibraryInstallFailed(SynthesisFailure):
    """A required library could not be installed (rejected, failed, or over budget)."""


# --- sandbox ----------------------------------------------------------------

class InterpreterMissing(GensmithError):
    pass


# --- mutation engine --------------------------------------------------------

class EmptyDatabase(GensmithError):
    pass


class LineageMismatch(GensmithError):
    pass


# --- fuzzer bridge ----------------------------------------------------------

class MalformedStats(GensmithError):
    pass


# --- persistence / config / campaign ----------------------------------------

class CorruptState(GensmithError):
    pass


class ConfigError(GensmithError):
    pass


class ZeroValidGenerators(GensmithError):
    pass
