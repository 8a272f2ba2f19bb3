"""
Custom exceptions for the newsbot pipeline
"""
from typing import Iterable, Optional


class NewsbotException(Exception):
    """Base exception class for all custom exceptions"""
    pass


class EventParseError(NewsbotException):
    """Raised when an event row cannot be parsed"""

    def __init__(self, row_index: int, message: str):
        self.row_index = row_index
        super().__init__(f"row {row_index}: {message}")


class EventValidationError(NewsbotException):
    """Raised when event data parses but violates the event model"""

    def __init__(self, message: str, row_index: Optional[int] = None, team: Optional[str] = None):
        self.row_index = row_index
        self.team = team
        prefix = f"row {row_index}: " if row_index is not None else ""
        super().__init__(prefix + message)


class TemplateSyntaxError(NewsbotException):
    """Raised when a template source does not follow the template grammar"""

    def __init__(self, message: str, line: int, column: int, source_name: str = "<template>"):
        self.message = message
        self.line = line
        self.column = column
        self.source_name = source_name
        super().__init__(f"{source_name}:{line}:{column}: {message}")


class TemplateRenderError(NewsbotException):
    """Raised when a template cannot be rendered against a context"""

    def __init__(self, message: str, line: int, column: int, path: Optional[str] = None):
        self.line = line
        self.column = column
        self.path = path
        super().__init__(f"{line}:{column}: {message}")


class TemplateLookupError(NewsbotException):
    """Raised when a template bank has no entry for a key"""

    def __init__(self, key: str):
        self.key = key
        super().__init__(f"no templates for key '{key}'")


class SummarizationError(NewsbotException):
    """Raised when a scorer breaks its contract or a selection rule is invalid"""
    pass


class GlossaryError(NewsbotException):
    """Raised when glossary data is invalid"""
    pass


class PlaceholderIntegrityError(NewsbotException):
    """Raised when a translation backend loses or duplicates entity placeholders"""

    def __init__(self, missing: Iterable[int], extra: Iterable[int]):
        self.missing = sorted(missing)
        self.extra = sorted(extra)
        super().__init__(f"placeholder integrity violated: missing={self.missing} extra={self.extra}")


class UnknownPlaceholderError(NewsbotException):
    """Raised when restoring a placeholder id that has no glossary entry"""

    def __init__(self, placeholder_id: int):
        self.placeholder_id = placeholder_id
        super().__init__(f"unknown placeholder id {placeholder_id}")


class LexiconError(NewsbotException):
    """Raised when a token has no pronunciation or a lexicon file is malformed"""

    def __init__(self, message: str, token: Optional[str] = None):
        self.token = token
        super().__init__(message)


class InvalidShapeError(NewsbotException):
    """Raised when network parameters or inputs have inconsistent shapes"""
    pass


class NumericError(NewsbotException):
    """Raised when a forward pass produces non-finite values"""
    pass


class TrainingError(NewsbotException):
    """Raised when training diverges"""

    def __init__(self, step: int, loss: float):
        self.step = step
        self.loss = loss
        super().__init__(f"training diverged at step {step} (loss={loss})")


class InventoryMismatchError(NewsbotException):
    """Raised when a timeline's phoneme inventory differs from the model's"""
    pass


class MissingModelError(NewsbotException):
    """Raised when animation is requested without trained lip-sync parameters"""
    pass


class PipelineConfigError(NewsbotException):
    """Raised when the pipeline configuration is invalid"""
    pass


class StageError(NewsbotException):
    """Raised when a pipeline stage fails"""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")
