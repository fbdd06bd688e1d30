"""
This module defines all exceptions used by the library.
"""
from typing import Dict, List, Optional, Union


class BaseError(Exception):
    """
    Base Exception for all exceptions.
    """


class InvalidArgumentError(BaseError, ValueError):
    """
    Raised when an operation receives a malformed input: non-finite entries, wrong shapes, mismatched
    ambient dimensions or a violated precondition (e.g. :math:`B^T + B` not negative semidefinite).
    """

    def __init__(self, message: str) -> None:
        super().__init__(message)


class NotPSDError(InvalidArgumentError):
    """
    Raised by :func:`sym_sqrt <switched_limits.linalg.sym_sqrt>` when an eigenvalue lies below the clamp
    tolerance.
    """

    def __init__(self, min_eigenvalue: float, tolerance: float) -> None:
        self.min_eigenvalue = min_eigenvalue
        self.tolerance = tolerance
        super().__init__(
            f"Matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e} < -{tolerance:.1e}."
        )


class OutOfRangeError(BaseError, IndexError):
    """
    Raised when an explicit switching signal is evaluated past its horizon.
    """

    def __init__(self, t: float, horizon: float) -> None:
        self.t = t
        self.horizon = horizon
        super().__init__(f"t={t} is beyond the signal horizon {horizon}.")


class InvalidParamError(BaseError):
    """
    Raised during the call of the :meth:`check_params <switched_limits.signals.BaseGenerator.check_params>`
    method of a signal generator.
    """

    def __init__(self, message: str) -> None:
        super().__init__(message)


class LyapunovConditionError(BaseError):
    """
    Raised when a simulation is requested on a system whose matrices do not satisfy
    :math:`B_i^T + B_i \\leq 0` in normalized coordinates.
    """

    def __init__(self, index: int, max_eigenvalue: float) -> None:
        self.index = index
        self.max_eigenvalue = max_eigenvalue
        super().__init__(
            f"Matrix {index} violates the common Lyapunov condition: "
            f"max eigenvalue of B + B^T is {max_eigenvalue:.6g}."
        )


class FileValidationError(BaseError):
    #: marshmallow messages, keyed by field name
    messages: Dict[str, Union[List[str], dict]]

    def __init__(self, messages: Union[Dict, List, str], source: Optional[str] = None):
        """
        :param messages: the ``messages`` attribute of a marshmallow ``ValidationError``
        :param source: Optional path of the file being loaded, used in the error message.
        """
        if not isinstance(messages, dict):
            messages = {"_schema": messages if isinstance(messages, list) else [messages]}
        self.messages = messages
        self.source = source
        super().__init__(str(self))

    def json(self) -> Dict[str, Union[List[str], dict]]:
        """
        Returns the validation messages keyed by field name.

        :return: dict

            Example:

            >>> exc.json()
            {"matrices": ["Matrix 1 has shape 2x3, expected 3x3."]}
        """
        return self.messages

    def __str__(self) -> str:
        where = f"{self.source}: " if self.source else ""
        details = "; ".join(
            f"{field}: {_flatten(message)}" for field, message in self.messages.items()
        )
        return f"{where}invalid file ({details})"


def _flatten(message) -> str:
    if isinstance(message, dict):
        return ", ".join(f"{key}: {_flatten(value)}" for key, value in message.items())
    if isinstance(message, list):
        return " ".join(_flatten(value) for value in message)
    return str(message)
