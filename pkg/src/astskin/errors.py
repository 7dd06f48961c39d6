"""Exception hierarchy shared by every astskin module.

The CLI reports ``type(err).__name__`` on failure, so class names are part of
the user-facing contract.
"""


class AstSkinError(Exception):
    """Base class for all domain errors raised by astskin."""


# dsp
class NyquistViolation(AstSkinError, ValueError):
    pass


class EmptyToneList(AstSkinError, ValueError):
    pass


class FrameTooLong(AstSkinError, ValueError):
    pass


class FrameTooShort(AstSkinError, ValueError):
    pass


class MalformedWav(AstSkinError, ValueError):
    pass


# simskin
class MalformedProfile(AstSkinError, ValueError):
    pass


class SeparabilityViolation(AstSkinError, ValueError):
    def __init__(self, first: str, second: str, detail: str = ""):
        self.pair = (first, second)
        msg = f"locations {first} and {second} are not separable at zero force"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class ForceOutOfRange(AstSkinError, ValueError):
    pass


# dataset
class MalformedCsv(AstSkinError, ValueError):
    pass


class MixedSkinIds(AstSkinError, ValueError):
    pass


class TooFewRecords(AstSkinError, ValueError):
    pass


class KTooLarge(AstSkinError, ValueError):
    pass


# learn
class InvalidModelSpec(AstSkinError, ValueError):
    pass


class SingularCovariance(AstSkinError, ArithmeticError):
    pass


class TaskMismatch(AstSkinError, TypeError):
    pass


class VersionMismatch(AstSkinError, ValueError):
    pass


class MalformedModelFile(AstSkinError, ValueError):
    pass


# metrics
class MixedTasks(AstSkinError, ValueError):
    pass


class LengthMismatch(AstSkinError, ValueError):
    pass


class EmptyInput(AstSkinError, ValueError):
    pass


class DegenerateData(AstSkinError, ValueError):
    pass
