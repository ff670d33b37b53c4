"""Exception types shared across the package."""


class BrailleError(Exception):
    """Base class for every error raised by indic2braille."""


class DetectionFailure(BrailleError):
    """No codepoint of the input belongs to a supported script."""


class DotNotationError(BrailleError, ValueError):
    """Malformed dot-notation string."""


class TableError(BrailleError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class MissingModel(BrailleError):
    """An ambiguous site was hit but no tagger model was supplied."""


class EmptySequence(BrailleError, ValueError):
    pass


class UnknownId(BrailleError, ValueError):
    pass


class UnknownTag(BrailleError, KeyError):
    pass


class DivergenceError(BrailleError, ArithmeticError):
    """Training loss became non-finite; usually a learning rate that is too high."""


class FormatError(BrailleError, ValueError):
    def __init__(self, message, block=None):
        self.block = block
        super().__init__(f"[{block}] {message}" if block else message)


class CorpusError(BrailleError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)
