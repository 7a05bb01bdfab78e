"""Exception types shared across the package."""


class RelsubError(ValueError):
    """Base class for domain errors (the CLI maps these to exit code 1)."""


class SymbolNotInAlphabet(RelsubError):
    def __init__(self, symbol, alphabet):
        self.symbol = symbol
        self.alphabet = tuple(alphabet)
        super().__init__(f"symbol {symbol!r} not in alphabet {''.join(self.alphabet)!r}")


class RelationError(RelsubError):
    pass


class GrammarError(RelsubError):
    pass


class PremiseViolation(RelsubError):
    """The empty string showed up where the learning setting forbids it."""


class InvalidSample(RelsubError):
    pass
