"""Exception hierarchy shared across the toolkit."""


class VoltextError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(VoltextError):
    pass


class IoError(VoltextError):
    pass


class FormatError(VoltextError):
    pass


# --- text preprocessing ---

class TooShort(VoltextError):
    """Cleaned text fell below the minimum length."""


class EmptyAfterClean(VoltextError):
    """Nothing remained after applying the cleaning rules."""


# --- embeddings ---

class EmptyVocabulary(VoltextError):
    pass


class TokenNotFound(VoltextError):
    pass


class NoSubwords(VoltextError):
    pass


class MalformedBenchmark(VoltextError):
    pass


class TooFewPairs(VoltextError):
    pass


# --- volatility ---

class TooFewReturns(VoltextError):
    pass


class InsufficientHistory(VoltextError):
    pass


class DegenerateDesign(VoltextError):
    pass


# --- neural model ---

class KernelTooLarge(VoltextError):
    pass


class ShapeMismatch(VoltextError):
    pass


# --- evaluation ---

class NonPositiveForecast(VoltextError):
    pass


class MisalignedSeries(VoltextError):
    pass


class TooShortSeries(VoltextError):
    """Series too short for the requested statistic (e.g. MDA on one day)."""


# --- attribution ---

class NonFiniteGradient(VoltextError):
    pass


class TooManyTokens(VoltextError):
    pass
