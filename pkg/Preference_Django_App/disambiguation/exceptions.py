"""Errors raised by the preference scaling library."""


class PreferenceScalingError(ValueError):
    """Base class for every error the toolkit raises on bad data or configuration."""


class CorpusError(PreferenceScalingError):
    """A corpus file or record breaks the corpus format or its invariants."""

    def __init__(self, message, line=None, sentence_id=None):
        self.line = line
        self.sentence_id = sentence_id
        prefix = []
        if line is not None:
            prefix.append(f"line {line}")
        if sentence_id is not None:
            prefix.append(f"sentence {sentence_id!r}")
        super().__init__(f"{', '.join(prefix)}: {message}" if prefix else message)


class FactorsError(PreferenceScalingError):
    """A scaling factor file does not match the functions declared by a corpus."""


class UntrainedModelError(PreferenceScalingError):
    """A statistic was requested from a model with no training observations."""


class ConvergenceError(PreferenceScalingError):
    """Hill climbing hit its iteration cap without terminating."""


class SynthConfigError(PreferenceScalingError):
    """A synthetic corpus configuration cannot be generated."""
