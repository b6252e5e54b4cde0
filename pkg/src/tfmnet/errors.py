"""Exception types shared across the pipeline."""


class TfmnetError(Exception):
    """Base class for all library errors."""


class MalformedLine(TfmnetError):
    """A CoNLL-U token line does not have 10 tab-separated fields."""

    def __init__(self, line_number: int, text: str):
        self.line_number = line_number
        self.text = text
        super().__init__(f"line {line_number}: expected 10 tab-separated fields: {text!r}")


class MultipleRoots(TfmnetError):
    """A sentence has more than one token with head 0."""


class NoRoot(TfmnetError):
    """A sentence has no token with head 0."""


class UnknownToken(TfmnetError):
    """A token id does not exist in the sentence."""


class EmptyNetwork(TfmnetError):
    """No eligible token pairs exist; the transcript yields no network."""


class EmptyGraph(TfmnetError):
    """A metric was requested on a graph with no nodes."""


class DegenerateGraph(TfmnetError):
    """The graph is too small or too regular for the requested metric."""


class InvalidPartition(TfmnetError):
    """A community partition does not cover the node set disjointly."""


class MTooLarge(TfmnetError):
    """Requested sample size exceeds the emotion lexicon size."""


class MMismatch(TfmnetError):
    """Null model was built for a different emotion-word count M."""


class SchemaMismatch(TfmnetError):
    """Feature matrix columns do not match the ensemble's training schema."""


class ConfigError(TfmnetError):
    """Pipeline configuration is missing, malformed, or inconsistent."""


class MissingUpstreamArtifact(TfmnetError):
    """A stage's input artifact is absent; names the stage to run first."""

    def __init__(self, stage: str, artifact: str):
        self.stage = stage
        self.artifact = artifact
        super().__init__(f"missing artifact {artifact!r}: run the {stage!r} stage first")


class StageFailure(TfmnetError):
    """A pipeline stage aborted; carries the stage name."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {cause}")
