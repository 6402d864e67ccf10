"""Exception types shared across the package.

Every error raised by the pipeline carries a ``stage`` attribute naming the
pipeline stage that produced it, so callers (and the CLI) can attribute
failures without string matching.
"""


class FlowrecError(Exception):
    """Base class for all package errors."""

    stage = "unknown"


class ParseError(FlowrecError):
    """No prefix of the file parses, even after line-level repair."""

    stage = "frontend"


class EmptyFlow(FlowrecError):
    """The receiver at the recommendation point has no data-flow relations."""

    stage = "dataflow"


class EmptyCandidates(FlowrecError):
    """All three candidate sources (scope, imports, stdlib) are empty."""

    stage = "candidates"


class EmptyCorpus(FlowrecError):
    """A model was asked to train on an empty corpus."""

    stage = "features"


class DegenerateData(FlowrecError):
    """Forest training input contains only one class label."""

    stage = "forest"


class VersionMismatch(FlowrecError):
    """A persisted bundle carries an unsupported format version."""

    stage = "corpus"

    def __init__(self, found, supported):
        super().__init__(
            f"bundle format version {found!r} is not supported "
            f"(this build reads {supported!r})"
        )
        self.found = found
        self.supported = supported


class CorruptBundle(FlowrecError):
    """A persisted bundle failed checksum or structural validation."""

    stage = "corpus"
