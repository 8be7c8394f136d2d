"""Exception types shared across the pipeline modules."""


class PipelineError(Exception):
    """Base class for all consultkit errors."""


# --- stream ingestion ---

class MissingHeader(PipelineError):
    """The first record of a token stream was not a header record."""


class MalformedRecord(PipelineError):
    def __init__(self, line_no: int, reason: str = ""):
        self.line_no = line_no
        super().__init__(f"malformed record at line {line_no}" + (f": {reason}" if reason else ""))


class NonMonotonicSeq(PipelineError):
    def __init__(self, seq: int):
        self.seq = seq
        super().__init__(f"token seq {seq} does not increase")


class EmptyScript(PipelineError):
    """Scripted dialogue has no turns."""


# --- boundary ---

class EmptyStream(PipelineError):
    """Segmentation was asked to run on an empty token sequence."""


# --- state extraction ---

class UnknownField(PipelineError):
    def __init__(self, field_id: str):
        self.field_id = field_id
        super().__init__(f"event references unknown schema field {field_id!r}")


# --- belief ---

class NonPositiveTemperature(PipelineError):
    def __init__(self, value: float):
        self.value = value
        super().__init__(f"temperature must be > 0, got {value}")


class DimensionMismatch(PipelineError):
    """Vectors in a belief operation are not over the same hypothesis set."""


class TooShort(PipelineError):
    """Volatility needs at least two belief states."""


# --- retrieval ---

class DuplicateBlock(PipelineError):
    def __init__(self, document_id: str, block_id: str):
        super().__init__(f"duplicate block {block_id!r} in document {document_id!r}")


class DanglingEdge(PipelineError):
    def __init__(self, source: str, target: str):
        self.source = source
        self.target = target
        super().__init__(f"edge from {source!r} points at missing object {target!r}")


class EmptyQuery(PipelineError):
    """Retrieval query was empty or whitespace."""


class MissingQuery(PipelineError):
    def __init__(self, query_id: str):
        self.query_id = query_id
        super().__init__(f"no results supplied for scored query {query_id!r}")


# --- planner ---

class NoObservationModel(PipelineError):
    def __init__(self, action_id: str):
        self.action_id = action_id
        super().__init__(f"action {action_id!r} carries no observation model")


class EmptyCandidates(PipelineError):
    """select_action was called with no candidates."""


class TurnMisalignment(PipelineError):
    """Session trace and gold action annotations cannot be aligned by turn."""


# --- trace / replay ---

class SeqGap(PipelineError):
    def __init__(self, expected: int, got: int):
        super().__init__(f"trace record seq gap: expected {expected}, got {got}")


class CorruptRecord(PipelineError):
    def __init__(self, seq: int, reason: str = ""):
        self.seq = seq
        super().__init__(f"corrupt trace record at seq {seq}" + (f": {reason}" if reason else ""))


class ConfigMismatch(PipelineError):
    """Trace was produced under a different configuration than the one supplied."""


# --- harness / service ---

class InvalidConfig(PipelineError):
    """A configuration value violates its documented range or structure."""


class TurnCapReached(PipelineError):
    """Session hit the turn cap before concluding (recorded, not fatal)."""


class SessionClosed(PipelineError):
    """Input was pushed to a concluded or aborted session."""


class DuplicateTurn(PipelineError):
    """A turn index was pushed twice to the same session."""


class UnknownSession(PipelineError):
    def __init__(self, session_id: str):
        self.session_id = session_id
        super().__init__(f"unknown session {session_id!r}")
