"""consultkit: streaming consultation-support pipeline.

Token streams go through boundary restoration, stateful extraction,
belief stabilization, hybrid objectified retrieval, and information-gain
action planning, producing a structured report plus a replayable trace.
"""

__version__ = "0.1.0"

from . import belief, boundary, extraction, planner, report_replay, retrieval, stream

__all__ = [
    "belief", "boundary", "extraction", "planner",
    "report_replay", "retrieval", "stream", "__version__",
]
