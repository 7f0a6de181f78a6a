"""Instrumented pairing heaps and trace-based auditing of their link counts."""

from .heap import (MINUS_INFINITY, DeadHeapError, Forest, HeapError, InvalidKeyError,
                   ItemNotInHeapError, Node, Strategy, StructureError)
from .tracing import (CutCause, CutEvent, LinkContext, LinkEvent, OpKind, Orientation,
                      Trace, TraceEvent, TraceFormatError, TraceRecorder)

__version__ = "0.1.0"
