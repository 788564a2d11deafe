"""Self-contained pipe descriptor protocol and service-side runtime."""

from .descriptor import (
    AlreadyProcessedError,
    DescriptorSchemaError,
    DescriptorSyntaxError,
    NotAddressedError,
    Payload,
    PipeDescriptor,
    RunStatus,
    Segment,
    forward,
    my_segment,
    parse_descriptor,
)
from .service import HandlerResult, PipeContext, PipeService, StatusReporter

__all__ = [
    "AlreadyProcessedError",
    "DescriptorSchemaError",
    "DescriptorSyntaxError",
    "NotAddressedError",
    "Payload",
    "PipeDescriptor",
    "RunStatus",
    "Segment",
    "forward",
    "my_segment",
    "parse_descriptor",
    "HandlerResult",
    "PipeContext",
    "PipeService",
    "StatusReporter",
]
