from .trace import (  # noqa: F401
    CorruptEvent,
    FilterDropEvent,
    IdealCallEvent,
    InjectedEvent,
    OutputEvent,
    ProcessedEvent,
    SendEvent,
    Trace,
    party_view,
    party_view_bytes,
)
from .metrics import build_graphs, honest_at_end, locality  # noqa: F401
from .psmt import ChannelMode, slot_visibility  # noqa: F401
from .engine import (  # noqa: F401
    BudgetExceeded,
    EngineControl,
    ExecutionInstance,
    ProtocolViolation,
    RunawayProtocol,
    run_instance,
)
