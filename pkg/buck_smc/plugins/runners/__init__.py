from .QueueRunner import QueueRunner
from .ScenarioRunner import Event, Scenario, Trace, run_scenario, TRACE_HEADER

__all__ = ("QueueRunner", "Event", "Scenario", "Trace", "run_scenario", "TRACE_HEADER")
