"""
LangGraph workflow for the acceptance run
"""
import asyncio
import time
from typing import Any, Dict, List

from langgraph.graph import END, StateGraph
from loguru import logger

from .criteria import CRITERIA
from .errors import UsageError
from .models import AcceptanceState, CheckResult, RunConfig


class AcceptanceGraph:
    """Runs the selected acceptance criteria in order, one node per criterion"""

    def __init__(self, selected: List[str]):
        unknown = [name for name in selected if name not in CRITERIA]
        if unknown:
            raise UsageError(f"Unknown acceptance criteria: {', '.join(unknown)} (choose from {', '.join(CRITERIA)})")
        # keep the canonical order whatever order --only used
        self.selected = [name for name in CRITERIA if name in selected]
        self.graph = self._create_graph()

    def _create_graph(self):
        workflow = StateGraph(AcceptanceState)

        workflow.add_node("start", self._start_node)
        for name in self.selected:
            workflow.add_node(name, self._criterion_node(name))
        workflow.add_node("output", self._output_node)

        workflow.set_entry_point("start")
        previous = "start"
        for name in self.selected:
            workflow.add_edge(previous, name)
            previous = name
        workflow.add_edge(previous, "output")
        workflow.add_edge("output", END)

        return workflow.compile()

    async def _start_node(self, state: AcceptanceState) -> AcceptanceState:
        logger.info(f"Starting acceptance run: {', '.join(state.selected)} (seed {state.seed})")
        return state

    def _criterion_node(self, name: str):
        runner, budget = CRITERIA[name]

        async def node(state: AcceptanceState) -> AcceptanceState:
            logger.info(f"Criterion {name}")
            start = time.perf_counter()
            try:
                outcome = await asyncio.to_thread(runner, state.seed)
                state.checks[name] = outcome.checks
                state.results[name] = outcome.results
                state.warnings.extend(outcome.warnings)
            except Exception as e:
                logger.error(f"Error in criterion {name}: {e}")
                state.errors.append(f"{name}: {e}")
                state.checks[name] = [CheckResult(name="completed", passed=False, detail=str(e))]
            elapsed = time.perf_counter() - start
            state.durations[name] = elapsed
            if elapsed > budget:
                message = f"Criterion {name} took {elapsed:.1f}s, over its {budget:.0f}s budget"
                logger.warning(message)
                state.warnings.append(message)

            failed = [c.name for c in state.checks[name] if not c.passed]
            if failed:
                logger.warning(f"Criterion {name} failed: {'; '.join(failed)}")
            else:
                logger.info(f"Criterion {name} passed ({elapsed:.2f}s)")
            return state

        return node

    async def _output_node(self, state: AcceptanceState) -> AcceptanceState:
        checks = [
            check.model_copy(update={"name": f"{name}: {check.name}"})
            for name in state.selected
            for check in state.checks.get(name, [])
        ]
        state.final_output = {
            "checks": checks,
            "results": {name: state.results.get(name, {}) for name in state.selected},
            "criteria": {name: all(c.passed for c in state.checks.get(name, [])) for name in state.selected},
            "warnings": state.warnings,
            "errors": state.errors,
            "durations": state.durations,
            "started": state.started,
        }
        logger.info("Acceptance output assembled")
        return state

    async def run(self, run: RunConfig, seed: int = 0) -> Dict[str, Any]:
        """Main entry point for an acceptance run"""
        initial_state = AcceptanceState(run=run, selected=self.selected, seed=seed)
        final_state = await self.graph.ainvoke(initial_state)

        if hasattr(final_state, "final_output"):
            return final_state.final_output
        # the compiled graph may hand back a plain dict
        return final_state.get("final_output", {})
