"""Concurrent fan-out of one query to every located agent.

Each agent gets its own worker thread and the full timeout budget; replies
are drained in completion waves and appended to the result store from the
calling thread only, so the store sees a single writer.  Every agent ends in
exactly one outcome — ok, timeout, connect-failed, protocol-error, or
agent-failed — and the outcome list preserves the input agent order.
"""

from __future__ import annotations

from concurrent.futures import FIRST_COMPLETED, Future, ThreadPoolExecutor, wait
from dataclasses import dataclass

from . import transport
from .errors import AllAgentsFailed, MessageTooLarge, ProtocolError
from .locator import AgentRecord
from .results import ResultStore
from .rpu import QueryModel
from .wire import AgentResponse, decode_response, encode_request

OK = "ok"
TIMEOUT = "timeout"
CONNECT_FAILED = "connect-failed"
PROTOCOL_ERROR = "protocol-error"
AGENT_FAILED = "agent-failed"


@dataclass(frozen=True, slots=True)
class AgentOutcome:
    agent_iri: str
    status: str
    items: int = 0
    detail: str = ""


def _contact_agent(
    agent: AgentRecord, line: bytes, timeout_s: float, expected_id: str
) -> tuple[str, AgentResponse | None, str]:
    """Run one exchange and classify it; never raises."""
    try:
        reply = transport.exchange(agent.endpoint, line, timeout_s)
    except transport.ConnectFailed as err:
        return (CONNECT_FAILED, None, str(err))
    except transport.ExchangeTimeout as err:
        return (TIMEOUT, None, str(err))
    except (ProtocolError, MessageTooLarge) as err:
        return (PROTOCOL_ERROR, None, str(err))
    except ValueError as err:  # unparseable endpoint that bypassed catalog checks
        return (CONNECT_FAILED, None, str(err))
    try:
        response = decode_response(reply, expected_id=expected_id)
    except (ProtocolError, MessageTooLarge) as err:
        return (PROTOCOL_ERROR, None, str(err))
    if response.is_error:
        return (
            AGENT_FAILED,
            None,
            f"{response.error_code}: {response.error_message}",
        )
    return (OK, response, "")


def query_agents(
    agents: list[AgentRecord],
    model: QueryModel,
    timeout_ms: int,
    store: ResultStore,
) -> list[AgentOutcome]:
    """Query every agent concurrently; store arrivals, return all outcomes.

    Completed exchanges are appended to `store` wave by wave, each wave in
    agent-IRI order, so arrival indexes are reproducible given the same set
    of completions per wave.  Raises AllAgentsFailed (carrying the outcomes)
    when not a single agent returned results.
    """
    if not agents:
        raise ValueError("query_agents needs at least one agent")
    if timeout_ms < 1:
        raise ValueError(f"timeout_ms must be at least 1, got {timeout_ms}")
    line = encode_request(model)
    request_iri = model.request_iri.value
    timeout_s = timeout_ms / 1000.0

    outcomes: dict[str, AgentOutcome] = {}
    with ThreadPoolExecutor(max_workers=len(agents)) as pool:
        futures: dict[Future, AgentRecord] = {
            pool.submit(_contact_agent, agent, line, timeout_s, request_iri): agent
            for agent in agents
        }
        pending = set(futures)
        while pending:
            done, pending = wait(pending, return_when=FIRST_COMPLETED)
            for future in sorted(done, key=lambda f: futures[f].agent_iri.value):
                agent = futures[future]
                status, response, detail = future.result()
                if status == OK:
                    for item in response.items:
                        store.append(
                            request_iri=request_iri,
                            agent_iri=agent.agent_iri.value,
                            title=item.title,
                            triples=item.triples,
                            relevance=item.relevance,
                        )
                    outcome = AgentOutcome(
                        agent.agent_iri.value, OK, items=len(response.items)
                    )
                else:
                    outcome = AgentOutcome(agent.agent_iri.value, status, detail=detail)
                outcomes[agent.agent_iri.value] = outcome

    ordered = [outcomes[agent.agent_iri.value] for agent in agents]
    if all(outcome.status != OK for outcome in ordered):
        raise AllAgentsFailed(
            "; ".join(
                f"{outcome.agent_iri}: {outcome.status}" for outcome in ordered
            ),
            ordered,
        )
    return ordered
