"""Stream transports for one-shot line exchanges.

Two endpoint schemes share one `exchange` entry point:

* ``tcp://host:port`` — a real socket connection.
* ``inproc://name`` — a handler registered in this process, so whole
  pipelines run without networking (handy for tests and demos).

Both enforce the wire line limit and an overall deadline.
"""

from __future__ import annotations

import queue
import socket
import threading
import time
from typing import Callable

from .errors import BindFailed, MessageTooLarge, ProtocolError, SoasError
from .wire import MAX_LINE_BYTES

_RECV_CHUNK = 65536


class ConnectFailed(SoasError):
    """The endpoint could not be reached at all."""


class ExchangeTimeout(SoasError):
    """The exchange deadline expired before a full reply arrived."""


def parse_endpoint(endpoint: str) -> tuple:
    """Split an endpoint into ("tcp", host, port) or ("inproc", name)."""
    if endpoint.startswith("tcp://"):
        rest = endpoint[len("tcp://") :]
        host, sep, port_text = rest.rpartition(":")
        if not sep or not host:
            raise ValueError(f"tcp endpoint needs host:port, got {endpoint!r}")
        if not port_text.isdigit():
            raise ValueError(f"tcp port must be numeric, got {endpoint!r}")
        port = int(port_text)
        if port > 65535:
            raise ValueError(f"tcp port must be at most 65535, got {port}")
        return ("tcp", host, port)
    if endpoint.startswith("inproc://"):
        name = endpoint[len("inproc://") :]
        if not name:
            raise ValueError(f"inproc endpoint needs a name, got {endpoint!r}")
        return ("inproc", name)
    raise ValueError(f"unsupported endpoint scheme: {endpoint!r}")


# --- in-process agent registry ----------------------------------------------

_registry_lock = threading.Lock()
_inproc_handlers: dict[str, Callable[[bytes], bytes]] = {}


def register_inproc(name: str, handler: Callable[[bytes], bytes]) -> None:
    with _registry_lock:
        if name in _inproc_handlers:
            raise BindFailed(f"inproc name {name!r} is already registered")
        _inproc_handlers[name] = handler


def unregister_inproc(name: str) -> None:
    with _registry_lock:
        _inproc_handlers.pop(name, None)


def _inproc_handler(name: str) -> Callable[[bytes], bytes] | None:
    with _registry_lock:
        return _inproc_handlers.get(name)


# --- exchanges ----------------------------------------------------------------


def _remaining(deadline: float) -> float:
    left = deadline - time.monotonic()
    if left <= 0:
        raise ExchangeTimeout("exchange deadline expired")
    return left


def _exchange_tcp(host: str, port: int, line: bytes, timeout: float) -> bytes:
    deadline = time.monotonic() + timeout
    try:
        sock = socket.create_connection((host, port), timeout=timeout)
    except TimeoutError as err:
        raise ExchangeTimeout(f"connecting to tcp://{host}:{port} timed out") from err
    except OSError as err:
        raise ConnectFailed(f"cannot connect to tcp://{host}:{port}: {err}") from err
    with sock:
        buf = bytearray()
        try:
            sock.settimeout(_remaining(deadline))
            sock.sendall(line)
            while b"\n" not in buf:
                sock.settimeout(_remaining(deadline))
                chunk = sock.recv(_RECV_CHUNK)
                if not chunk:
                    raise ProtocolError("connection closed before a full reply line")
                buf += chunk
                if len(buf) > MAX_LINE_BYTES:
                    raise MessageTooLarge(
                        f"reply line exceeds the {MAX_LINE_BYTES}-byte limit"
                    )
        except TimeoutError as err:
            raise ExchangeTimeout(
                f"tcp://{host}:{port} did not reply before the deadline"
            ) from err
        except OSError as err:
            raise ProtocolError(f"exchange with tcp://{host}:{port} failed: {err}") from err
    end = buf.index(b"\n")
    return bytes(buf[: end + 1])


def _exchange_inproc(name: str, line: bytes, timeout: float) -> bytes:
    handler = _inproc_handler(name)
    if handler is None:
        raise ConnectFailed(f"no agent is registered at inproc://{name}")
    box: queue.Queue = queue.Queue(maxsize=1)

    def run() -> None:
        try:
            box.put(("reply", handler(bytes(line))))
        except Exception as err:  # classified by the caller, never silent
            box.put(("raised", err))

    threading.Thread(target=run, name=f"inproc-{name}", daemon=True).start()
    try:
        kind, payload = box.get(timeout=timeout)
    except queue.Empty:
        raise ExchangeTimeout(
            f"inproc://{name} did not reply before the deadline"
        ) from None
    if kind == "raised":
        raise ProtocolError(f"inproc://{name} crashed mid-exchange: {payload}")
    if not isinstance(payload, (bytes, bytearray)):
        raise ProtocolError(f"inproc://{name} returned {type(payload).__name__}, not bytes")
    if len(payload) > MAX_LINE_BYTES:
        raise MessageTooLarge(f"reply line exceeds the {MAX_LINE_BYTES}-byte limit")
    return bytes(payload)


def exchange(endpoint: str, line: bytes, timeout: float) -> bytes:
    """Send one request line, return the agent's one reply line.

    `timeout` is the whole exchange's budget in seconds — connect, send,
    and read all share it.
    """
    parsed = parse_endpoint(endpoint)
    if parsed[0] == "tcp":
        return _exchange_tcp(parsed[1], parsed[2], line, timeout)
    return _exchange_inproc(parsed[1], line, timeout)
