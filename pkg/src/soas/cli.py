"""Command line front end.

Two commands: `soas query` runs requests through the pipeline; `soas agents
serve` exposes one knowledge base as a standalone agent.  Exit codes: 0 on
success, 1 when a request fails mid-pipeline, 2 for configuration problems.
"""

from __future__ import annotations

import argparse
import os
import sys
import threading
from pathlib import Path

from .errors import ConfigError, SoasError, StageError
from .fixtures import default_catalog_path, default_lexicon_path, spawn_fixture_agents
from .locator import load_catalog
from .pipeline import (
    DEFAULT_TIMEOUT_MS,
    Pipeline,
    PipelineConfig,
    format_error,
    format_report,
)
from .runtime import load_knowledge_base, serve_agent

TIMEOUT_ENV_VAR = "SOAS_TIMEOUT_MS"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="soas",
        description="Search across domain agents from free-text requests.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    query = commands.add_parser("query", help="run search requests through the pipeline")
    query.add_argument("text", nargs="?", help="request text (omit when using --stdin)")
    query.add_argument(
        "--lexicon", type=Path, help="lexicon file (default: the packaged demo lexicon)"
    )
    query.add_argument(
        "--catalog", type=Path, help="agent catalog (default: the packaged demo catalog)"
    )
    query.add_argument(
        "--timeout-ms",
        type=int,
        help=f"per-agent exchange budget (default {DEFAULT_TIMEOUT_MS}, "
        f"or ${TIMEOUT_ENV_VAR} when set)",
    )
    query.add_argument("--format", choices=("text", "json"), default="text")
    query.add_argument("--journal", type=Path, help="journal results to this file")
    query.add_argument(
        "--stdin", action="store_true", help="read one request per line from stdin"
    )
    query.add_argument(
        "--spawn-fixture-agents",
        action="store_true",
        help="serve the packaged demo knowledge bases in-process for this run",
    )

    agents = commands.add_parser("agents", help="agent runtime commands")
    agent_commands = agents.add_subparsers(dest="agents_command", required=True)
    serve = agent_commands.add_parser("serve", help="serve one knowledge base")
    serve.add_argument("--kb", type=Path, required=True, help="knowledge base triple file")
    serve.add_argument("--domain", required=True, help="domain the agent serves")
    serve.add_argument(
        "--listen", required=True, help="endpoint to bind (tcp://host:port or inproc://name)"
    )
    return parser


def _resolve_timeout(flag_value: int | None) -> int:
    """Explicit flag wins; the environment only replaces the default."""
    if flag_value is not None:
        return flag_value
    env_value = os.environ.get(TIMEOUT_ENV_VAR)
    if env_value is None or env_value == "":
        return DEFAULT_TIMEOUT_MS
    try:
        return int(env_value)
    except ValueError:
        raise ConfigError(
            f"{TIMEOUT_ENV_VAR} must be an integer, got {env_value!r}"
        ) from None


def _iter_requests(args) -> "list[str]":
    if args.stdin:
        return [line.rstrip("\n") for line in sys.stdin if line.strip()]
    return [args.text]


def _cmd_query(args) -> int:
    handles = []
    pipeline = None
    try:
        if args.stdin and args.text is not None:
            raise ConfigError("pass request text or --stdin, not both")
        if not args.stdin and args.text is None:
            raise ConfigError("request text is required (or use --stdin)")
        cfg = PipelineConfig(
            lexicon_path=args.lexicon or default_lexicon_path(),
            catalog_path=args.catalog or default_catalog_path(),
            timeout_ms=_resolve_timeout(args.timeout_ms),
            output_format=args.format,
            journal_path=args.journal,
        )
        catalog = None
        if args.spawn_fixture_agents:
            cfg.validate()
            catalog, handles = spawn_fixture_agents(load_catalog(cfg.catalog_path))
        pipeline = Pipeline(cfg, catalog=catalog)
    except (SoasError, OSError) as err:
        print(f"config error: {err}", file=sys.stderr)
        _close_all(handles, pipeline)
        return 2

    failed = False
    try:
        for raw_text in _iter_requests(args):
            try:
                report = pipeline.handle_request(raw_text)
            except StageError as err:
                failed = True
                rendered = format_error(err, args.format)
                if args.format == "json":
                    sys.stdout.write(rendered)
                else:
                    sys.stderr.write(rendered)
                continue
            sys.stdout.write(format_report(report, args.format))
    finally:
        _close_all(handles, pipeline)
    return 1 if failed else 0


def _close_all(handles, pipeline) -> None:
    for handle in handles:
        handle.close()
    if pipeline is not None:
        pipeline.close()


def _cmd_agents_serve(args) -> int:
    try:
        kb = load_knowledge_base(args.kb, args.domain)
        handle = serve_agent(kb, args.listen)
    except (SoasError, OSError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    print(f"serving {args.domain} on {handle.endpoint}", flush=True)
    try:
        threading.Event().wait()
    except KeyboardInterrupt:
        pass
    finally:
        handle.close()
    return 0


def main(argv: "list[str] | None" = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "query":
        return _cmd_query(args)
    return _cmd_agents_serve(args)


def agent_main(argv: "list[str] | None" = None) -> int:
    """Standalone agent entry point: `soas-agent --kb … --domain … --listen …`."""
    parser = argparse.ArgumentParser(
        prog="soas-agent", description="Serve one knowledge base as a domain agent."
    )
    parser.add_argument("--kb", type=Path, required=True, help="knowledge base triple file")
    parser.add_argument("--domain", required=True, help="domain the agent serves")
    parser.add_argument(
        "--listen", required=True, help="endpoint to bind (tcp://host:port or inproc://name)"
    )
    return _cmd_agents_serve(parser.parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
