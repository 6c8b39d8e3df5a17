#!/usr/bin/env python3
"""
Leibniz Workbench MCP Server

Exposes the workbench commands as MCP tools: gamma table checks,
derivation evaluation, weighted Leibniz system checks, the constructive
solver and the independence / density searches. Document arguments are
JSON objects, inline JSON text or "preset:<name>" strings.
"""

import json
import logging
from typing import Any, Dict, List

import mcp.types as types
from mcp.server import Server
from mcp.server.stdio import stdio_server

from cli import EXIT_OK, EXIT_VIOLATION, execute
from config import (
    DEFAULT_DEGREE_BOUND,
    DEFAULT_DENSITY_EPS,
    DEFAULT_SEED,
    DEFAULT_WITNESS_BUDGET,
    GATE_SAMPLE_COUNT,
    INITIAL_MAX_DENOMINATOR,
    LOG_FORMAT,
    LOG_LEVEL,
    WORKBENCH_VERSION,
)
from data_store import dump_document, get_preset, get_run_logs, store_run_log, validate_table
from errors import InputError, WorkbenchError
from gamma import check_cocycle, factorize
from models import RunConfig
from presets import preset_names

# Configure logging
logging.basicConfig(level=LOG_LEVEL, format=LOG_FORMAT)
logger = logging.getLogger(__name__)

# Initialize MCP server
app = Server("leibniz-workbench")

DOCUMENT = {"description": "JSON document, inline JSON text or \"preset:<name>\""}
EXPRESSION = {"type": "string", "description": "Expression over the generators, e.g. \"(t^2 + 1)/t\""}

# Extra input properties per tool; every tool also takes seed and samples
TOOL_INPUTS: Dict[str, Dict[str, Dict[str, Any]]] = {
    "gamma_validate": {"table": DOCUMENT},
    "gamma_cocycle": {"table": DOCUMENT},
    "gamma_factorize": {"table": DOCUMENT},
    "gamma_synthesize": {"gamma": DOCUMENT},
    "gamma_order_condition": {"table": DOCUMENT},
    "deriv_apply": {"spec": DOCUMENT, "expr": EXPRESSION},
    "deriv_iterate": {"spec": DOCUMENT, "expr": EXPRESSION, "order": {"type": "integer"}},
    "system_check": {"seq": DOCUMENT, "gamma": DOCUMENT},
    "system_defect": {"seq": DOCUMENT, "gamma": DOCUMENT, "x": EXPRESSION, "y": EXPRESSION},
    "system_corld": {"seq": DOCUMENT, "gamma": DOCUMENT},
    "system_solve_next": {
        "seq": DOCUMENT, "gamma": DOCUMENT,
        "choices": {"type": "object", "description": "Values of the new term on generators"},
        "to": {"type": "integer", "description": "Extend repeatedly up to this order"}
    },
    "system_decompose": {"seq": DOCUMENT, "gamma": DOCUMENT},
    "indep_witness": {
        "seq": DOCUMENT,
        "points": {"type": "array", "items": EXPRESSION},
        "degree_bound": {"type": "integer", "default": DEFAULT_DEGREE_BOUND},
        "budget": {"type": "integer", "default": DEFAULT_WITNESS_BUDGET}
    },
    "indep_certificate": {"seq": DOCUMENT, "bound": {"type": "integer"}},
    "indep_density": {
        "seq": DOCUMENT,
        "embed": {"type": "object", "description": "Real value of each generator"},
        "target": {"type": "array", "items": {"type": "number"}},
        "eps": {"type": "number", "default": DEFAULT_DENSITY_EPS},
        "degree_bound": {"type": "integer", "default": DEFAULT_DEGREE_BOUND},
        "max_denominator": {"type": "integer", "default": INITIAL_MAX_DENOMINATOR}
    },
    "indep_verdict": {"seq": DOCUMENT, "gamma": DOCUMENT},
}

REQUIRED: Dict[str, List[str]] = {
    "gamma_validate": ["table"], "gamma_cocycle": ["table"], "gamma_factorize": ["table"],
    "gamma_synthesize": ["gamma"], "gamma_order_condition": ["table"],
    "deriv_apply": ["spec", "expr"], "deriv_iterate": ["spec", "expr", "order"],
    "system_check": ["seq"], "system_defect": ["seq", "x", "y"], "system_corld": ["seq"],
    "system_solve_next": ["seq"], "system_decompose": ["seq"],
    "indep_witness": ["seq"], "indep_certificate": ["seq"],
    "indep_density": ["seq", "embed", "target"], "indep_verdict": ["seq"],
}

TOOL_DESCRIPTIONS: Dict[str, str] = {
    "gamma_validate": "Check domain, symmetry and boundary conditions of a gamma table.",
    "gamma_cocycle": "Check the cocycle identity exhaustively; reports every failing triple with both sides.",
    "gamma_factorize": "Factor a nowhere-zero table as gamma(i+j)/(gamma(i)gamma(j)) or report the first mismatch.",
    "gamma_synthesize": "Build the gamma table of a gamma vector.",
    "gamma_order_condition": "Check that every order has a nonzero interior entry.",
    "deriv_apply": "Apply a derivation, given by its generator values, to an expression.",
    "deriv_iterate": "Apply a derivation k times to an expression.",
    "system_check": "Check the weighted Leibniz system on seeded random pairs.",
    "system_defect": "Evaluate the Leibniz defect D_n(x, y) of a prefix.",
    "system_corld": "Check symmetry, multiplicativity and additivity of the Leibniz defect of a prefix.",
    "system_solve_next": "Construct the next term of a valid prefix from generator values.",
    "system_decompose": "Split the last extension term into the canonical term plus a derivation.",
    "indep_witness": "Certify linear independence of the sequence terms with a nonzero determinant.",
    "indep_certificate": "Search an exact linear relation among the sequence terms.",
    "indep_density": "Find x with (x, d_1(x), ..., d_n(x)) near a target at a real embedding.",
    "indep_verdict": "Decide dependence of a valid solution from its first-order term.",
}

_SETTINGS = ("eps", "degree_bound", "budget", "max_denominator")


def tool_command(name: str) -> tuple:
    """"system_solve_next" -> ("system", "solve-next")."""
    command, _, action = name.partition("_")
    return command, action.replace("_", "-")


def build_config(name: str, arguments: Dict[str, Any]) -> RunConfig:
    missing = [key for key in REQUIRED.get(name, []) if key not in arguments]
    if missing:
        raise InputError(f"Missing arguments: {missing}")
    command, action = tool_command(name)
    inputs = {key: arguments[key] for key in TOOL_INPUTS[name] if key in arguments and key not in _SETTINGS}
    settings = {key: arguments[key] for key in _SETTINGS if key in arguments}
    return RunConfig(
        command=command,
        action=action,
        inputs=inputs,
        seed=arguments.get("seed", DEFAULT_SEED),
        sample_count=arguments.get("samples", GATE_SAMPLE_COUNT),
        **settings
    )


@app.list_resources()
async def list_resources() -> list[types.Resource]:
    """
    List available resources of the workbench.
    Resources expose the built-in presets and the run log.
    """
    logger.info("Listing available resources")

    return [
        types.Resource(
            uri="presets://list",
            name="Preset documents",
            mimeType="application/json",
            description="Names of the built-in tables, derivations and sequences"
        ),
        types.Resource(
            uri="runs://log",
            name="Run log",
            mimeType="application/json",
            description="Tool calls handled by this server, most recent first"
        )
    ]


@app.read_resource()
async def read_resource(uri: str) -> str:
    """
    Read a specific resource by URI.

    Supported URIs:
    - presets://list - Names of every preset
    - presets://{name} - One preset document (e.g. presets://binomial-5)
    - runs://log - Run log
    """
    uri = str(uri)
    logger.info(f"Reading resource: {uri}")

    if uri == "presets://list":
        return json.dumps({"presets": preset_names()}, indent=2)

    elif uri.startswith("presets://"):
        name = uri.replace("presets://", "")
        try:
            return json.dumps(get_preset(name), indent=2)
        except InputError:
            raise ValueError(f"Preset not found: {name}") from None

    elif uri == "runs://log":
        return json.dumps({"version": WORKBENCH_VERSION, "runs": get_run_logs()}, indent=2)

    else:
        raise ValueError(f"Unknown resource URI: {uri}")


@app.list_tools()
async def list_tools() -> list[types.Tool]:
    """
    List the workbench tools, one per CLI subcommand.
    """
    logger.info("Listing available tools")

    tools = []
    for name, properties in TOOL_INPUTS.items():
        command, action = tool_command(name)
        tools.append(types.Tool(
            name=name,
            description=f"{TOOL_DESCRIPTIONS[name]} (CLI: {command} {action})",
            inputSchema={
                "type": "object",
                "properties": {
                    **properties,
                    "seed": {"type": "integer", "default": DEFAULT_SEED},
                    "samples": {"type": "integer", "default": GATE_SAMPLE_COUNT}
                },
                "required": REQUIRED[name]
            }
        ))
    return tools


@app.call_tool()
async def call_tool(name: str, arguments: Any) -> list[types.TextContent]:
    """
    Execute a tool with the provided arguments and log the run.
    """
    logger.info(f"Calling tool: {name}")
    arguments = arguments or {}

    try:
        if name not in TOOL_INPUTS:
            raise ValueError(f"Unknown tool: {name}")

        status, document = execute(build_config(name, arguments))
        outcome = {EXIT_OK: "ok", EXIT_VIOLATION: "violation"}.get(status, "error")
        store_run_log(name, arguments, outcome, WORKBENCH_VERSION)
        document["status"] = outcome

        return [types.TextContent(
            type="text",
            text=dump_document(document)
        )]

    except (WorkbenchError, ValueError) as e:
        logger.error(f"Error executing tool {name}: {str(e)}")
        store_run_log(name, arguments, "error", WORKBENCH_VERSION)
        return [types.TextContent(
            type="text",
            text=json.dumps({
                "error": str(e),
                "tool": name
            }, indent=2)
        )]


@app.list_prompts()
async def list_prompts() -> list[types.Prompt]:
    """
    List available prompt templates.
    """
    logger.info("Listing available prompts")

    return [
        types.Prompt(
            name="explain-gamma-table",
            description="Explain whether a gamma table admits higher-order derivation sequences",
            arguments=[
                types.PromptArgument(
                    name="table",
                    description="Gamma table document or preset (default preset:negative-control)",
                    required=False
                )
            ]
        )
    ]


@app.get_prompt()
async def get_prompt(name: str, arguments: dict[str, str] | None) -> types.GetPromptResult:
    """
    Get a specific prompt template with arguments filled in.
    """
    logger.info(f"Getting prompt: {name}")

    if name != "explain-gamma-table":
        raise ValueError(f"Unknown prompt: {name}")

    source = arguments.get("table", "preset:negative-control") if arguments else "preset:negative-control"
    validation = validate_table(source)
    if not validation.valid:
        findings = json.dumps(validation.to_dict(), indent=2)
    else:
        cocycle = check_cocycle(validation.table)
        factorization = factorize(validation.table) if validation.table.is_nowhere_zero() else None
        findings = json.dumps({
            "table": validation.table.to_dict(),
            "cocycle": cocycle.to_dict(),
            "factorization": factorization.to_dict() if factorization else "table has zero entries"
        }, indent=2)

    prompt_text = f"""# Gamma Table Review

## Findings
{findings}

## Task
Explain these findings to a reader who knows the product rule for derivatives:

1. **Validity** - Is the table symmetric with ones on the boundary?
2. **Cocycle identity** - Which triples fail, and what do the two sides evaluate to?
3. **Factorization** - If a gamma vector exists, what sequence (gamma(k)/k!) d^k does it produce?
4. **Consequence** - Can a derivation sequence of every order be built on this table?

Quote the exact rational values from the findings.
"""

    return types.GetPromptResult(
        description="Review of a gamma table",
        messages=[
            types.PromptMessage(
                role="user",
                content=types.TextContent(
                    type="text",
                    text=prompt_text
                )
            )
        ]
    )


async def main():
    """Run the MCP server."""
    logger.info(f"Starting Leibniz Workbench MCP Server (version: {WORKBENCH_VERSION})")

    async with stdio_server() as (read_stream, write_stream):
        await app.run(
            read_stream,
            write_stream,
            app.create_initialization_options()
        )


if __name__ == "__main__":
    import asyncio
    asyncio.run(main())
