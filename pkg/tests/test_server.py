"""
Tests for the MCP server handlers.
"""

import json

import pytest

from data_store import RUN_LOGS
from errors import InputError
from server import (
    TOOL_INPUTS,
    build_config,
    call_tool,
    get_prompt,
    list_prompts,
    list_resources,
    list_tools,
    read_resource,
    tool_command,
)


class TestToolMapping:
    """Test tool names and argument mapping."""

    def test_tool_command(self):
        """Test tool names map onto CLI subcommands."""
        assert tool_command("system_solve_next") == ("system", "solve-next")
        assert tool_command("gamma_order_condition") == ("gamma", "order-condition")

    def test_build_config(self):
        """Test settings and inputs are separated."""
        config = build_config("indep_density", {
            "seq": "preset:iterates-1", "embed": {"t": 3.5}, "target": [0.5, 0.5], "eps": 0.001, "seed": 4
        })

        assert config.eps == 0.001
        assert config.seed == 4
        assert set(config.inputs) == {"seq", "embed", "target"}

    def test_missing_arguments(self):
        """Test required arguments are enforced."""
        with pytest.raises(InputError):
            build_config("deriv_apply", {"spec": "preset:derivative"})


class TestServerHandlers:
    """Test the MCP handlers."""

    def setup_method(self):
        """Clear the run log before each test."""
        RUN_LOGS.clear()

    async def test_list_tools(self):
        """Test one tool per CLI subcommand."""
        tools = await list_tools()

        assert {tool.name for tool in tools} == set(TOOL_INPUTS)
        assert len(tools) == 16
        solve = next(tool for tool in tools if tool.name == "system_solve_next")
        assert "(CLI: system solve-next)" in solve.description
        assert solve.inputSchema["required"] == ["seq"]

    async def test_call_tool(self):
        """Test a passing call returns the CLI document with status ok."""
        result = await call_tool("gamma_factorize", {"table": "preset:binomial-4"})
        doc = json.loads(result[0].text)

        assert doc["status"] == "ok"
        assert doc["gamma"] == ["1", "1", "2", "6", "24"]
        assert RUN_LOGS[-1]["tool"] == "gamma_factorize"

    async def test_call_tool_with_objects(self):
        """Test decoded JSON arguments are accepted."""
        result = await call_tool("deriv_apply", {
            "spec": {"generators": ["t"], "values": {"t": "t^2"}}, "expr": "1/t"
        })

        assert json.loads(result[0].text)["value"] == "-1"

    async def test_call_tool_violation(self):
        """Test a failed check is reported as a violation."""
        result = await call_tool("gamma_cocycle", {"table": "preset:negative-control"})
        doc = json.loads(result[0].text)

        assert doc["status"] == "violation"
        assert RUN_LOGS[-1]["status"] == "violation"

    async def test_call_tool_errors(self):
        """Test unknown tools and missing arguments."""
        unknown = json.loads((await call_tool("gamma_invert", {}))[0].text)
        missing = json.loads((await call_tool("gamma_cocycle", {}))[0].text)

        assert "error" in unknown
        assert "error" in missing
        assert [log["status"] for log in RUN_LOGS] == ["error", "error"]

    async def test_resources(self):
        """Test preset and run log resources."""
        uris = {str(resource.uri) for resource in await list_resources()}
        names = json.loads(await read_resource("presets://list"))["presets"]
        table = json.loads(await read_resource("presets://negative-control"))

        assert uris == {"presets://list", "runs://log"}
        assert "negative-control" in names
        assert table["n"] == 4

    async def test_run_log_resource(self):
        """Test calls show up in the run log, most recent first."""
        await call_tool("gamma_validate", {"table": "preset:binomial-2"})
        await call_tool("gamma_cocycle", {"table": "preset:binomial-2"})
        runs = json.loads(await read_resource("runs://log"))["runs"]

        assert [run["tool"] for run in runs] == ["gamma_cocycle", "gamma_validate"]

    async def test_unknown_resource(self):
        """Test unknown URIs and presets."""
        with pytest.raises(ValueError):
            await read_resource("tables://binomial")
        with pytest.raises(ValueError):
            await read_resource("presets://nothing")

    async def test_prompt(self):
        """Test the table review prompt embeds the cocycle findings."""
        prompts = await list_prompts()
        result = await get_prompt("explain-gamma-table", None)
        text = result.messages[0].content.text

        assert prompts[0].name == "explain-gamma-table"
        assert '"triple"' in text
        assert "Cocycle identity" in text

    async def test_unknown_prompt(self):
        """Test unknown prompt names."""
        with pytest.raises(ValueError):
            await get_prompt("explain-table", {})
