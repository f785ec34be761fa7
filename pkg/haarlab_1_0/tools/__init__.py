# -*- coding: utf-8 -*-
from haarlab_1_0.tools.tool_runner import TOOLS, run_tool
from haarlab_1_0.tools.tool_schema import get_tools

__all__ = ["TOOLS", "run_tool", "get_tools"]
