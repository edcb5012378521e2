# Logging Smell Analysis Package

__version__ = "0.4.0"
TOOL_NAME = "logsmells"
