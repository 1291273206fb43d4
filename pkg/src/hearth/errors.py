"""Common error base for the engine.

Every operational error raised by hearth derives from HearthError so the CLI
can map them to exit code 1 while genuine bugs still surface as tracebacks.
"""


class HearthError(Exception):
    pass
