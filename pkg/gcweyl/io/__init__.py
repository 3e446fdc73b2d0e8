from gcweyl.io.text import from_structured, parse, render, to_structured

__all__ = [
    "from_structured",
    "parse",
    "render",
    "to_structured",
]
