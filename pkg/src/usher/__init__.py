"""Preference-aware conversational workflow engine.

Adapts a multi-stage selection GUI in place (augment, filter, sort,
highlight) from preferences extracted during dialogue, and guides
navigation with alternative counts, backtrack proposals, and dead-end
records.
"""

__version__ = "0.1.0"
