"""Core functionality: data I/O, metrics, prompts, generation parsing and analysis."""
