"""Command-line interface: the dabsa app and its command groups."""
