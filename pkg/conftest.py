"""Makes the ``src`` package importable from the project root."""
