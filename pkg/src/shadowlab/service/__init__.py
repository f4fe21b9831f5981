"""HTTP service wrapper and the JSON-level operation handlers."""
