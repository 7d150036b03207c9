# Pydantic models and persisted documents