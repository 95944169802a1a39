# infoflow/utils/__init__.py
# This file marks the utils directory as a Python package
# Purpose: Enable importing configuration, logging and error helpers. This is NOT for domain logic.
