# infoflow/__init__.py
# This file marks the infoflow directory as a Python package
# Purpose: Enable importing the rate allocation library and expose its version. This is NOT for application logic or configuration.

__version__ = "1.0.0"
