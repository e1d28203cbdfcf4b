"""
EPAP helpers module

This module contains functions that may be shared
throughout the rest of the package.
"""
from EPAP.helpers.files import check_and_build_dir, get_filename, write_table
