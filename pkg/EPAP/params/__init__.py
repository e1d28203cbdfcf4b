"""
Parameter containers
"""
from .base import BaseParameters
