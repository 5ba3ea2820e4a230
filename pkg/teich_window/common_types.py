"""Commonly used types."""
from typing import Mapping

SectionProxy = Mapping[str, str]
PantsCurveId = int
PantsId = int
