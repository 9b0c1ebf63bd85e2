"""
Annotated float types that accept unit-suffixed strings ("2.4GHz", "48 mT")
and validate to SI. Plain floats are rejected unless zero.
"""
from typing import Annotated

from pydantic import BeforeValidator, Field

from ervo.core.units import parse_quantity


def quantity(kind: str) -> BeforeValidator:
    return BeforeValidator(lambda v: parse_quantity(v, kind))


Frequency = Annotated[float, quantity("frequency")]
MagneticField = Annotated[float, quantity("field")]
Angle = Annotated[float, quantity("angle")]
Length = Annotated[float, quantity("length")]
Duration = Annotated[float, quantity("time")]
Temperature = Annotated[float, quantity("temperature")]
IntegratedAlpha = Annotated[float, quantity("alpha")]
Dipole = Annotated[float, quantity("dipole")]

# rates, widths and detunings
NonNegativeFrequency = Annotated[Frequency, Field(ge=0)]
