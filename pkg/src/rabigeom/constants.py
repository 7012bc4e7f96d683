"""Physical constants (CODATA 2018), centralized so absolute Rabi frequencies
are reproducible.  All values in SI units."""

import math

CONSTANTS_VERSION = "CODATA-2018"

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact
PLANCK = 6.626_070_15e-34  # J s, exact
HBAR = PLANCK / (2.0 * math.pi)  # J s
ELEMENTARY_CHARGE = 1.602_176_634e-19  # C, exact
FINE_STRUCTURE = 7.297_352_5693e-3  # dimensionless
