"""Numerical tolerances shared by all modules.

Every field can be overridden through an environment variable named
``OBFB_TOL_<FIELD>`` (upper case), e.g. ``OBFB_TOL_PR=1e-10``.
"""

import os
from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    # absolute stripping threshold for Laurent coefficients
    zero: float = 1e-12
    # |r1 - r2| <= root_match * max(1, |r1|) means "same root"
    root_match: float = 1e-7
    # relative residual below which a point is a root of a minor determinant
    root_residual: float = 1e-8
    # relative Frobenius residual accepting a pseudo-inverse PR solution
    pr: float = 1e-9
    # most negative value tolerated for a kernel quadratic form
    kernel_psd: float = 1e-10

    @classmethod
    def from_env(cls, environ=None) -> "Tolerances":
        environ = os.environ if environ is None else environ
        updates = {}
        for f in fields(cls):
            key = f"OBFB_TOL_{f.name.upper()}"
            if key in environ:
                updates[f.name] = float(environ[key])
        return replace(cls(), **updates)


def default_tolerances() -> Tolerances:
    return Tolerances.from_env()
