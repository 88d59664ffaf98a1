"""Application settings.

Uses environment variables (prefix ``FINSLER_``) or a ``.env`` file for the
numerical tolerances. Everything else is passed explicitly on the command line
or in request bodies.
"""

from __future__ import annotations

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", env_prefix="FINSLER_", extra="ignore")

    # Grid-max residual tolerance for classification verdicts (FINSLER_TOL).
    TOL: float = Field(default=1e-8, gt=0)

    # Shared threshold for guarded denominators: alpha, rho, s, m^2, rho + m^2 phi phi''.
    GUARD: float = Field(default=1e-12, gt=0)
    # phi - s phi' is guarded separately when forming Q(s).
    Q_GUARD: float = Field(default=1e-14, gt=0)

    # Pointwise identities such as y^i m_i = 0 or b^i h_ij = m_j.
    IDENTITY_TOL: float = Field(default=1e-12, gt=0)

    # Residual of the Berwald-form fit of Q(s).
    FIT_TOL: float = Field(default=1e-6, gt=0)

    # Absolute and relative tolerance of the exp-integral reconstruction of phi.
    QUAD_TOL: float = Field(default=1e-12, gt=0)


settings = Settings()
