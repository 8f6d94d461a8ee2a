"""Desk-scale resource guards with environment overrides."""

from __future__ import annotations

import os

DEFAULT_LIMIT = 10 ** 7

ENV_VARS = {
    "planes": "NORMALZETA_MAX_PLANES",
    "points": "NORMALZETA_MAX_POINTS",
    "lattices": "NORMALZETA_MAX_LATTICES",
}


class ResourceGuardError(RuntimeError):
    """An enumeration would exceed its guard; rerun with force=True to proceed."""


def limit(kind: str) -> int:
    raw = os.environ.get(ENV_VARS[kind])
    return int(float(raw)) if raw else DEFAULT_LIMIT


def ensure(size: int, kind: str, force: bool = False, what: str = "") -> None:
    if force:
        return
    cap = limit(kind)
    if size > cap:
        raise ResourceGuardError(
            f"{what or kind}: {size} items exceeds the guard {cap} "
            f"(set {ENV_VARS[kind]} or pass --force)")
