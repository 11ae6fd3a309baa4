"""Backend selection: compiled extension when available, pure Python otherwise.

Set ``SIPSTICKY_BACKEND=pure`` (or ``compiled``) to force a choice, or call
:func:`set_backend` at runtime. Monte Carlo routines give bit-identical
output on both backends for a fixed seed; uniformization agrees to rounding.
"""

from __future__ import annotations

import os

from . import _mc_pure

try:
    from . import _mc_speed
except ImportError:  # extension not built; fall back silently
    _mc_speed = None

_MODULES = {"pure": _mc_pure}
if _mc_speed is not None:
    _MODULES["compiled"] = _mc_speed

_env = os.environ.get("SIPSTICKY_BACKEND")
if _env in _MODULES:
    _active = _MODULES[_env]
elif _env not in (None, ""):
    raise ImportError(f"SIPSTICKY_BACKEND={_env!r} is not available")
else:
    _active = _MODULES.get("compiled", _mc_pure)


def available_backends() -> tuple:
    return tuple(sorted(_MODULES))


def backend_name() -> str:
    return _active.BACKEND


def set_backend(name: str) -> None:
    global _active
    if name not in _MODULES:
        raise ValueError(f"backend {name!r} not available; have {available_backends()}")
    _active = _MODULES[name]


def get_module(name: str | None = None):
    """The active kernel module, or a specific one by name."""
    if name is None:
        return _active
    if name not in _MODULES:
        raise ValueError(f"backend {name!r} not available; have {available_backends()}")
    return _MODULES[name]
