"""Bundled parameter sets s00-s07.

The three structure controls vary per set; everything else is shared
(n=10000, d=2, p=1, q=5, sigma_min=0.05, sigma_max=10).
"""

from __future__ import annotations

from .errors import ParameterError
from .model import GeneratorParams

# name -> (alpha0, lam, gamma)
PRESET_CONTROLS: dict[str, tuple[float, float, float]] = {
    "s00": (1.0, 0.5, 0.2),
    "s01": (1.0, 1.0, 0.2),
    "s02": (1.0, 1.0, 1.0),
    "s03": (5.0, 0.5, 0.2),
    "s04": (5.0, 1.0, 0.2),
    "s05": (5.0, 0.5, 1.0),
    "s06": (25.0, 0.5, 0.2),
    "s07": (25.0, 0.5, 1.0),
}

PRESET_NAMES = tuple(PRESET_CONTROLS)


def preset(name: str, *, n: int = 10000, d: int = 2, seed: int = 0) -> GeneratorParams:
    if name not in PRESET_CONTROLS:
        raise ParameterError(f"unknown preset {name!r}", ("preset",))
    alpha0, lam, gamma = PRESET_CONTROLS[name]
    return GeneratorParams(n=n, d=d, alpha0=alpha0, lam=lam, gamma=gamma, seed=seed)


def parse_preset_selection(text: str) -> list[str]:
    """Comma list and/or `s00..s04` ranges, in the given order, no duplicates."""
    chosen: list[str] = []
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        if ".." in piece:
            lo, _, hi = piece.partition("..")
            lo, hi = lo.strip(), hi.strip()
            if lo not in PRESET_CONTROLS or hi not in PRESET_CONTROLS:
                raise ParameterError(f"unknown preset range {piece!r}", ("presets",))
            i, j = PRESET_NAMES.index(lo), PRESET_NAMES.index(hi)
            if j < i:
                raise ParameterError(f"backwards preset range {piece!r}", ("presets",))
            names = list(PRESET_NAMES[i : j + 1])
        elif piece in PRESET_CONTROLS:
            names = [piece]
        else:
            raise ParameterError(f"unknown preset {piece!r}", ("presets",))
        for name in names:
            if name not in chosen:
                chosen.append(name)
    if not chosen:
        raise ParameterError("no presets selected", ("presets",))
    return chosen
