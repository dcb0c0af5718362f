from __future__ import annotations

import math
import re

_PI_FORM = re.compile(r"^\s*(?:(\d+)\s*\*?\s*)?pi\s*(?:/\s*(\d+))?\s*$")


def parse_angle(text: str | float) -> float:
    """Parse ``1.57``, ``pi``, ``pi/4``, ``3pi/8`` or ``3*pi/8`` into radians."""
    if isinstance(text, (int, float)):
        return float(text)
    m = _PI_FORM.match(text.lower())
    if m:
        num = int(m.group(1)) if m.group(1) else 1
        den = int(m.group(2)) if m.group(2) else 1
        if den == 0:
            raise ValueError(f"zero denominator in angle {text!r}")
        return num * math.pi / den
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"cannot parse angle {text!r}") from None


def parse_grid(text: str) -> list[float]:
    """Comma list of angles, or ``start:stop:step`` with stop included."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid range needs start:stop:step, got {text!r}")
        start, stop, step = (parse_angle(p) for p in parts)
        if step <= 0:
            raise ValueError(f"grid step must be > 0, got {step}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + k * step for k in range(max(count, 0))]
    return [parse_angle(p) for p in text.split(",") if p.strip()]
