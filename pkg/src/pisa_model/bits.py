"""Small helpers for fixed-width unsigned bit-vectors held in Python ints."""

from __future__ import annotations


def mask(width: int) -> int:
    return (1 << width) - 1


def parse_int(text: str | int) -> int:
    """Parse ``0x``/``0b``/decimal text (or pass an int through)."""
    if isinstance(text, bool):
        raise ValueError(f"not an integer: {text!r}")
    if isinstance(text, int):
        return text
    return int(text.replace("_", ""), 0)


def split_chunks(value: int, width: int, chunk_width: int) -> list[int]:
    """Cut ``value`` into ``chunk_width``-bit pieces, most significant first.

    When ``chunk_width`` does not divide ``width`` the last (least
    significant) piece is narrower.
    """
    out = []
    remaining = width
    while remaining > 0:
        w = min(chunk_width, remaining)
        remaining -= w
        out.append((value >> remaining) & mask(w))
    return out


def chunk_widths(width: int, chunk_width: int) -> list[int]:
    full, rest = divmod(width, chunk_width)
    return [chunk_width] * full + ([rest] if rest else [])


def to_bytes(value: int, width: int) -> bytes:
    return value.to_bytes(width // 8, "big")
