"""Unary spike-burst encoding of positive numerals.

A numeral v is a burst of v spikes spaced ``isi_ms`` apart; consecutive bursts
are separated by at least ``gap_ms`` of silence.  Times are Decimals so the
text format round-trips exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import Iterable, Sequence

from .errors import AmbiguousSpacing


def _dec(x) -> Decimal:
    if isinstance(x, Decimal):
        return x
    if isinstance(x, float):
        return Decimal(repr(x))
    return Decimal(x)


@dataclass(frozen=True)
class BurstConfig:
    isi_ms: Decimal = Decimal(2)
    gap_ms: Decimal = Decimal(20)

    def __post_init__(self):
        object.__setattr__(self, "isi_ms", _dec(self.isi_ms))
        object.__setattr__(self, "gap_ms", _dec(self.gap_ms))
        if self.isi_ms <= 0 or self.gap_ms <= 0:
            raise ValueError("spike intervals must be positive")
        if self.gap_ms <= self.isi_ms:
            raise ValueError(f"gap_ms ({self.gap_ms}) must exceed isi_ms ({self.isi_ms})")


DEFAULT_CONFIG = BurstConfig()


@dataclass(frozen=True)
class SpikeTrain:
    timestamps: tuple

    def __post_init__(self):
        ts = tuple(_dec(t) for t in self.timestamps)
        if any(t < 0 for t in ts):
            raise ValueError("spike times are non-negative")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("spike times must be strictly increasing")
        object.__setattr__(self, "timestamps", ts)

    def __len__(self):
        return len(self.timestamps)

    def shifted(self, delta) -> "SpikeTrain":
        return SpikeTrain(tuple(t + _dec(delta) for t in self.timestamps))


def encode(values: Sequence[int], cfg: BurstConfig = DEFAULT_CONFIG, t0=0) -> SpikeTrain:
    t = _dec(t0)
    out = []
    for i, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise ValueError(f"only positive numerals have a unary code, got {v!r}")
        if i:
            t += cfg.gap_ms
        for s in range(v):
            if s:
                t += cfg.isi_ms
            out.append(t)
    return SpikeTrain(tuple(out))


def decode(train: SpikeTrain, cfg: BurstConfig = DEFAULT_CONFIG) -> list:
    ts = train.timestamps
    if not ts:
        raise ValueError("cannot decode an empty spike train")
    values = [1]
    for a, b in zip(ts, ts[1:]):
        dt = b - a
        if dt <= cfg.isi_ms:
            values[-1] += 1
        elif dt >= cfg.gap_ms:
            values.append(1)
        else:
            raise AmbiguousSpacing(
                f"interval {dt} ms after t={a} lies between isi {cfg.isi_ms} and gap {cfg.gap_ms}")
    return values


def bursts(train: SpikeTrain, cfg: BurstConfig = DEFAULT_CONFIG) -> int:
    return len(decode(train, cfg))


def format_train(train: SpikeTrain) -> str:
    return "".join(f"{t}\n" for t in train.timestamps)


def parse_train(text: str) -> SpikeTrain:
    times = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            times.append(Decimal(line))
        except InvalidOperation:
            raise ValueError(f"line {lineno}: not a decimal timestamp: {line!r}") from None
    return SpikeTrain(tuple(times))


def encode_channels(channels: Iterable[Sequence[int]], cfg: BurstConfig = DEFAULT_CONFIG, t0=0) -> list:
    """One train per input channel, all sharing the clock origin ``t0``."""
    return [encode(vs, cfg, t0) for vs in channels]
