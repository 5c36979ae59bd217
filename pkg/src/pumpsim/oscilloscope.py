"""Oscilloscope record ingestion.

Wire format (bit-exact contract): header row
``t_s,vl1_V,ve1_V,vl2_V,ve2_V,vl3_V,ve3_V``, one row per sample, decimal
point '.', newline-terminated rows. The time column must be uniform to
within 0.1% of the mean step; anything else is rejected with the
offending line number.
"""

import numpy as np

from .errors import DataFormatError
from .power import Waveform

HEADER = "t_s,vl1_V,ve1_V,vl2_V,ve2_V,vl3_V,ve3_V"
MAX_JITTER_FRACTION = 1e-3


def read_channels(path):
    """Parse an oscilloscope CSV into three (v_l, v_e) waveform pairs.

    Returns (pairs, sample_rate). Raises DataFormatError with a 1-based
    line number on any contract violation.
    """
    with open(path, "r", encoding="ascii", errors="replace") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise DataFormatError("empty file", line=1)
    if lines[0].strip() != HEADER:
        raise DataFormatError(
            f"bad header: expected {HEADER!r}, got {lines[0].strip()!r}", line=1,
        )

    rows = []
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        fields = raw.split(",")
        if len(fields) != 7:
            raise DataFormatError(
                f"expected 7 comma-separated values, got {len(fields)}", line=lineno,
            )
        try:
            values = [float(f) for f in fields]
        except ValueError:
            raise DataFormatError(f"unparseable number in {raw!r}", line=lineno)
        if not all(np.isfinite(v) for v in values):
            raise DataFormatError("non-finite value", line=lineno)
        rows.append((lineno, values))

    if len(rows) < 2:
        raise DataFormatError("need at least 2 sample rows", line=len(lines))

    data = np.array([v for _, v in rows])
    t = data[:, 0]
    steps = np.diff(t)
    mean_step = float(steps.mean())
    if mean_step <= 0.0:
        bad = int(np.argmax(steps <= 0.0))
        raise DataFormatError("time column is not increasing", line=rows[bad + 1][0])
    jitter = np.abs(steps - mean_step)
    worst = int(np.argmax(jitter))
    if jitter[worst] > MAX_JITTER_FRACTION * mean_step:
        raise DataFormatError(
            f"time step jitter {jitter[worst]:.3g} s exceeds "
            f"{MAX_JITTER_FRACTION:.1%} of the mean step {mean_step:.3g} s",
            line=rows[worst + 1][0],
        )

    sample_rate = 1.0 / mean_step
    t0 = float(t[0])
    pairs = []
    for k in range(3):
        v_l = Waveform(sample_rate=sample_rate, samples=data[:, 1 + 2 * k],
                       unit="V", t0=t0)
        v_e = Waveform(sample_rate=sample_rate, samples=data[:, 2 + 2 * k],
                       unit="V", t0=t0)
        pairs.append((v_l, v_e))
    return pairs, sample_rate


def write_channels(path, pairs, sample_rate, t0=0.0):
    """Write three (v_l, v_e) pairs in the oscilloscope wire format.

    Used to generate fixtures and to round-trip synthesized channels.
    """
    pairs = list(pairs)
    if len(pairs) != 3:
        raise DataFormatError(f"exactly 3 channel pairs required, got {len(pairs)}")
    n = pairs[0][0].samples.size
    columns = []
    for v_l, v_e in pairs:
        columns.extend([v_l.samples, v_e.samples])
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(HEADER + "\n")
        for i in range(n):
            t = t0 + i / sample_rate
            row = [f"{t:.9g}"] + [f"{c[i]:.9g}" for c in columns]
            fh.write(",".join(row) + "\n")
