"""Slot-synchronous model of a keystream pipeline with k XOF units.

Blocks are dealt round-robin: block b runs on unit ``b % k`` in slot
``b // k``.  All units finish a slot in lockstep, so the makespan is
``ceil(B / k)`` slots and the latency is that times the per-round latency.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, List, NamedTuple

MNIST_WORDS = 784
WORDS_PER_BLOCK = 17


@dataclass(frozen=True)
class PipelineConfig:
    xof_units: int = 1
    per_round_latency_us: float = 66.1
    words_per_block: int = WORDS_PER_BLOCK

    def __post_init__(self):
        if self.xof_units < 1 or self.words_per_block < 1 or not self.per_round_latency_us > 0:
            raise ValueError("xof_units, words_per_block and per_round_latency_us must be positive")


@dataclass(frozen=True)
class WorkloadSpec:
    total_words: int = MNIST_WORDS

    def __post_init__(self):
        if self.total_words < 0:
            raise ValueError("total_words must be >= 0")


class Assignment(NamedTuple):
    slot: int
    unit: int
    block: int


@dataclass(frozen=True)
class SimReport:
    xof_units: int
    blocks: int
    round_slots: int
    latency_us: float
    relative_throughput: float
    trace: List[Assignment] = field(repr=False, default_factory=list)

    def output_order(self) -> list[int]:
        """Blocks as reassembled on output: slot by slot, unit order within a slot."""
        return [a.block for a in sorted(self.trace, key=lambda a: (a.slot, a.unit))]


def blocks_needed(workload: WorkloadSpec, config: PipelineConfig) -> int:
    return -(-workload.total_words // config.words_per_block)


def _slots(blocks: int, units: int) -> int:
    return -(-blocks // units)


def schedule(config: PipelineConfig, workload: WorkloadSpec) -> SimReport:
    blocks = blocks_needed(workload, config)
    k = config.xof_units
    trace = [Assignment(b // k, b % k, b) for b in range(blocks)]
    slots = _slots(blocks, k)
    single = _slots(blocks, 1)
    throughput = single / slots if slots else 1.0
    return SimReport(
        xof_units=k,
        blocks=blocks,
        round_slots=slots,
        latency_us=round(slots * config.per_round_latency_us, 6),
        relative_throughput=throughput,
        trace=trace,
    )


def compare_configs(workload: WorkloadSpec, latency_us: float, unit_counts: Iterable[int],
                    words_per_block: int = WORDS_PER_BLOCK) -> list[SimReport]:
    """One report per unit count; throughput is always relative to one unit."""
    unit_counts = list(unit_counts)
    if not unit_counts:
        raise ValueError("unit_counts must not be empty")
    return [
        schedule(PipelineConfig(k, latency_us, words_per_block), workload)
        for k in unit_counts
    ]


def format_table(reports: Iterable[SimReport]) -> str:
    rows = [("units", "blocks", "round_slots", "latency_us", "rel_throughput")]
    for r in reports:
        rows.append((
            str(r.xof_units), str(r.blocks), str(r.round_slots),
            f"{r.latency_us:.1f}", f"{r.relative_throughput:.2f}x",
        ))
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in rows)


def trace_csv(report: SimReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["slot", "unit", "block"])
    writer.writerows(report.trace)
    return buf.getvalue()
