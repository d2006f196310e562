"""Comma-separated result files, written atomically.

Records: ``seed,agent,step,action,reward,expected_reward,best_expected,instant_regret,cum_regret``
Summary: ``agent,metric,mean,std,seeds``

Real numbers are printed with 6 significant digits; files are UTF-8 with LF
line endings.
"""
from __future__ import annotations

import os
import tempfile
from pathlib import Path

from .runner import RegretRecord, SummaryRow

__all__ = ["RECORDS_HEADER", "SUMMARY_HEADER", "format_records", "format_summary",
           "read_records", "write_outputs", "atomic_write"]

RECORDS_HEADER = "seed,agent,step,action,reward,expected_reward,best_expected,instant_regret,cum_regret"
SUMMARY_HEADER = "agent,metric,mean,std,seeds"


def _g(x: float) -> str:
    return f"{x:.6g}"


def format_records(records) -> str:
    lines = [RECORDS_HEADER]
    for r in records:
        lines.append(
            f"{r.seed},{r.agent},{r.step},{r.action},{r.reward},{_g(r.expected_reward)},"
            f"{_g(r.best_expected)},{_g(r.instant_regret)},{_g(r.cum_regret)}"
        )
    return "\n".join(lines) + "\n"


def format_summary(rows) -> str:
    lines = [SUMMARY_HEADER]
    lines += [f"{s.agent},{s.metric},{_g(s.mean)},{_g(s.std)},{s.seeds}" for s in rows]
    return "\n".join(lines) + "\n"


def read_records(path) -> list[RegretRecord]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != RECORDS_HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}")
        out = []
        for lineno, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").split(",")
            if len(parts) != 9:
                raise ValueError(f"{path}:{lineno}: expected 9 columns, got {len(parts)}")
            seed, agent, step, action, reward = parts[:5]
            out.append(RegretRecord(int(seed), agent, int(step), int(action), int(reward),
                                    *(float(p) for p in parts[5:])))
    return out


def atomic_write(path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_outputs(records, summary, config, out_dir=None) -> tuple[Path, Path]:
    out_dir = Path(out_dir) if out_dir is not None else None
    rec_path = config.output.records
    sum_path = config.output.summary
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        rec_path = out_dir / rec_path.name
        sum_path = out_dir / sum_path.name
    atomic_write(rec_path, format_records(records))
    atomic_write(sum_path, format_summary(summary))
    return rec_path, sum_path
