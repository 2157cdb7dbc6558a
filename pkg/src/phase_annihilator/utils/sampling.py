"""CSV export of sampled phase curves: columns t, g, re_h, im_h."""

import csv
from pathlib import Path
from typing import IO, List, Tuple, Union

import numpy as np

from ..core.phase import PhaseTree, eval_g, eval_h
from .file_utils import ensure_parent_dir

HEADER = ("t", "g", "re_h", "im_h")

Row = Tuple[float, float, float, float]


def sample_rows(tree: PhaseTree, n_samples: int) -> List[Row]:
    """g and h at n_samples uniform points of [0,1], endpoints included."""
    if n_samples < 1:
        raise ValueError(f"Need at least one sample, got {n_samples}")
    ts = np.linspace(0.0, 1.0, n_samples) if n_samples > 1 else np.array([0.0])
    g = np.asarray(eval_g(tree, ts))
    h = np.asarray(eval_h(tree, ts))
    return [(float(t), float(gv), float(hv.real), float(hv.imag)) for t, gv, hv in zip(ts, g, h)]


def _format(value: float) -> str:
    text = f"{value:.17g}"
    return "0" if text == "-0" else text


def write_samples(rows: List[Row], target: Union[Path, IO[str]]) -> None:
    """Write rows with ',' delimiter and 17 significant digits."""
    if isinstance(target, (str, Path)):
        with ensure_parent_dir(Path(target)).open("w", encoding="utf-8", newline="") as handle:
            write_samples(rows, handle)
        return
    writer = csv.writer(target, lineterminator="\n")
    writer.writerow(HEADER)
    for row in rows:
        writer.writerow([_format(v) for v in row])
