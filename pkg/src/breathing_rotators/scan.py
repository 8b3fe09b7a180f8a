"""Grid scans of Casimirs, Hessian determinants, Jacobian and kappa at a fixed frame."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCase, DomainError, RotatorError
from .hessian import (
    extract_kappa,
    gauge_with_invariants,
    hessian_blocks,
    hessian_det_closed,
    hessian_det_fd,
    hessian_det_schur,
    jacobian_casimir_from_jet,
)
from .models import classify_point
from .observables import casimirs_from_jet
from .sampling import random_frame

COLUMNS = ("P", "Q", "PP", "WW", "detH_closed", "detH_schur", "detH_fd", "jacobian", "kappa", "class")


@dataclass(frozen=True)
class Frame:
    """Kinematic frame shared by all rows: velocity, null direction, tangent direction."""

    V: np.ndarray
    N: np.ndarray
    direction: np.ndarray

    @classmethod
    def from_seed(cls, seed):
        return cls(*random_frame(np.random.default_rng(seed)))


def scan_row(model, P, Q, frame, m=1.0, ell=1.0):
    c = gauge_with_invariants(P, Q, frame.V, frame.N, frame.direction)
    jet = model.jet(P, Q)
    cas = casimirs_from_jet(jet, P, Q, m, ell)
    try:
        schur = hessian_det_schur(hessian_blocks(c, jet))
    except RotatorError:
        schur = math.nan
    try:
        kappa = extract_kappa(model, c, m, ell)
    except (DegenerateCase, RotatorError):
        kappa = math.nan
    return {
        "P": P,
        "Q": Q,
        "PP": cas.PP,
        "WW": cas.WW,
        "detH_closed": hessian_det_closed(jet, c),
        "detH_schur": schur,
        "detH_fd": hessian_det_fd(model, c),
        "jacobian": jacobian_casimir_from_jet(jet, P, Q, m, ell),
        "kappa": kappa,
        "class": classify_point(jet, P, Q).value,
    }


def _row_task(args):
    return scan_row(*args)


def scan(model, grid, frame, m=1.0, ell=1.0, workers=1):
    """Rows in grid order (P outer, Q inner) for points inside the model domain."""
    pts = [(p, q) for p, q in grid.points() if model.in_domain(p, q)]
    if not pts:
        raise DomainError("grid and model domain do not intersect")
    tasks = [(model, p, q, frame, m, ell) for p, q in pts]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(_row_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    return [_row_task(t) for t in tasks]


def _fmt(v):
    return v if isinstance(v, str) else repr(float(v))


def write_scan_csv(rows, stream):
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([_fmt(r[k]) for k in COLUMNS])


def scan_gnuplot(csv_path):
    return f"""set datafile separator ','
set key autotitle columnhead
set xlabel 'P'
set ylabel 'Q'
set multiplot layout 1,2
splot '{csv_path}' using 1:2:5 with points pt 7 ps 0.4 title 'det H (closed)'
splot '{csv_path}' using 1:2:8 with points pt 7 ps 0.4 title 'Jacobian'
unset multiplot
"""


def trajectory_gnuplot(csv_path):
    return f"""set datafile separator ','
set key autotitle columnhead
set multiplot layout 1,2
set xlabel 'x1'
set ylabel 'x2'
plot '{csv_path}' using 3:4 with lines title 'worldline'
set xlabel 'tau'
set ylabel 'Casimirs'
plot '{csv_path}' using 1:28 with lines title 'PP', '' using 1:29 with lines title 'WW'
unset multiplot
"""
