"""Barridos, trazas de convergencia y escritura de resultados (CSV/JSON).

Todas las salidas son funciones puras del documento de experimento y la
semilla: los puntos del barrido se reparten entre hilos pero las filas se
escriben en el orden del eje.
"""
import csv
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, Optional

from django.conf import settings

from .fisher import crb_from_g
from .forms import SCHEMES
from .optimizer import best_of_restarts, optimize_nested, random_unitary_objective
from .scene import dbm_to_watts
from .verification import run_checks

logger = logging.getLogger(__name__)

PROPOSED = 'proposed'
RANDOM_UNITARY = 'random_unitary'
DIAGONAL = 'diagonal_baseline'

SWEEP_HEADER = ('axis', 'value', 'scheme', 'g_value', 'crb_theta', 'crb_db', 'iterations')
TRACE_HEADER = ('series', 'iteration', 'g_value', 'crb_theta', 'crb_db', 'mu', 'eta',
                'unitarity_drift', 'halvings', 'doublings')


def crb_db(crb):
    if math.isinf(crb):
        return math.inf
    return 10.0 * math.log10(crb)


def format_number(value):
    if value is None:
        return ''
    if isinstance(value, int) and not isinstance(value, bool):
        return str(value)
    value = float(value)
    if math.isnan(value):
        return 'nan'
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return repr(value)


@dataclass(frozen=True)
class SweepRow:
    axis: str
    value: float
    scheme: str
    g_value: float
    crb_theta: float
    iterations: int
    wall_time: float = field(default=0.0, compare=False)

    @property
    def crb_db(self):
        return crb_db(self.crb_theta)


@dataclass(frozen=True)
class TracePoint:
    series: str
    iteration: Optional[int]
    g_value: float
    crb_theta: float
    mu: Optional[float] = None
    eta: Optional[float] = None
    unitarity_drift: Optional[float] = None
    halvings: Optional[int] = None
    doublings: Optional[int] = None

    @property
    def crb_db(self):
        return crb_db(self.crb_theta)


@dataclass
class ConvergenceResult:
    phi: object
    trace: object
    points: List[TracePoint]


def _workers(workers):
    return settings.RIS_WORKERS if workers is None else max(1, workers)


# -- escritura --------------------------------------------------------------

def write_sweep_csv(stream, rows, timings=False):
    writer = csv.writer(stream)
    writer.writerow(SWEEP_HEADER + (('wall_time',) if timings else ()))
    for row in rows:
        line = [row.axis, format_number(row.value), row.scheme, format_number(row.g_value),
                format_number(row.crb_theta), format_number(row.crb_db), format_number(row.iterations)]
        if timings:
            line.append(format_number(row.wall_time))
        writer.writerow(line)


def write_trace_csv(stream, points):
    writer = csv.writer(stream)
    writer.writerow(TRACE_HEADER)
    for p in points:
        writer.writerow([
            p.series, format_number(p.iteration), format_number(p.g_value),
            format_number(p.crb_theta), format_number(p.crb_db), format_number(p.mu),
            format_number(p.eta), format_number(p.unitarity_drift),
            format_number(p.halvings), format_number(p.doublings),
        ])


def write_verify_json(stream, report):
    json.dump(report.as_dict(), stream, indent=2, sort_keys=True)
    stream.write('\n')


def gnuplot_script(kind, csv_name):
    """Script de gnuplot para el CSV emitido (no se ejecuta)."""
    lines = [
        "set datafile separator ','",
        "set key outside",
        "set grid",
    ]
    if kind == 'sweep':
        lines += [
            "set xlabel 'valor del eje'",
            "set ylabel 'CRB (dB rad^2)'",
            f"esquemas = '{' '.join(SCHEMES)}'",
            f"plot for [s in esquemas] '{csv_name}' every ::1 "
            "using (strcol(3) eq s ? $2 : NaN):6 with linespoints title s",
        ]
    else:
        lines += [
            "set xlabel 'iteración'",
            "set ylabel 'CRB (dB rad^2)'",
            f"plot '{csv_name}' every ::1 using (strcol(1) eq 'proposed' ? $2 : NaN):5 "
            "with lines title 'propuesto'",
        ]
    return '\n'.join(lines) + '\n'


# -- trazas -----------------------------------------------------------------

def trace_points(trace, series=PROPOSED):
    points = [TracePoint(series, 0, trace.initial_g, trace.initial_crb)]
    for r in trace.records:
        points.append(TracePoint(series, r.iteration, r.g_value, r.crb_theta, r.mu, r.eta,
                                 r.unitarity_drift, r.halvings, r.doublings))
    return points


def run_optimize(config, workers=None):
    """Mejor Phi entre los reinicios para el tamaño de grupo configurado."""
    phi, trace = best_of_restarts(config.scene, config.proposed_group, config.optimizer,
                                  workers=_workers(workers))
    return ConvergenceResult(phi=phi, trace=trace, points=trace_points(trace))


def run_convergence(config, workers=None):
    """Traza del esquema propuesto más las referencias horizontales de los baselines."""
    workers = _workers(workers)
    scene = config.scene
    phi, trace = best_of_restarts(scene, config.proposed_group, config.optimizer, workers=workers)
    points = trace_points(trace)
    if RANDOM_UNITARY in config.schemes:
        baseline = random_unitary_objective(scene, config.seed, config.random_samples)
        points.append(TracePoint(RANDOM_UNITARY, None, baseline.g_mean, baseline.crb_mean))
    if DIAGONAL in config.schemes:
        _, diag = best_of_restarts(scene, 1, config.optimizer, workers=workers)
        points.append(TracePoint(DIAGONAL, None, diag.final_g, diag.final_crb))
    logger.info("convergencia: %d iteraciones, CRB final %.4e rad^2", trace.iterations, trace.final_crb)
    return ConvergenceResult(phi=phi, trace=trace, points=points)


# -- barridos ---------------------------------------------------------------

def _optimized(scene, group, config, optimizer, workers):
    """Óptimos del esquema propuesto y del diagonal, anidados para garantizar el orden."""
    groups = set()
    if PROPOSED in config.schemes:
        groups.add(group)
    if DIAGONAL in config.schemes:
        groups.add(1)
    if not groups:
        return {}
    return optimize_nested(scene, groups, optimizer, workers=workers)


def _rows(axis, value, scene, config, nested, group, elapsed):
    rows = []
    for scheme in config.schemes:
        if scheme == RANDOM_UNITARY:
            baseline = random_unitary_objective(scene, config.seed, config.random_samples)
            rows.append(SweepRow(axis, value, scheme, baseline.g_mean, baseline.crb_mean, 0, elapsed))
            continue
        trace = nested[group if scheme == PROPOSED else 1][1]
        g = trace.final_g
        rows.append(SweepRow(axis, value, scheme, g, crb_from_g(g, scene), trace.iterations, elapsed))
    return rows


def _scene_for(config, axis, value):
    scene = config.scene
    if axis == 'noise_power':
        return scene.replace(noise_power=dbm_to_watts(value))
    if axis == 'slots':
        return scene.replace(slots=int(value))
    if axis == 'n_r':
        return scene.replace(n_r=int(value))
    if axis == 'ris_x_position':
        return config.scene_at_ris_x(value)
    return scene


def _independent_point(config, axis, value):
    scene = _scene_for(config, axis, value)
    optimizer = config.optimizer
    if axis == 'iterations':
        optimizer = replace(optimizer, max_iters=int(value))
    group = config.group_size or scene.n_r
    start = time.perf_counter()
    nested = _optimized(scene, group, config, optimizer, workers=1)
    return _rows(axis, value, scene, config, nested, group, time.perf_counter() - start)


def run_sweep(config, workers=None):
    """Una fila por (valor del eje, esquema), en el orden del eje y de los esquemas."""
    workers = _workers(workers)
    axis = config.axis
    rows = []
    if axis == 'group_size':
        scene = config.scene
        start = time.perf_counter()
        groups = set(config.values)
        if DIAGONAL in config.schemes:
            groups.add(1)
        nested = optimize_nested(scene, groups, config.optimizer, workers=workers)
        elapsed = time.perf_counter() - start
        for value in config.values:
            rows += _rows(axis, value, scene, config, nested, value, elapsed)
    elif axis in ('noise_power', 'slots'):
        # g no depende de L ni de sigma^2: una sola Phi optimizada (congelada) sirve a todo el eje
        start = time.perf_counter()
        nested = _optimized(config.scene, config.proposed_group, config, config.optimizer, workers)
        elapsed = time.perf_counter() - start
        for value in config.values:
            scene = _scene_for(config, axis, value)
            rows += _rows(axis, value, scene, config, nested, config.proposed_group, elapsed)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for chunk in pool.map(lambda v: _independent_point(config, axis, v), config.values):
                rows += chunk
    logger.info("barrido %s: %d filas", axis, len(rows))
    return rows


def run_verify(config, flip_gradient_sign=False, workers=None):
    return run_checks(config.scene, config.optimizer, flip_gradient_sign=flip_gradient_sign,
                      trials=config.trials, workers=_workers(workers))
