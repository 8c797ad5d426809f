"""Escenas pequeñas y reproducibles para las pruebas."""
import json

import numpy as np

from risapp.forms import load_experiment
from risapp.scene import Scenario, dbm_to_watts, geometry_to_scene


def make_scene(n_bs=4, n_r=4, theta=0.3, phi_r=-0.4, phi_bs=0.5, alpha=1.0, **changes):
    params = dict(
        n_bs=n_bs, n_r=n_r, theta=theta, phi_r=phi_r, phi_bs=phi_bs, alpha=alpha,
        power=0.1, noise_power=dbm_to_watts(-120.0), slots=256,
    )
    params.update(changes)
    return Scenario(**params)


def physical_scene(n_bs=8, n_r=8, **changes):
    """Escena derivada de la geometría de referencia (alpha del orden de 1e-7)."""
    base = make_scene(n_bs=n_bs, n_r=n_r, **changes)
    return geometry_to_scene((5.0, 0.0), (0.0, 20.0), (-10.0, 0.0), base)


def relative_error(a, b):
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)) / np.linalg.norm(b))


def small_document(experiment=None, scenario=None, optimizer=None):
    """Documento de experimento con una superficie chica y pocas iteraciones."""
    return {
        'scenario': {'n_bs': 4, 'n_r': 8, **(scenario or {})},
        'optimizer': {'max_iters': 60, 'restarts': 1, **(optimizer or {})},
        'experiment': {'random_samples': 10, 'trials': 20, **(experiment or {})},
    }


def small_config(experiment=None, scenario=None, optimizer=None):
    return load_experiment(json.dumps(small_document(experiment, scenario, optimizer)))
