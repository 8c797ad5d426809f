"""Validación del documento JSON de experimento con formularios de Django.

El documento tiene tres secciones (``scenario``, ``optimizer`` y
``experiment``); cada una se valida con su formulario sobre los valores por
defecto de ``settings.RIS_DEFAULTS``. Los errores se informan como
``ConfigError`` con la línea del documento donde aparece la clave.
"""
import json
import math
import re
from dataclasses import dataclass, field
from typing import Optional, Tuple

from django import forms
from django.conf import settings

from .exceptions import ConfigError, GeometryError, RisError
from .optimizer import OptimizerConfig
from .scene import SPEED_OF_LIGHT, Scenario, dbm_to_watts, geometry_to_scene

AXES = ('iterations', 'group_size', 'noise_power', 'slots', 'n_r', 'ris_x_position')
SCHEMES = ('proposed', 'random_unitary', 'diagonal_baseline')
INTEGER_AXES = ('iterations', 'group_size', 'slots', 'n_r')


def _choices(values):
    return [(v, v) for v in values]


def _point(value, name):
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
            or not all(math.isfinite(v) for v in value)):
        raise forms.ValidationError(f"{name} debe ser un par [x, y] de números finitos.")
    return (float(value[0]), float(value[1]))


class ScenarioForm(forms.Form):
    n_bs = forms.IntegerField(min_value=1, label="Antenas de la BS")
    n_r = forms.IntegerField(min_value=1, label="Elementos de la RIS")
    slots = forms.IntegerField(min_value=1, label="Ranuras L")
    noise_power_dbm = forms.FloatField(label="Potencia de ruido (dBm)")
    power_dbm = forms.FloatField(label="Potencia de transmisión (dBm)")
    pathloss_exponent = forms.FloatField(min_value=0.0, label="Exponente de pérdida")
    spacing_bs = forms.FloatField(label="Espaciamiento BS (lambda)")
    spacing_ris = forms.FloatField(label="Espaciamiento RIS (lambda)")
    carrier_hz = forms.FloatField(label="Portadora (Hz)")
    reference_gain = forms.FloatField(required=False, label="Ganancia de referencia a 1 m")
    target = forms.JSONField(label="Posición del objetivo")
    ris = forms.JSONField(label="Posición de la RIS")
    bs = forms.JSONField(label="Posición de la BS")
    rician_k = forms.FloatField(min_value=0.0, label="Factor K del enlace RIS-BS")
    los_only = forms.BooleanField(required=False, label="¿Enlace RIS-BS sólo LoS?")
    nlos_seed = forms.IntegerField(min_value=0, label="Semilla NLoS")
    alpha_phase_seed = forms.IntegerField(required=False, min_value=0, label="Semilla de fase de alpha")

    def clean_target(self):
        return _point(self.cleaned_data.get('target'), 'target')

    def clean_ris(self):
        return _point(self.cleaned_data.get('ris'), 'ris')

    def clean_bs(self):
        return _point(self.cleaned_data.get('bs'), 'bs')

    def clean(self):
        cleaned_data = super().clean()
        for name in ('spacing_bs', 'spacing_ris', 'carrier_hz'):
            value = cleaned_data.get(name)
            if value is not None and value <= 0:
                self.add_error(name, "Debe ser positivo.")
        gain = cleaned_data.get('reference_gain')
        if gain is not None and gain <= 0:
            self.add_error('reference_gain', "Debe ser positiva.")
        if self.errors:
            return cleaned_data
        try:
            self.scene = self.build_scene(cleaned_data)
        except GeometryError as exc:
            self.add_error('target', f"Geometría inválida: {exc}")
        except RisError as exc:
            raise forms.ValidationError(str(exc))
        return cleaned_data

    @staticmethod
    def build_scene(data, ris=None):
        base = Scenario(
            n_bs=data['n_bs'],
            n_r=data['n_r'],
            theta=0.0,
            phi_r=0.0,
            phi_bs=0.0,
            alpha=1.0,
            power=dbm_to_watts(data['power_dbm']),
            noise_power=dbm_to_watts(data['noise_power_dbm']),
            slots=data['slots'],
            d_bs=data['spacing_bs'],
            d_ris=data['spacing_ris'],
            wavelength=SPEED_OF_LIGHT / data['carrier_hz'],
            pathloss_exponent=data['pathloss_exponent'],
            reference_gain=data.get('reference_gain'),
            rician_k=math.inf if data.get('los_only') else data['rician_k'],
            nlos_seed=data['nlos_seed'],
        )
        return geometry_to_scene(data['target'], ris or data['ris'], data['bs'], base,
                                 phase_seed=data.get('alpha_phase_seed'))


class OptimizerForm(forms.Form):
    mu_init = forms.FloatField(label="Paso inicial mu")
    epsilon = forms.FloatField(label="Tolerancia relativa")
    max_iters = forms.IntegerField(min_value=1, label="Iteraciones máximas")
    max_halvings = forms.IntegerField(min_value=1)
    max_doublings = forms.IntegerField(min_value=1)
    restarts = forms.IntegerField(min_value=1, label="Reinicios")
    expm_method = forms.ChoiceField(choices=_choices(('spectral', 'pade')))

    def clean(self):
        cleaned_data = super().clean()
        mu = cleaned_data.get('mu_init')
        if mu is not None and not mu > 0:
            self.add_error('mu_init', "Debe ser positivo.")
        eps = cleaned_data.get('epsilon')
        if eps is not None and not 0 < eps < 1:
            self.add_error('epsilon', "Debe estar en (0, 1).")
        return cleaned_data


class ExperimentConfigForm(forms.Form):
    axis = forms.ChoiceField(choices=_choices(AXES), label="Eje del barrido")
    values = forms.JSONField(label="Valores del eje")
    schemes = forms.MultipleChoiceField(choices=_choices(SCHEMES), label="Esquemas")
    group_size = forms.IntegerField(required=False, min_value=1, label="Tamaño de grupo")
    seed = forms.IntegerField(min_value=0, label="Semilla")
    out = forms.CharField(max_length=255, label="Directorio de salida")
    random_samples = forms.IntegerField(min_value=1)
    trials = forms.IntegerField(min_value=1, label="Ensayos Monte Carlo")
    pilots = forms.ChoiceField(choices=_choices(('ones', 'qpsk')))

    def clean_values(self):
        values = self.cleaned_data.get('values')
        if not isinstance(values, list) or not values:
            raise forms.ValidationError("Debe ser una lista no vacía.")
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)
                   for v in values):
            raise forms.ValidationError("Todos los valores deben ser números finitos.")
        if any(b < a for a, b in zip(values, values[1:])):
            raise forms.ValidationError("Los valores deben venir ordenados de menor a mayor.")
        return values

    def clean(self):
        cleaned_data = super().clean()
        axis = cleaned_data.get('axis')
        values = cleaned_data.get('values')
        if axis in INTEGER_AXES and values:
            if not all(float(v).is_integer() and v >= 1 for v in values):
                self.add_error('values', f"El eje {axis} exige enteros >= 1.")
            else:
                cleaned_data['values'] = [int(v) for v in values]
        elif values:
            cleaned_data['values'] = [float(v) for v in values]
        return cleaned_data


@dataclass(frozen=True)
class ExperimentConfig:
    scene: Scenario
    optimizer: OptimizerConfig
    axis: str
    values: Tuple
    schemes: Tuple[str, ...]
    seed: int
    out: str
    group_size: Optional[int]
    random_samples: int
    trials: int
    pilots: str
    scenario_data: dict = field(default_factory=dict, compare=False)
    document: dict = field(default_factory=dict, compare=False)

    @property
    def proposed_group(self):
        return self.scene.n_r if self.group_size is None else self.group_size

    def scene_at_ris_x(self, x):
        ris = (float(x), self.scenario_data['ris'][1])
        return ScenarioForm.build_scene(self.scenario_data, ris=ris)


SECTIONS = (
    ('scenario', ScenarioForm),
    ('optimizer', OptimizerForm),
    ('experiment', ExperimentConfigForm),
)


def _key_line(text, section, key=None):
    """Línea (1-based) donde aparece ``key`` dentro de ``section`` en el texto JSON."""
    if not text:
        return None
    match = re.search(rf'"{re.escape(section)}"\s*:', text)
    start = match.start() if match else 0
    if key is not None:
        inner = re.compile(rf'"{re.escape(key)}"\s*:').search(text, match.end() if match else 0)
        if inner:
            start = inner.start()
        elif not match:
            return None
    return text.count('\n', 0, start) + 1


def parse_document(text):
    try:
        document = json.loads(text) if text and text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"JSON inválido (columna {exc.colno}): {exc.msg}", line=exc.lineno) from exc
    if not isinstance(document, dict):
        raise ConfigError("el documento debe ser un objeto JSON", line=1)
    unknown = set(document) - {name for name, _ in SECTIONS}
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"sección desconocida: {key}", line=_key_line(text, key))
    return document


def _validate_section(text, name, form_class, defaults, given):
    if not isinstance(given, dict):
        raise ConfigError(f"la sección {name} debe ser un objeto", line=_key_line(text, name))
    unknown = set(given) - set(form_class.base_fields)
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"{name}.{key}: clave desconocida", line=_key_line(text, name, key))
    form = form_class(data={**defaults, **given})
    if not form.is_valid():
        key, messages = next(iter(form.errors.items()))
        if key == '__all__':
            raise ConfigError(f"{name}: {messages[0]}", line=_key_line(text, name))
        raise ConfigError(f"{name}.{key}: {messages[0]}", line=_key_line(text, name, key))
    return form


def load_experiment(text=None, overrides=None):
    """Valida el documento (texto JSON) y aplica las opciones de la línea de comandos."""
    document = parse_document(text)
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    defaults = settings.RIS_DEFAULTS
    forms_by_section = {}
    for name, form_class in SECTIONS:
        given = dict(document.get(name, {})) if isinstance(document.get(name, {}), dict) \
            else document.get(name)
        if name == 'experiment' and isinstance(given, dict):
            given.update(overrides.get('experiment', {}))
        if name == 'optimizer' and isinstance(given, dict) and 'restarts' in overrides:
            given['restarts'] = overrides['restarts']
        forms_by_section[name] = _validate_section(text, name, form_class, defaults[name], given)

    scenario = forms_by_section['scenario']
    experiment = forms_by_section['experiment'].cleaned_data
    opt = forms_by_section['optimizer'].cleaned_data
    scene = scenario.scene
    group_size = experiment.get('group_size')
    if group_size is not None and scene.n_r % group_size:
        raise ConfigError(f"experiment.group_size: {group_size} no divide N_R = {scene.n_r}",
                          line=_key_line(text, 'experiment', 'group_size'))
    if experiment['axis'] == 'n_r' and group_size is not None:
        bad = [v for v in experiment['values'] if v % group_size]
        if bad:
            raise ConfigError(f"experiment.group_size: {group_size} no divide N_R = {bad[0]}",
                              line=_key_line(text, 'experiment', 'group_size'))
    if experiment['axis'] == 'group_size':
        bad = [v for v in experiment['values'] if scene.n_r % v]
        if bad:
            raise ConfigError(f"experiment.values: {bad[0]} no divide N_R = {scene.n_r}",
                              line=_key_line(text, 'experiment', 'values'))
    try:
        optimizer = OptimizerConfig(seed=experiment['seed'], **opt)
    except ConfigError as exc:
        raise ConfigError(f"optimizer: {exc}", line=_key_line(text, 'optimizer')) from exc
    return ExperimentConfig(
        scene=scene,
        optimizer=optimizer,
        axis=experiment['axis'],
        values=tuple(experiment['values']),
        schemes=tuple(s for s in SCHEMES if s in experiment['schemes']),
        seed=experiment['seed'],
        out=experiment['out'],
        group_size=group_size,
        random_samples=experiment['random_samples'],
        trials=experiment['trials'],
        pilots=experiment['pilots'],
        scenario_data=dict(scenario.cleaned_data),
        document=document,
    )
