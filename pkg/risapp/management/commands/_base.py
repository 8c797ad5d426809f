"""Base común de los comandos de experimento (carga de config, salidas, códigos de salida)."""
import os

from django.core.management.base import BaseCommand, CommandError
from django.db import DatabaseError, transaction

from risapp.exceptions import ConfigError, RisError
from risapp.forms import load_experiment
from risapp.models import Experimento, FilaBarrido, PuntoTraza

EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_VERIFY = 3


class ExperimentCommand(BaseCommand):
    comando = None

    def add_arguments(self, parser):
        parser.add_argument('--config', help="Documento JSON del experimento")
        parser.add_argument('--seed', type=int, help="Semilla (reemplaza la del documento)")
        parser.add_argument('--out', help="Directorio de salida")
        parser.add_argument('--schemes', help="Esquemas separados por coma")
        parser.add_argument('--restarts', type=int, help="Reinicios del optimizador")
        parser.add_argument('--gnuplot', action='store_true', help="Emitir también un script de gnuplot")
        parser.add_argument('--no-store', action='store_true', help="No guardar el experimento en la base")

    def load(self, options):
        text = None
        if options.get('config'):
            try:
                with open(options['config'], encoding='utf-8') as f:
                    text = f.read()
            except OSError as exc:
                raise CommandError(f"No se pudo leer {options['config']}: {exc}", returncode=EXIT_IO)
        experiment = {}
        if options.get('seed') is not None:
            experiment['seed'] = options['seed']
        if options.get('out'):
            experiment['out'] = options['out']
        if options.get('schemes'):
            experiment['schemes'] = [s.strip() for s in options['schemes'].split(',') if s.strip()]
        try:
            return load_experiment(text, {'experiment': experiment, 'restarts': options.get('restarts')})
        except ConfigError as exc:
            raise CommandError(f"Configuración inválida: {exc}", returncode=EXIT_CONFIG)

    def handle(self, *args, **options):
        config = self.load(options)
        try:
            self.run(config, options)
        except ConfigError as exc:
            raise CommandError(f"Configuración inválida: {exc}", returncode=EXIT_CONFIG)
        except OSError as exc:
            raise CommandError(f"Error de escritura: {exc}", returncode=EXIT_IO)
        except RisError as exc:
            raise CommandError(f"Error numérico: {exc}", returncode=EXIT_IO)

    def run(self, config, options):
        raise NotImplementedError

    def write_output(self, out, name, writer):
        os.makedirs(out, exist_ok=True)
        path = os.path.join(out, name)
        with open(path, 'w', newline='', encoding='utf-8') as f:
            writer(f)
        return path

    def store(self, options, config, rows=(), points=(), estado='OK', resultado=None):
        if options.get('no_store'):
            return None
        try:
            return self._store(options, config, rows, points, estado, resultado)
        except DatabaseError as exc:
            raise CommandError(
                f"No se pudo guardar el experimento ({exc}); ejecute `python manage.py migrate` "
                f"o use --no-store", returncode=EXIT_IO)

    def _store(self, options, config, rows, points, estado, resultado):
        with transaction.atomic():
            experimento = Experimento.objects.create(
                comando=self.comando,
                eje=config.axis if self.comando == 'sweep' else '',
                semilla=config.seed,
                configuracion=config.document,
                resultado=resultado or {},
                estado=estado,
                directorio_salida=config.out,
            )
            FilaBarrido.objects.bulk_create(
                [FilaBarrido.from_row(experimento, k, row) for k, row in enumerate(rows)])
            PuntoTraza.objects.bulk_create(
                [PuntoTraza.from_point(experimento, k, p) for k, p in enumerate(points)])
        return experimento
