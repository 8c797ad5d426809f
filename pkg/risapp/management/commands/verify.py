import argparse

from django.core.management.base import CommandError

from risapp.experiments import run_verify, write_verify_json

from ._base import EXIT_VERIFY, ExperimentCommand


class Command(ExperimentCommand):
    help = "Ejecuta la batería de oráculos y escribe verify.json"
    comando = 'verify'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--flip-gradient-sign', action='store_true', help=argparse.SUPPRESS)

    def run(self, config, options):
        report = run_verify(config, flip_gradient_sign=options['flip_gradient_sign'])
        path = self.write_output(config.out, 'verify.json', lambda f: write_verify_json(f, report))
        self.store(options, config, estado='OK' if report.passed else 'FALLA', resultado=report.as_dict())
        for check in report.checks:
            style = self.style.SUCCESS if check.passed else self.style.ERROR
            tag = 'info' if check.informational else ('ok' if check.passed else 'FALLA')
            self.stdout.write(style(f"[{tag}] {check.name}: {check.measured:.3e} (umbral {check.threshold:.1e})"))
        if not report.passed:
            raise CommandError(f"Verificación fallida: {', '.join(report.failures)} (ver {path})",
                               returncode=EXIT_VERIFY)
        self.stdout.write(self.style.SUCCESS(f"Todas las verificaciones pasaron ({path})"))
