from risapp.experiments import gnuplot_script, run_sweep, write_sweep_csv

from ._base import ExperimentCommand


class Command(ExperimentCommand):
    help = "Barrido sobre un eje (iterations, group_size, noise_power, slots, n_r, ris_x_position)"
    comando = 'sweep'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--timings', action='store_true',
                            help="Agregar la columna wall_time (la salida deja de ser reproducible)")

    def run(self, config, options):
        rows = run_sweep(config)
        path = self.write_output(config.out, 'sweep.csv',
                                 lambda f: write_sweep_csv(f, rows, timings=options['timings']))
        if options['gnuplot']:
            self.write_output(config.out, 'sweep.gp', lambda f: f.write(gnuplot_script('sweep', 'sweep.csv')))
        self.store(options, config, rows=rows)
        self.stdout.write(self.style.SUCCESS(f"Barrido {config.axis}: {len(rows)} filas en {path}"))
