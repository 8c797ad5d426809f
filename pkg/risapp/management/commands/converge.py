from risapp.experiments import gnuplot_script, run_convergence, write_trace_csv

from ._base import ExperimentCommand


class Command(ExperimentCommand):
    help = "Traza de convergencia del esquema propuesto con las referencias de los baselines"
    comando = 'converge'

    def run(self, config, options):
        result = run_convergence(config)
        path = self.write_output(config.out, 'trace.csv', lambda f: write_trace_csv(f, result.points))
        if options['gnuplot']:
            self.write_output(config.out, 'trace.gp', lambda f: f.write(gnuplot_script('trace', 'trace.csv')))
        self.store(options, config, points=result.points)
        self.stdout.write(self.style.SUCCESS(
            f"Convergencia en {result.trace.iterations} iteraciones: CRB = {result.trace.final_crb:.4e} rad^2"))
        self.stdout.write(f"Traza escrita en {path}")
