from risapp.experiments import gnuplot_script, run_optimize, write_trace_csv

from ._base import ExperimentCommand


class Command(ExperimentCommand):
    help = "Optimiza Phi (mejor de varios reinicios) y escribe trace.csv"
    comando = 'optimize'

    def run(self, config, options):
        result = run_optimize(config)
        path = self.write_output(config.out, 'trace.csv', lambda f: write_trace_csv(f, result.points))
        if options['gnuplot']:
            self.write_output(config.out, 'trace.gp', lambda f: f.write(gnuplot_script('trace', 'trace.csv')))
        self.store(options, config, points=result.points)
        trace = result.trace
        self.stdout.write(self.style.SUCCESS(
            f"{result.phi.architecture}: g = {trace.final_g:.6e}, CRB = {trace.final_crb:.4e} rad^2 "
            f"({trace.iterations} iteraciones, {trace.status})"))
        self.stdout.write(f"Traza escrita en {path}")
