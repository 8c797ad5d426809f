import math

from django.db import models

from .experiments import SweepRow, TracePoint


def _finite(value):
    # MySQL no guarda inf; la CRB infinita se persiste como NULL
    return value if value is not None and math.isfinite(value) else None


class Experimento(models.Model):
    COMANDOS = (
        ('optimize', 'Optimización'),
        ('converge', 'Convergencia'),
        ('sweep', 'Barrido'),
        ('verify', 'Verificación'),
    )
    ESTADOS = (
        ('OK', 'Completado'),
        ('FALLA', 'Verificación fallida'),
    )

    comando = models.CharField(max_length=10, choices=COMANDOS)
    eje = models.CharField(max_length=20, blank=True, verbose_name="Eje del barrido")
    semilla = models.IntegerField(verbose_name="Semilla")
    configuracion = models.JSONField(default=dict, verbose_name="Documento de configuración")
    resultado = models.JSONField(default=dict, blank=True, verbose_name="Reporte")
    estado = models.CharField(max_length=10, choices=ESTADOS, default='OK')
    directorio_salida = models.CharField(max_length=255, verbose_name="Directorio de salida")
    creado = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-creado']

    def __str__(self):
        return f"{self.get_comando_display()} #{self.pk} (semilla {self.semilla})"


class FilaBarrido(models.Model):
    experimento = models.ForeignKey(Experimento, on_delete=models.CASCADE, related_name='filas')
    orden = models.PositiveIntegerField()
    eje = models.CharField(max_length=20)
    valor_eje = models.FloatField(verbose_name="Valor del eje")
    esquema = models.CharField(max_length=30)
    g_valor = models.FloatField(verbose_name="g(Phi)")
    crb_theta = models.FloatField(null=True, blank=True, verbose_name="CRB (rad^2)")
    iteraciones = models.PositiveIntegerField(default=0)
    tiempo_s = models.FloatField(default=0.0, verbose_name="Tiempo (s)")

    class Meta:
        ordering = ['experimento', 'orden']

    @classmethod
    def from_row(cls, experimento, orden, row):
        return cls(experimento=experimento, orden=orden, eje=row.axis, valor_eje=row.value,
                   esquema=row.scheme, g_valor=row.g_value, crb_theta=_finite(row.crb_theta),
                   iteraciones=row.iterations, tiempo_s=row.wall_time)

    def as_row(self):
        value = int(self.valor_eje) if self.eje in ('iterations', 'group_size', 'slots', 'n_r') \
            else self.valor_eje
        crb = math.inf if self.crb_theta is None else self.crb_theta
        return SweepRow(self.eje, value, self.esquema, self.g_valor, crb, self.iteraciones, self.tiempo_s)

    def __str__(self):
        return f"{self.esquema} @ {self.eje}={self.valor_eje}"


class PuntoTraza(models.Model):
    experimento = models.ForeignKey(Experimento, on_delete=models.CASCADE, related_name='traza')
    orden = models.PositiveIntegerField()
    serie = models.CharField(max_length=30)
    iteracion = models.PositiveIntegerField(null=True, blank=True)
    g_valor = models.FloatField(verbose_name="g(Phi)")
    crb_theta = models.FloatField(null=True, blank=True, verbose_name="CRB (rad^2)")
    mu = models.FloatField(null=True, blank=True)
    eta = models.FloatField(null=True, blank=True)
    deriva = models.FloatField(null=True, blank=True, verbose_name="||Phi^H Phi - I||_F")
    mitades = models.PositiveIntegerField(null=True, blank=True)
    duplicaciones = models.PositiveIntegerField(null=True, blank=True)

    class Meta:
        ordering = ['experimento', 'orden']

    @classmethod
    def from_point(cls, experimento, orden, p):
        return cls(experimento=experimento, orden=orden, serie=p.series, iteracion=p.iteration,
                   g_valor=p.g_value, crb_theta=_finite(p.crb_theta), mu=p.mu, eta=p.eta,
                   deriva=p.unitarity_drift, mitades=p.halvings, duplicaciones=p.doublings)

    def as_point(self):
        crb = math.inf if self.crb_theta is None else self.crb_theta
        return TracePoint(self.serie, self.iteracion, self.g_valor, crb, self.mu, self.eta,
                          self.deriva, self.mitades, self.duplicaciones)

    def __str__(self):
        return f"{self.serie} iter {self.iteracion}"
