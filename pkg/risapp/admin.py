from django.contrib import admin
from .models import Experimento, FilaBarrido, PuntoTraza

class FilaBarridoInline(admin.TabularInline):
    model = FilaBarrido
    extra = 0

class PuntoTrazaInline(admin.TabularInline):
    model = PuntoTraza
    extra = 0

@admin.register(Experimento)
class ExperimentoAdmin(admin.ModelAdmin):
    list_display = ('id', 'comando', 'eje', 'semilla', 'estado', 'creado')
    list_filter = ('comando', 'estado', 'creado')
    inlines = [FilaBarridoInline, PuntoTrazaInline]

@admin.register(FilaBarrido)
class FilaBarridoAdmin(admin.ModelAdmin):
    list_display = ('experimento', 'eje', 'valor_eje', 'esquema', 'g_valor', 'crb_theta', 'iteraciones')
    list_filter = ('esquema', 'eje')

@admin.register(PuntoTraza)
class PuntoTrazaAdmin(admin.ModelAdmin):
    list_display = ('experimento', 'serie', 'iteracion', 'g_valor', 'crb_theta', 'mu')
    list_filter = ('serie',)
