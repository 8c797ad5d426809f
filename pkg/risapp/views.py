from django.shortcuts import get_object_or_404
from django.contrib.auth.decorators import login_required
from django.http import HttpResponse, JsonResponse
from .models import Experimento
from .experiments import write_sweep_csv, write_trace_csv


@login_required
def exportar_barrido_csv(request, pk):
    experimento = get_object_or_404(Experimento, pk=pk, comando='sweep')
    response = HttpResponse(content_type='text/csv')
    response['Content-Disposition'] = f'attachment; filename="sweep_{pk}.csv"'
    timings = request.GET.get('tiempos') == '1'
    write_sweep_csv(response, [fila.as_row() for fila in experimento.filas.all()], timings=timings)
    return response


@login_required
def exportar_traza_csv(request, pk):
    experimento = get_object_or_404(Experimento, pk=pk)
    response = HttpResponse(content_type='text/csv')
    response['Content-Disposition'] = f'attachment; filename="trace_{pk}.csv"'
    write_trace_csv(response, [punto.as_point() for punto in experimento.traza.all()])
    return response


@login_required
def exportar_verificacion_json(request, pk):
    experimento = get_object_or_404(Experimento, pk=pk, comando='verify')
    return JsonResponse(experimento.resultado, json_dumps_params={'indent': 2, 'sort_keys': True})
