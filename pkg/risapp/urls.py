from django.urls import path
from . import views

urlpatterns = [
    path('experimentos/<int:pk>/sweep.csv', views.exportar_barrido_csv, name='exportar_barrido'),
    path('experimentos/<int:pk>/trace.csv', views.exportar_traza_csv, name='exportar_traza'),
    path('experimentos/<int:pk>/verify.json', views.exportar_verificacion_json, name='exportar_verificacion'),
]
