from django.apps import AppConfig


class RisappConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'risapp'
    verbose_name = 'Sensado AOA con BD-RIS'
