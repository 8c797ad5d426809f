import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='Experimento',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('comando', models.CharField(choices=[('optimize', 'Optimización'), ('converge', 'Convergencia'), ('sweep', 'Barrido'), ('verify', 'Verificación')], max_length=10)),
                ('eje', models.CharField(blank=True, max_length=20, verbose_name='Eje del barrido')),
                ('semilla', models.IntegerField(verbose_name='Semilla')),
                ('configuracion', models.JSONField(default=dict, verbose_name='Documento de configuración')),
                ('resultado', models.JSONField(blank=True, default=dict, verbose_name='Reporte')),
                ('estado', models.CharField(choices=[('OK', 'Completado'), ('FALLA', 'Verificación fallida')], default='OK', max_length=10)),
                ('directorio_salida', models.CharField(max_length=255, verbose_name='Directorio de salida')),
                ('creado', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-creado'],
            },
        ),
        migrations.CreateModel(
            name='FilaBarrido',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('orden', models.PositiveIntegerField()),
                ('eje', models.CharField(max_length=20)),
                ('valor_eje', models.FloatField(verbose_name='Valor del eje')),
                ('esquema', models.CharField(max_length=30)),
                ('g_valor', models.FloatField(verbose_name='g(Phi)')),
                ('crb_theta', models.FloatField(blank=True, null=True, verbose_name='CRB (rad^2)')),
                ('iteraciones', models.PositiveIntegerField(default=0)),
                ('tiempo_s', models.FloatField(default=0.0, verbose_name='Tiempo (s)')),
                ('experimento', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='filas', to='risapp.experimento')),
            ],
            options={
                'ordering': ['experimento', 'orden'],
            },
        ),
        migrations.CreateModel(
            name='PuntoTraza',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('orden', models.PositiveIntegerField()),
                ('serie', models.CharField(max_length=30)),
                ('iteracion', models.PositiveIntegerField(blank=True, null=True)),
                ('g_valor', models.FloatField(verbose_name='g(Phi)')),
                ('crb_theta', models.FloatField(blank=True, null=True, verbose_name='CRB (rad^2)')),
                ('mu', models.FloatField(blank=True, null=True)),
                ('eta', models.FloatField(blank=True, null=True)),
                ('deriva', models.FloatField(blank=True, null=True, verbose_name='||Phi^H Phi - I||_F')),
                ('mitades', models.PositiveIntegerField(blank=True, null=True)),
                ('duplicaciones', models.PositiveIntegerField(blank=True, null=True)),
                ('experimento', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='traza', to='risapp.experimento')),
            ],
            options={
                'ordering': ['experimento', 'orden'],
            },
        ),
    ]
