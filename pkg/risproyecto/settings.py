from pathlib import Path
import os
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.environ.get('RIS_SECRET_KEY', 'django-insecure-ris-crb-desarrollo-local')

DEBUG = os.environ.get('RIS_DEBUG', '1') == '1'

ALLOWED_HOSTS = []



INSTALLED_APPS = [
    'django.contrib.admin',
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'django.contrib.staticfiles',
    'risapp',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.contrib.sessions.middleware.SessionMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.middleware.csrf.CsrfViewMiddleware',
    'django.contrib.auth.middleware.AuthenticationMiddleware',
    'django.contrib.messages.middleware.MessageMiddleware',
    'django.middleware.clickjacking.XFrameOptionsMiddleware',
]

ROOT_URLCONF = 'risproyecto.urls'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.debug',
                'django.template.context_processors.request',
                'django.contrib.auth.context_processors.auth',
                'django.contrib.messages.context_processors.messages',
            ],
        },
    },
]

WSGI_APPLICATION = 'risproyecto.wsgi.application'


# sqlite por defecto; RIS_DB_ENGINE=mysql usa PyMySQL como MySQLdb
if os.environ.get('RIS_DB_ENGINE', 'sqlite') == 'mysql':
    import pymysql
    pymysql.install_as_MySQLdb()
    DATABASES = {
        'default': {
            'ENGINE': 'django.db.backends.mysql',
            'NAME': os.environ.get('RIS_DB_NAME', 'RISCRB'),
            'USER': os.environ.get('RIS_DB_USER', 'root'),
            'PASSWORD': os.environ.get('RIS_DB_PASSWORD', ''),
            'HOST': os.environ.get('RIS_DB_HOST', 'localhost'),
        }
    }
else:
    DATABASES = {
        'default': {
            'ENGINE': 'django.db.backends.sqlite3',
            'NAME': os.environ.get('RIS_DB_NAME', BASE_DIR / 'db.sqlite3'),
        }
    }


AUTH_PASSWORD_VALIDATORS = [
    {
        'NAME': 'django.contrib.auth.password_validation.UserAttributeSimilarityValidator',
    },
    {
        'NAME': 'django.contrib.auth.password_validation.MinimumLengthValidator',
    },
]



LANGUAGE_CODE = 'es-cl'

TIME_ZONE = 'America/Santiago'

USE_I18N = True

USE_TZ = True

STATIC_URL = 'static/'

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'
LOGIN_REDIRECT_URL = '/admin/'


RIS_WORKERS = max(1, int(os.environ.get('RIS_WORKERS', '1')))

RIS_LOG_LEVEL = os.environ.get('RIS_LOG_LEVEL', 'INFO').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'risapp': {
            'handlers': ['console'],
            'level': RIS_LOG_LEVEL,
            'propagate': False,
        },
    },
}

# Valores por defecto del documento de experimento (escenario de referencia)
RIS_DEFAULTS = {
    'scenario': {
        'n_bs': 8,
        'n_r': 64,
        'slots': 256,
        'noise_power_dbm': -120.0,
        'power_dbm': 20.0,
        'pathloss_exponent': 2.0,
        'spacing_bs': 0.5,
        'spacing_ris': 0.5,
        'carrier_hz': 3.5e9,
        'reference_gain': None,
        'target': [5.0, 0.0],
        'ris': [0.0, 20.0],
        'bs': [-10.0, 0.0],
        'rician_k': 10.0,
        'los_only': False,
        'nlos_seed': 0,
        'alpha_phase_seed': None,
    },
    'optimizer': {
        'mu_init': 1e-2,
        'epsilon': 1e-6,
        'max_iters': 2000,
        'max_halvings': 30,
        'max_doublings': 30,
        'restarts': 4,
        'expm_method': 'spectral',
    },
    'experiment': {
        'axis': 'n_r',
        'values': [8, 16, 32, 64],
        'schemes': ['proposed', 'random_unitary', 'diagonal_baseline'],
        'group_size': None,
        'seed': 0,
        'out': 'resultados',
        'random_samples': 100,
        'trials': 500,
        'pilots': 'ones',
    },
}
