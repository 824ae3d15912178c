from django.apps import AppConfig


class HellingerConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.hellinger"
