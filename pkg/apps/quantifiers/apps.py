from django.apps import AppConfig


class QuantifiersConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.quantifiers"
