from django.apps import AppConfig


class OvercompleteConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.overcomplete"
