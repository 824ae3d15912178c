from django.apps import AppConfig


class InfiniteConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.infinite"
