"""
Output serializers for reports, sweeps and verification results.
"""

import math

from rest_framework.renderers import JSONRenderer
from rest_framework.serializers import (CharField, DictField, FloatField,
                                        IntegerField, ListField, Serializer,
                                        SerializerMethodField)

from apps.utils.constants import LIBRARY_NAME, LIBRARY_VERSION


def finite_or_none(value):
    """Replace non-finite floats by None, recursively through lists and dicts."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {key: finite_or_none(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [finite_or_none(item) for item in value]
    return value


def render_json(data) -> str:
    """Strict JSON text with two-space indentation."""
    return JSONRenderer().render(finite_or_none(data), renderer_context={"indent": 2}).decode()


class QuantifierReportSerializer(Serializer):
    """
    Serializer for a QuantifierReport.

    Extras such as number_variance are merged into the top level.
    """

    dim = IntegerField()
    c_h = FloatField()
    s_h = FloatField()
    nc_h = FloatField()
    c_hs = FloatField()
    s_hs = FloatField()
    nc_hs = FloatField()
    pythagoras_residual_h = FloatField()
    pythagoras_residual_hs = FloatField()
    x_sum = FloatField()
    renyi_half = FloatField()
    sqrt_purity = FloatField()
    duality_gap = FloatField()
    mean_photons = FloatField(allow_null=True)
    nc_h_infinite = FloatField(allow_null=True)
    truncation = DictField(allow_null=True)
    invariant_violations = SerializerMethodField()

    def get_invariant_violations(self, obj):
        return obj.invariant_violations()

    def to_representation(self, instance):
        data = super().to_representation(instance)
        data.update(instance.extras)
        return finite_or_none(data)


class SweepTableSerializer(Serializer):
    family = CharField()
    columns = ListField(child=CharField())
    rows = SerializerMethodField()
    metadata = DictField()

    def get_rows(self, obj):
        return obj.records()


class VerificationReportSerializer(Serializer):
    suite = CharField()
    seed = IntegerField()
    trials = IntegerField()
    verdict = SerializerMethodField()
    properties = SerializerMethodField()
    failures = ListField(child=CharField())
    dimension_trials = DictField()

    def get_verdict(self, obj):
        return "pass" if obj.passed else "fail"

    def get_properties(self, obj):
        return {
            name: {"passed": counter.passed, "failed": counter.failed}
            for name, counter in sorted(obj.counters.items())
        }


class OrthogonalityReportSerializer(Serializer):
    """Serializer for the phase-basis counterexample."""

    violation = FloatField()
    cross_term = FloatField()
    nodes = IntegerField()
    doublings = IntegerField()
    stability = FloatField()
    prefactor = CharField()
    square_defect = FloatField()
    off_diagonal_mass = FloatField()
    violates = SerializerMethodField()
    pythagoras = SerializerMethodField()
    coherence = SerializerMethodField()

    def get_violates(self, obj):
        return obj.violation > 1e-3

    def get_pythagoras(self, obj):
        terms = obj.pythagoras
        return {
            "total": terms.total,
            "coherence": terms.coherence,
            "certainty": terms.certainty,
            "cross_term": terms.cross_term,
            "residual": terms.residual,
        }

    def get_coherence(self, obj):
        return {
            "sqrt_purity_form": obj.coherence.sqrt_purity_form,
            "distance_form": obj.coherence.distance_form,
            "mismatch": obj.coherence.mismatch,
        }


def envelope(**payload) -> dict:
    """Top-level JSON document: library name and version, then the payload."""
    return {"library": LIBRARY_NAME, "version": LIBRARY_VERSION, **payload}

