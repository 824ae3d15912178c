"""
StateSpec serializers for CLI input and report metadata.

Canonical JSON: {"variant": "SqueezedCoherent", "R": 3.0, "r": 0.5, "trunc": {...}};
parameters sit next to "variant", truncation settings under "trunc".
"""

import json
import math

from rest_framework.serializers import (BooleanField, ChoiceField, Field,
                                        FloatField, IntegerField, ListField,
                                        Serializer, ValidationError)

from apps.states.types import (TMSV, DisplacedNumber, FinitePhase, QubitBloch,
                               RotatedNumber, SGPhase, SqueezedCoherent,
                               StateSpec, StateVariant, TruncationConfig)
from apps.utils.exceptions import StateSpecError


class ComplexField(Field):
    """
    Complex number given as a number, a [re, im] pair or {"re": .., "im": ..}.
    """

    default_error_messages = {
        "invalid": "Expected a number, a [re, im] pair or an object with re/im.",
        "non_finite": "Complex components must be finite.",
    }

    def to_internal_value(self, data):
        try:
            if isinstance(data, bool):
                raise TypeError
            if isinstance(data, (int, float)):
                value = complex(float(data), 0.0)
            elif isinstance(data, (list, tuple)) and len(data) == 2:
                value = complex(float(data[0]), float(data[1]))
            elif isinstance(data, dict) and set(data) <= {"re", "im"}:
                value = complex(float(data.get("re", 0.0)), float(data.get("im", 0.0)))
            else:
                raise TypeError
        except (TypeError, ValueError):
            self.fail("invalid")

        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            self.fail("non_finite")
        return value

    def to_representation(self, value):
        value = complex(value)
        return [value.real, value.imag]


class FiniteFloatField(FloatField):
    default_error_messages = {"non_finite": "Value must be finite."}

    def to_internal_value(self, data):
        value = super().to_internal_value(data)
        if not math.isfinite(value):
            self.fail("non_finite")
        return value


class TruncationSerializer(Serializer):
    dim = IntegerField(required=False, allow_null=True, min_value=1)
    tail_mass_tol = FloatField(required=False, allow_null=True, min_value=0.0)
    auto_grow = BooleanField(required=False, default=True)
    ceiling = IntegerField(required=False, allow_null=True, min_value=2)

    def to_config(self, data) -> TruncationConfig:
        return TruncationConfig(
            dim=data.get("dim"),
            tail_mass_tol=data.get("tail_mass_tol"),
            auto_grow=data.get("auto_grow", True),
            ceiling=data.get("ceiling"),
        )


class VariantSerializer(Serializer):
    """Base for per-variant parameter serializers; unknown keys are rejected."""

    def validate(self, attrs):
        unknown = set(self.initial_data) - set(self.fields)
        if unknown:
            raise ValidationError(
                {key: "Unknown parameter for this variant." for key in sorted(unknown)}
            )
        return attrs


class QubitBlochSerializer(VariantSerializer):
    s = ListField(child=FiniteFloatField(), min_length=3, max_length=3)

    def validate_s(self, value):
        """Validate that the Bloch vector lies in the unit ball."""
        if math.sqrt(sum(component**2 for component in value)) > 1.0 + 1e-12:
            raise ValidationError("Bloch vector must satisfy |s| <= 1.")
        return value

    def to_parameters(self):
        return QubitBloch(s=tuple(self.validated_data["s"]))


class FinitePhaseSerializer(VariantSerializer):
    N = IntegerField(min_value=1)
    phases = ListField(child=FiniteFloatField(), required=False, allow_null=True)

    def validate(self, attrs):
        attrs = super().validate(attrs)
        phases = attrs.get("phases")
        if phases is not None and len(phases) != attrs["N"]:
            raise ValidationError({"phases": "Exactly N phases are required."})
        return attrs

    def to_parameters(self):
        phases = self.validated_data.get("phases")
        return FinitePhase(
            n=self.validated_data["N"], phases=tuple(phases) if phases is not None else None
        )


class RotatedNumberSerializer(VariantSerializer):
    n = IntegerField(min_value=0)
    m = IntegerField(min_value=0)

    def to_parameters(self):
        return RotatedNumber(n=self.validated_data["n"], m=self.validated_data["m"])


class GeometricSerializer(VariantSerializer):
    xi = ComplexField()

    def validate_xi(self, value):
        """Validate |xi| < 1."""
        if not abs(value) < 1:
            raise ValidationError("Parameter xi must satisfy |xi| < 1.")
        return value


class SGPhaseSerializer(GeometricSerializer):
    def to_parameters(self):
        return SGPhase(xi=self.validated_data["xi"])


class TMSVSerializer(GeometricSerializer):
    def to_parameters(self):
        return TMSV(xi=self.validated_data["xi"])


class SqueezedCoherentSerializer(VariantSerializer):
    R = FiniteFloatField()
    r = FiniteFloatField()

    def to_parameters(self):
        return SqueezedCoherent(R=self.validated_data["R"], r=self.validated_data["r"])


class DisplacedNumberSerializer(VariantSerializer):
    alpha = ComplexField()
    n0 = IntegerField(min_value=0)

    def to_parameters(self):
        return DisplacedNumber(alpha=self.validated_data["alpha"], n0=self.validated_data["n0"])


VARIANT_SERIALIZERS = {
    StateVariant.QUBIT_BLOCH.value: QubitBlochSerializer,
    StateVariant.FINITE_PHASE.value: FinitePhaseSerializer,
    StateVariant.ROTATED_NUMBER.value: RotatedNumberSerializer,
    StateVariant.SG_PHASE.value: SGPhaseSerializer,
    StateVariant.TMSV.value: TMSVSerializer,
    StateVariant.SQUEEZED_COHERENT.value: SqueezedCoherentSerializer,
    StateVariant.DISPLACED_NUMBER.value: DisplacedNumberSerializer,
}


class StateSpecSerializer(Serializer):
    """
    Serializer for StateSpec JSON.

    Dispatches the parameters next to "variant" to the serializer of that
    variant.
    """

    variant = ChoiceField(choices=StateVariant.choices)
    trunc = TruncationSerializer(required=False)

    def validate(self, attrs):
        """Validate the variant parameters."""
        parameters = {
            key: value
            for key, value in self.initial_data.items()
            if key not in ("variant", "trunc")
        }
        serializer = VARIANT_SERIALIZERS[attrs["variant"]](data=parameters)
        if not serializer.is_valid():
            raise ValidationError(serializer.errors)
        attrs["parameters"] = serializer.to_parameters()
        return attrs

    def to_spec(self) -> StateSpec:
        data = self.validated_data
        truncation = TruncationSerializer().to_config(data.get("trunc") or {})
        return StateSpec(
            variant=data["variant"], parameters=data["parameters"], truncation=truncation
        )


def parse_state_spec(data) -> StateSpec:
    """
    Parse StateSpec JSON (text or decoded object).

    Raises:
        StateSpecError: If the document cannot be decoded or validated
    """
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise StateSpecError(f"State spec is not valid JSON: {e.msg}.")
    if not isinstance(data, dict):
        raise StateSpecError("State spec must be a JSON object.")

    serializer = StateSpecSerializer(data=data)
    if not serializer.is_valid():
        raise StateSpecError("Invalid state specification.", errors=serializer.errors)
    return serializer.to_spec()


def state_spec_to_dict(spec: StateSpec) -> dict:
    """Canonical JSON-ready form of a StateSpec."""
    parameters = {}
    source = spec.parameters
    if isinstance(source, QubitBloch):
        parameters = {"s": list(source.s)}
    elif isinstance(source, FinitePhase):
        parameters = {"N": source.n}
        if source.phases is not None:
            parameters["phases"] = list(source.phases)
    elif isinstance(source, RotatedNumber):
        parameters = {"n": source.n, "m": source.m}
    elif isinstance(source, (SGPhase, TMSV)):
        parameters = {"xi": ComplexField().to_representation(source.xi)}
    elif isinstance(source, SqueezedCoherent):
        parameters = {"R": source.R, "r": source.r}
    elif isinstance(source, DisplacedNumber):
        parameters = {
            "alpha": ComplexField().to_representation(source.alpha),
            "n0": source.n0,
        }

    return {"variant": str(spec.variant), **parameters, "trunc": spec.truncation.as_dict()}
