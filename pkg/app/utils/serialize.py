"""Text forms, input parsing and JSON encoding."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Sequence

import numpy as np
from sympy import Rational

from app.exceptions import ValidationError
from app.models.additive import AdditivePoly
from app.models.field import (FieldDesc, FieldElement, embed, field_create,
                              parse_element)
from app.utils.limits import DEFAULT_LIMITS, Limits


def rational(x) -> dict:
    """Exact rationals as {"num": …, "den": …}."""
    x = Rational(x)
    return {'num': int(x.p), 'den': int(x.q)}


def poly_text(f: AdditivePoly) -> str:
    coeffs = ', '.join(str(c) for c in f.coeffs)
    return f"q={f.p}^{f.base.n}; coeffs=[{coeffs}]"


def parse_coefficient(text: str, F: FieldDesc) -> FieldElement:
    """An integer, a comma-separated coordinate vector, or a full element text form."""
    text = str(text).strip()
    if not text:
        raise ValidationError("empty coefficient")
    if ':' in text:
        x = parse_element(text)
        if x.field.p != F.p or F.n % x.field.n:
            raise ValidationError(f"{text} does not lie in a subfield of F_{F.p}^{F.n}")
        return embed(x, F)
    try:
        parts = [int(c) for c in text.split(',')]
    except ValueError:
        raise ValidationError(f"malformed coefficient {text!r}")
    if len(parts) == 1:
        return F.constant(parts[0])
    return F.element(parts)


def parse_r(text: str | Sequence[str], F: FieldDesc, e: Optional[int] = None) -> AdditivePoly:
    """Constant-first coefficient list; a list shorter than e + 1 fills the highest coefficients."""
    entries = [t for t in text.split(';')] if isinstance(text, str) else [str(t) for t in text]
    entries = [t for t in (s.strip() for s in entries) if t]
    if not entries:
        raise ValidationError("R needs at least one coefficient")
    if e is None:
        e = len(entries) - 1
    if e < 0:
        raise ValidationError(f"e must be non-negative, got {e}")
    if len(entries) > e + 1:
        raise ValidationError(f"{len(entries)} coefficients given for top index e = {e}")
    coeffs = [F.zero()] * (e + 1 - len(entries)) + [parse_coefficient(t, F) for t in entries]
    if coeffs[e].is_zero():
        raise ValidationError(f"the coefficient a_{e} of x^(p^{e}) must be nonzero")
    return AdditivePoly(F, tuple(coeffs))


def base_field(p: int, f: int, limits: Limits = DEFAULT_LIMITS) -> FieldDesc:
    if f < 1:
        raise ValidationError(f"f must be at least 1, got {f}")
    return field_create(p, f, limits.field_bits)


def _default(obj: Any):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, FieldElement):
        return str(obj)
    if isinstance(obj, Rational):
        return rational(obj)
    raise TypeError(f"{type(obj).__name__} is not JSON serialisable")


def dumps(doc: Mapping) -> str:
    """Deterministic UTF-8 JSON (sorted keys, fixed indentation)."""
    return json.dumps(doc, default=_default, sort_keys=True, ensure_ascii=False, indent=2)


@dataclass(frozen=True)
class InputSpec:
    p: int
    f: int
    R: tuple[str, ...]
    m: int = 1
    e: Optional[int] = None
    curve: bool = False
    max_k: Optional[int] = None
    oracle: bool = False
    extra: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> 'InputSpec':
        try:
            p, f = int(data['p']), int(data.get('f', 1))
            R = data['R']
        except KeyError as e:
            raise ValidationError(f"input is missing the field {e}")
        except (TypeError, ValueError) as e:
            raise ValidationError(f"malformed input: {e}")
        if isinstance(R, str):
            R = [t for t in R.split(';')]
        flags = data.get('flags', {})
        max_k = flags.get('max_k', data.get('max_k'))
        known = {'p', 'f', 'R', 'm', 'e', 'flags', 'curve', 'max_k', 'oracle'}
        return cls(p=p, f=f, R=tuple(str(t) for t in R), m=int(data.get('m', 1)),
                   e=None if data.get('e') is None else int(data['e']),
                   curve=bool(flags.get('curve', data.get('curve', False))),
                   max_k=None if max_k is None else int(max_k),
                   oracle=bool(flags.get('oracle', data.get('oracle', False))),
                   extra={k: v for k, v in data.items() if k not in known})


def load_input(file_path: str) -> InputSpec:
    """Read an InputSpec document based on its extension."""
    _, ext = os.path.splitext(file_path)
    if ext.lower() != '.json':
        raise ValidationError(f"Unsupported input format: {ext}")
    try:
        with open(file_path, 'r', encoding='utf-8') as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ValidationError(f"cannot read {file_path}: {e}")
    if not isinstance(data, Mapping):
        raise ValidationError("the input document must be a JSON object")
    return InputSpec.from_mapping(data)
