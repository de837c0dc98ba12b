"""Pydantic request/response models for the lab service.

Rationals arrive as "num/den" strings and leave as {"num": ..., "den": ...}
objects; programs, outputs and sequences are ASCII '0'/'1' strings.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, field_validator

from ..bits import validate_bits
from ..rationals import parse_rational

PriorKindName = Literal["kt", "fast"]


def _check_bits(value: str, name: str) -> str:
    try:
        return validate_bits(value, name=name)
    except ValueError as exc:
        raise ValueError(str(exc)) from exc


class RationalPair(BaseModel):
    num: int
    den: int


class PriorRequest(BaseModel):
    kind: PriorKindName
    x: str = ""
    epsilon: str = "1/2"
    k_cap: int = Field(default=20, ge=1)
    workers: int = Field(default=1, ge=1)

    @field_validator("x")
    @classmethod
    def _bits(cls, v: str) -> str:
        return _check_bits(v, "x")

    @field_validator("epsilon")
    @classmethod
    def _eps(cls, v: str) -> str:
        parse_rational(v)
        return v


class PriorResponse(BaseModel):
    kind: PriorKindName
    x: str
    lower: RationalPair
    tail: RationalPair
    k: int
    epsilon: RationalPair
    certified: bool
    phases_needed: int | None


class ConditionalRequest(BaseModel):
    kind: PriorKindName
    prefix: str = ""
    bit: Literal["0", "1"]
    epsilon: str = "1/2"
    k_cap: int = Field(default=20, ge=1)

    @field_validator("prefix")
    @classmethod
    def _bits(cls, v: str) -> str:
        return _check_bits(v, "prefix")


class ConditionalResponse(BaseModel):
    kind: PriorKindName
    prefix: str
    bit: str
    low: RationalPair
    high: RationalPair


class EnumerateRequest(BaseModel):
    k: int = Field(ge=1)
    mode: Literal["naive", "tree"] = "tree"
    workers: int = Field(default=1, ge=1)


class RecordModel(BaseModel):
    program: str
    output: str
    time: int
    firstPhase: int


class EnumerateResponse(BaseModel):
    k: int
    mode: str
    record_count: int
    naive_step_count: int | None
    records: list[RecordModel]


class DecoderRequest(BaseModel):
    measure: str = "uniform"
    op: Literal["run", "km", "mass", "interval", "eval"]
    x: str = ""
    input_bits: str = ""
    max_output: int = Field(default=64, ge=0)
    depth: int = Field(default=12, ge=0)

    @field_validator("x", "input_bits")
    @classmethod
    def _bits(cls, v: str) -> str:
        return _check_bits(v, "bit string")


class DecoderResponse(BaseModel):
    measure: str
    op: str
    output: str | None = None
    km: int | None = None
    mass: RationalPair | None = None
    low: RationalPair | None = None
    high: RationalPair | None = None
    value: RationalPair | None = None


class PredictRequest(BaseModel):
    env: str = "detseq:alternating"
    kind: PriorKindName = "fast"
    n: int = Field(default=16, ge=1)
    epsilon: str = "1/2"
    seed: int = 0
    tie_break: Literal["0", "1"] = "0"
    k_cap: int = Field(default=20, ge=1)
    workers: int = Field(default=1, ge=1)
    # Desk-scale guards; explicit override via max_n
    max_n: int | None = None


class TraceStepModel(BaseModel):
    t: int
    x_t: str
    y_t: str
    informed_y: str
    loss: RationalPair
    cond0_low: RationalPair
    cond0_high: RationalPair
    cond1_low: RationalPair
    cond1_high: RationalPair
    k_used: int
    certified: bool
    cum_loss: RationalPair
    cum_informed_loss: RationalPair


class PredictResponse(BaseModel):
    env: str
    kind: PriorKindName
    n: int
    seed: int
    tie_break: str
    k_cap: int
    sequence: str
    error_count: int
    total_loss: RationalPair
    total_informed_loss: RationalPair
    final_lower: RationalPair
    d_hat: float | None
    deviation_low: RationalPair
    deviation_high: RationalPair
    uncertified_steps: list[int]
    steps: list[TraceStepModel]


class AdversarialRequest(BaseModel):
    kind: PriorKindName
    epsilon: str = "1/2"
    n: int = Field(default=8, ge=1)
    k_cap: int = Field(default=20, ge=1)


class AdversarialResponse(BaseModel):
    kind: PriorKindName
    n: int
    x: str


class VerifyRequest(BaseModel):
    suite: str
    params: dict = Field(default_factory=dict)


class VerifyResponse(BaseModel):
    suite: str
    passed: bool
    details: dict


class HealthResponse(BaseModel):
    status: str
    version: str
