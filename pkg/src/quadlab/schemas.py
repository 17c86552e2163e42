"""Request and response models shared by the HTTP service and the CLI."""

from __future__ import annotations

from typing import Literal, Union

from pydantic import BaseModel, Field, field_validator

Number = Union[int, float, str]  # strings carry exact rationals such as "1/3"


class Space(BaseModel):
    points: list[Union[int, str]]
    dist: list[list[Number]]
    root: Union[int, str]
    mass: list[Number]

    @field_validator("dist")
    @classmethod
    def _square(cls, v):
        if any(len(row) != len(v) for row in v):
            raise ValueError("dist must be a square matrix")
        return v


class EnumerateRequest(BaseModel):
    n: int = Field(ge=2)
    r: int | None = None
    faces: int | None = Field(default=None, description="number N of facial 2-cycles")
    emit: Literal["counts", "maps"] = "counts"
    format: Literal["qnd", "json"] = "qnd"


class EnumerateResponse(BaseModel):
    n: int
    r: int | None
    faces: int | None
    count: int
    closed_form: int | None = None
    maps: list | None = None


class DecomposeRequest(BaseModel):
    maps: list[str]
    diameters: bool = True


class DecomposeResponse(BaseModel):
    records: list[dict]


class AllocateRequest(BaseModel):
    balls: int = Field(ge=1)
    boxes: int = Field(ge=1)
    mode: Literal["exact", "mc"] = "exact"
    reps: int = Field(default=1000, ge=1)
    seed: int = 0
    strategy: Literal["dp", "jump"] | None = None


class AllocateResponse(BaseModel):
    balls: int
    boxes: int
    mode: str
    prob_sum: str | None = None
    law: list[dict] | None = None
    samples: list[list[int]] | None = None
    summary: dict = {}


class SampleRequest(BaseModel):
    n: int = Field(ge=2)
    r: int | None = None
    faces: int | None = None
    reps: int = Field(default=1, ge=1)
    seed: int = 0


class SampleResponse(BaseModel):
    maps: list[str]


class GHPRequest(BaseModel):
    a: Space
    b: Space
    mode: Literal["exact", "bounds"] = "exact"
    local: bool = False
    terms: int = Field(default=8, ge=1)


class GHPResponse(BaseModel):
    mode: str
    value: str | float | None = None
    lo: float | None = None
    hi: float | None = None


class ContinuumRequest(BaseModel):
    object: Literal["map", "plane", "minbus"] = "map"
    grid: int = Field(default=64, ge=4)
    lam: float = Field(default=1.0, gt=0, alias="lambda")
    window: float = Field(default=1.0, gt=0)
    seed: int = 0
    emit: Literal["space", "profile"] = "space"
    radii: list[float] = [0.125, 0.25, 0.5, 0.75, 1.0]

    model_config = {"populate_by_name": True}


class ContinuumResponse(BaseModel):
    object: str
    space: Space | None = None
    profile: list[dict] | None = None
    diagnostics: dict = {}


class ExperimentRequest(BaseModel):
    name: Literal["condensation", "structure", "diameter", "limit"]
    config: dict = {}


class ErrorBody(BaseModel):
    error: str
    message: str
