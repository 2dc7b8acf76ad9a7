"""Pydantic request/response models: the wire schemas of the service and CLI."""

from __future__ import annotations

from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field

from .lattice import LinkSpec


class LineModel(BaseModel):
    direction: List[int]
    label: str
    offsetSeed: int = Field(ge=1)


class LinkSpecModel(BaseModel):
    dim: Literal[2, 3]
    components: List[LineModel]

    def to_linkspec(self) -> LinkSpec:
        return LinkSpec.from_dict(self.model_dump())

    @classmethod
    def from_linkspec(cls, link: LinkSpec) -> "LinkSpecModel":
        return cls.model_validate(link.to_dict())


class MatrixModel(BaseModel):
    k: int
    rows: List[str]
    cols: List[str]
    entries: List[List[int]]


class MatrixRequest(BaseModel):
    dim: Literal[2, 3] = 2
    k: int = Field(ge=0)
    link: Optional[LinkSpecModel] = None  # default: the standard depth-k link
    mode: Literal["closed-form", "geometric", "both"] = "closed-form"


class MatrixResponse(BaseModel):
    link: LinkSpecModel
    matrix: MatrixModel
    geometric: Optional[MatrixModel] = None
    modesAgree: Optional[bool] = None
    injective: bool
    kernelWitness: Optional[List[int]] = None


class CertifyRequest(BaseModel):
    dim: Literal[2, 3] = 2
    m: int = Field(ge=2)
    geometricDepth: Optional[int] = 0  # null: library default cap


class DegreeModel(BaseModel):
    j: int
    injective: bool
    matrixRef: str
    boundaryVanishing: bool
    oracleChecked: bool
    oracleMatch: Optional[bool] = None
    ranks: Dict[str, int]
    kernelWitness: Optional[List[int]] = None


class CertificateModel(BaseModel):
    m: int
    dim: int
    link: LinkSpecModel
    degrees: List[DegreeModel]
    verdict: bool
    lemmaChain: List[str]
    geometricDepth: int
    matrices: Dict[str, MatrixModel]


class WordRequest(BaseModel):
    word: str
    dim: Literal[2, 3] = 3
    depthBound: int = Field(default=8, ge=1, le=12)


class PhiModel(BaseModel):
    k: int
    basis: List[str]
    vector: List[int]
    pretty: str


class WordResponse(BaseModel):
    word: str
    dim: int
    depth: Optional[int] = None  # null when the bound was reached
    depthBound: int
    inCommutatorSubgroup: bool
    phi: Optional[PhiModel] = None


class FingerMapModel(BaseModel):
    link: LinkSpecModel
    assignments: Dict[str, Dict[str, str]]


class FingersRequest(BaseModel):
    dim: Literal[2, 3] = 2
    k: int = Field(default=1, ge=1)
    seeds: int = Field(default=1, ge=0)
    supportRadius: int = Field(default=2, ge=0)
    valueTerms: int = Field(default=3, ge=0)
    link: Optional[LinkSpecModel] = None  # default: the standard depth-k link
    replay: Optional[FingerMapModel] = None
    saveSeed: Optional[int] = None  # include this seed's map in the response


class ViolationModel(BaseModel):
    element: str
    line: str
    filtration: int
    required: int
    seed: Optional[int] = None


class FingersResponse(BaseModel):
    dim: int
    k: int
    link: LinkSpecModel
    seedsChecked: int
    elementsPerSeed: int
    ok: bool
    violations: List[ViolationModel]
    savedMap: Optional[FingerMapModel] = None


class ErrorDetail(BaseModel):
    type: str
    message: str
