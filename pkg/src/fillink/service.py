"""FastAPI service exposing the linking-matrix and certification operations.

Usage errors map to HTTP 422, structural failures (torsion, offset
collisions, block-structure mismatches) to HTTP 409; both carry an
ErrorDetail body.  Verdict-carrying results (failed certificates, invariance
violations) are ordinary 200 responses with the verdict in the payload.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from . import __version__
from .certifier import build_matrix, certify_filling, is_injective, standard_link
from .errors import StructuralError
from .fingers import FingerMoveMap, kernel_invariance_check, random_finger_map
from .lattice import LinkSpec
from .nilpotent import lcs_depth, parse_word, phi_image
from .schemas import (
    CertificateModel,
    CertifyRequest,
    FingerMapModel,
    FingersRequest,
    FingersResponse,
    LinkSpecModel,
    MatrixModel,
    MatrixRequest,
    MatrixResponse,
    PhiModel,
    ViolationModel,
    WordRequest,
    WordResponse,
)

app = FastAPI(
    title="fillink",
    version=__version__,
    description=(
        "Equivariant linking matrices on augmentation-ideal filtrations "
        "and filling certificates for standard torus links."
    ),
)


def _error(exc: Exception) -> HTTPException:
    status = 409 if isinstance(exc, StructuralError) else 422
    return HTTPException(
        status_code=status,
        detail={"type": type(exc).__name__, "message": str(exc)},
    )


def _resolve_link(dim: int, k: int, model: LinkSpecModel | None) -> LinkSpec:
    if model is None:
        return standard_link(k, dim)
    link = model.to_linkspec()
    if link.dim != dim:
        raise ValueError(f"link dimension {link.dim} does not match dim {dim}")
    return link


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/matrix", response_model=MatrixResponse)
def matrix(request: MatrixRequest) -> MatrixResponse:
    try:
        link = _resolve_link(request.dim, request.k, request.link)
        primary_mode = "geometric" if request.mode == "geometric" else "closed-form"
        primary = build_matrix(request.k, link, primary_mode)
        geometric = None
        agree = None
        if request.mode == "both":
            geometric = build_matrix(request.k, link, "geometric")
            agree = geometric.entries == primary.entries
        verdict = is_injective(primary)
    except (StructuralError, ValueError) as exc:
        raise _error(exc) from exc
    return MatrixResponse(
        link=LinkSpecModel.from_linkspec(link),
        matrix=MatrixModel.model_validate(primary.to_dict()),
        geometric=MatrixModel.model_validate(geometric.to_dict()) if geometric else None,
        modesAgree=agree,
        injective=verdict.injective,
        kernelWitness=verdict.kernel_witness,
    )


@app.post("/certify", response_model=CertificateModel)
def certify(request: CertifyRequest) -> CertificateModel:
    try:
        cert = certify_filling(request.m, request.dim, request.geometricDepth)
    except (StructuralError, ValueError) as exc:
        raise _error(exc) from exc
    return CertificateModel.model_validate(cert.to_dict())


@app.post("/word", response_model=WordResponse)
def word(request: WordRequest) -> WordResponse:
    try:
        parsed = parse_word(request.word, request.dim)
        depth = lcs_depth(parsed, request.depthBound)
        in_commutator = parsed.in_commutator_subgroup()
        phi = None
        if in_commutator and 2 <= depth <= request.depthBound:
            image = phi_image(parsed, depth, request.dim)
            phi = PhiModel(
                k=depth,
                basis=image.basis.labels,
                vector=image.vector,
                pretty=image.pretty(),
            )
    except (StructuralError, ValueError) as exc:
        raise _error(exc) from exc
    return WordResponse(
        word=parsed.text(),
        dim=request.dim,
        depth=depth if depth <= request.depthBound else None,
        depthBound=request.depthBound,
        inCommutatorSubgroup=in_commutator,
        phi=phi,
    )


@app.post("/fingers", response_model=FingersResponse)
def fingers(request: FingersRequest) -> FingersResponse:
    try:
        if request.replay is not None:
            fmap = FingerMoveMap.from_dict(request.replay.model_dump())
            link = fmap.link
            if link.dim != request.dim:
                raise ValueError("replay map dimension does not match dim")
            reports = [kernel_invariance_check(request.k, link, fmap)]
        else:
            link = _resolve_link(request.dim, request.k, request.link)
            reports = []
            for seed in range(request.seeds):
                fmap = random_finger_map(
                    seed, request.supportRadius, request.valueTerms, link
                )
                reports.append(
                    kernel_invariance_check(request.k, link, fmap, seed=seed)
                )
        saved = None
        if request.saveSeed is not None:
            saved_map = random_finger_map(
                request.saveSeed, request.supportRadius, request.valueTerms, link
            )
            saved = FingerMapModel.model_validate(saved_map.to_dict())
    except (StructuralError, ValueError) as exc:
        raise _error(exc) from exc
    violations = [
        ViolationModel(
            element=v.element_label,
            line=v.line_label,
            filtration=v.filtration_seen,
            required=v.required,
            seed=report.seed,
        )
        for report in reports
        for v in report.violations
    ]
    return FingersResponse(
        dim=request.dim,
        k=request.k,
        link=LinkSpecModel.from_linkspec(link),
        seedsChecked=len(reports),
        elementsPerSeed=reports[0].checked if reports else 0,
        ok=not violations,
        violations=violations,
        savedMap=saved,
    )
