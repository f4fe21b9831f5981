"""FastAPI surface over the operation handlers."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict

from . import handlers


class SosCheckRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    polynomial: dict
    basis: dict | None = None


class ObstructRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    form: dict
    mode: str
    point: list[str | int | float] | None = None
    trunc_order: int | str | None = None


class RelaxRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    set: dict
    L: dict
    W: list[dict]
    functional: list[float] | None = None
    probe: int = 0
    samples: int = 512
    box: float = 2.0
    grid_per_dim: int | None = None
    hull_check: list[float] | None = None
    seed: int = 0


class DualRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    pencil: dict
    matrix: list[list[float]] | None = None
    functional: list[float] | None = None

    def payload(self) -> dict:
        out: dict = {"pencil": self.pencil}
        if self.matrix is not None:
            out["matrix"] = self.matrix
        if self.functional is not None:
            out["functional"] = self.functional
        return out


class MemberRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    pencil: dict
    point: list[float]
    is_cone: bool = False


class LiftRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    pencil: dict
    functional: list[float] | None = None
    verify: int = 0
    seed: int = 0


class VeroneseRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    n: int
    d: int
    mode: str = "affine"
    point: list[str | int | float] | None = None


class DemoRequest(BaseModel):
    model_config = ConfigDict(extra="allow")
    kind: str = "psd-vs-sos"


def create_app() -> FastAPI:
    app = FastAPI(title="shadowlab",
                  description="spectrahedral shadows, SOS certificates, "
                              "moment relaxations, and square-root lifts")

    def run(handler, payload: dict):
        try:
            return handler(payload)
        except handlers.OperationError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/sos-check")
    def sos_check(req: SosCheckRequest) -> dict:
        return run(handlers.handle_sos_check,
                   req.model_dump(exclude_none=True))

    @app.post("/obstruct")
    def obstruct(req: ObstructRequest) -> dict:
        return run(handlers.handle_obstruct,
                   req.model_dump(exclude_none=True))

    @app.post("/relax")
    def relax(req: RelaxRequest) -> dict:
        return run(handlers.handle_relax, req.model_dump(exclude_none=True))

    @app.post("/dual")
    def dual(req: DualRequest) -> dict:
        return run(handlers.handle_dual, req.payload())

    @app.post("/member")
    def member(req: MemberRequest) -> dict:
        return run(handlers.handle_member, req.model_dump())

    @app.post("/lift")
    def lift(req: LiftRequest) -> dict:
        return run(handlers.handle_lift, req.model_dump(exclude_none=True))

    @app.post("/veronese")
    def veronese(req: VeroneseRequest) -> dict:
        return run(handlers.handle_veronese,
                   req.model_dump(exclude_none=True))

    @app.post("/demo")
    def demo(req: DemoRequest) -> dict:
        return run(handlers.handle_demo, req.model_dump())

    @app.get("/catalog/{name}")
    def catalog_entry(name: str) -> dict:
        try:
            return handlers.handle_catalog(name)
        except handlers.OperationError as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    return app


app = create_app()
