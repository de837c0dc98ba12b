"""FastAPI service wrapping the lab core.

A long-running server keeps the in-process enumeration caches warm across
requests, so repeated prior queries against the same target families do not
re-run their sweeps. All numeric payloads are exact rationals.
"""

from __future__ import annotations

from fractions import Fraction

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..enumeration import PhaseCapExceeded, enumerate_up_to_phase
from ..measures import (
    DepthCapInsufficient,
    GeneratorExhausted,
    ZeroWidthInterval,
    decoder_km,
    decoder_mass,
    decoder_run,
    measure_eval,
    output_interval,
    parse_measure_spec,
)
from ..predictor import adversarial_sequence, deviation_sum, run_experiment
from ..priors import InsufficientPhases, PriorKind, conditional, estimate_prior
from ..rationals import parse_rational, rational_to_pair
from ..verify import run_suite
from .schemas import (
    AdversarialRequest,
    AdversarialResponse,
    ConditionalRequest,
    ConditionalResponse,
    DecoderRequest,
    DecoderResponse,
    EnumerateRequest,
    EnumerateResponse,
    HealthResponse,
    PredictRequest,
    PredictResponse,
    PriorRequest,
    PriorResponse,
    RecordModel,
    TraceStepModel,
    VerifyRequest,
    VerifyResponse,
)

# Desk-scale defaults: the costs of deeper sweeps and longer experiments
# climb steeply, so the service refuses beyond these unless overridden.
MAX_N = {"fast": 64, "kt": 10}


def _bad_request(exc: Exception) -> HTTPException:
    return HTTPException(status_code=400, detail=str(exc))


def create_app() -> FastAPI:
    app = FastAPI(
        title="speedprior lab",
        description="Exact speed-prior estimation, decoder machines, and prediction experiments",
        version=__version__,
    )

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/prior", response_model=PriorResponse)
    def prior(req: PriorRequest) -> PriorResponse:
        try:
            est = estimate_prior(
                PriorKind(req.kind),
                req.x,
                parse_rational(req.epsilon),
                req.k_cap,
                workers=req.workers,
            )
        except (ValueError, PhaseCapExceeded) as exc:
            raise _bad_request(exc)
        return PriorResponse(**est.to_json_dict())

    @app.post("/conditional", response_model=ConditionalResponse)
    def conditional_endpoint(req: ConditionalRequest) -> ConditionalResponse:
        try:
            low, high = conditional(
                PriorKind(req.kind), req.prefix, req.bit, parse_rational(req.epsilon), req.k_cap
            )
        except (InsufficientPhases, ValueError, PhaseCapExceeded) as exc:
            raise _bad_request(exc)
        return ConditionalResponse(
            kind=req.kind,
            prefix=req.prefix,
            bit=req.bit,
            low=rational_to_pair(low),
            high=rational_to_pair(high),
        )

    @app.post("/enumerate", response_model=EnumerateResponse)
    def enumerate_endpoint(req: EnumerateRequest) -> EnumerateResponse:
        try:
            ledger = enumerate_up_to_phase(req.k, req.mode, workers=req.workers)
        except (ValueError, PhaseCapExceeded) as exc:
            raise _bad_request(exc)
        return EnumerateResponse(
            k=ledger.max_phase,
            mode=req.mode,
            record_count=len(ledger.records),
            naive_step_count=ledger.naive_step_count,
            records=[
                RecordModel(
                    program=r.program, output=r.output, time=r.time, firstPhase=r.first_phase
                )
                for r in ledger.records
            ],
        )

    @app.post("/decoder", response_model=DecoderResponse)
    def decoder_endpoint(req: DecoderRequest) -> DecoderResponse:
        try:
            spec = parse_measure_spec(req.measure)
            resp = DecoderResponse(measure=req.measure, op=req.op)
            if req.op == "run":
                resp.output = decoder_run(spec, req.input_bits, req.max_output)
            elif req.op == "km":
                resp.km = decoder_km(spec, req.x, depth_cap=max(2 * req.depth, 16))
            elif req.op == "mass":
                resp.mass = rational_to_pair(decoder_mass(spec, req.x, req.depth))
            elif req.op == "interval":
                interval = output_interval(spec, req.x)
                resp.low = rational_to_pair(interval.low)
                resp.high = rational_to_pair(interval.high)
            elif req.op == "eval":
                resp.value = rational_to_pair(measure_eval(spec, req.x))
        except (ValueError, ZeroWidthInterval, DepthCapInsufficient, GeneratorExhausted) as exc:
            raise _bad_request(exc)
        return resp

    @app.post("/predict", response_model=PredictResponse)
    def predict_endpoint(req: PredictRequest) -> PredictResponse:
        limit = req.max_n if req.max_n is not None else MAX_N[req.kind]
        if req.n > limit:
            raise HTTPException(
                status_code=400,
                detail=f"n={req.n} exceeds the {req.kind} experiment budget {limit}; "
                f"pass max_n explicitly to override",
            )
        try:
            env = parse_measure_spec(req.env)
            trace = run_experiment(
                env,
                PriorKind(req.kind),
                req.n,
                parse_rational(req.epsilon),
                req.seed,
                tie_break=req.tie_break,
                k_cap=req.k_cap,
                workers=req.workers,
            )
        except (ValueError, PhaseCapExceeded, GeneratorExhausted) as exc:
            raise _bad_request(exc)
        dev_low, dev_high = deviation_sum(trace)
        return PredictResponse(
            env=req.env,
            kind=req.kind,
            n=trace.n,
            seed=trace.seed,
            tie_break=trace.tie_break,
            k_cap=trace.k_cap,
            sequence=trace.sequence,
            error_count=trace.error_count,
            total_loss=rational_to_pair(trace.total_loss),
            total_informed_loss=rational_to_pair(trace.total_informed_loss),
            final_lower=rational_to_pair(trace.final_lower),
            d_hat=trace.d_hat,
            deviation_low=rational_to_pair(dev_low),
            deviation_high=rational_to_pair(dev_high),
            uncertified_steps=[s.t for s in trace.steps if not s.certified],
            steps=[
                TraceStepModel(
                    t=s.t,
                    x_t=s.actual,
                    y_t=s.predicted,
                    informed_y=s.informed,
                    loss=rational_to_pair(s.loss),
                    cond0_low=rational_to_pair(s.cond0[0]),
                    cond0_high=rational_to_pair(s.cond0[1]),
                    cond1_low=rational_to_pair(s.cond1[0]),
                    cond1_high=rational_to_pair(s.cond1[1]),
                    k_used=s.k_used,
                    certified=s.certified,
                    cum_loss=rational_to_pair(s.cum_loss),
                    cum_informed_loss=rational_to_pair(s.cum_informed_loss),
                )
                for s in trace.steps
            ],
        )

    @app.post("/adversarial", response_model=AdversarialResponse)
    def adversarial_endpoint(req: AdversarialRequest) -> AdversarialResponse:
        try:
            x = adversarial_sequence(
                PriorKind(req.kind), parse_rational(req.epsilon), req.n, k_cap=req.k_cap
            )
        except (ValueError, PhaseCapExceeded) as exc:
            raise _bad_request(exc)
        return AdversarialResponse(kind=req.kind, n=req.n, x=x)

    @app.post("/verify", response_model=VerifyResponse)
    def verify_endpoint(req: VerifyRequest) -> VerifyResponse:
        try:
            result = run_suite(req.suite, **req.params)
        except (ValueError, TypeError) as exc:
            raise _bad_request(exc)
        return VerifyResponse(suite=result.suite, passed=result.passed, details=result.details)

    return app


app = create_app()
