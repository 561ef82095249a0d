"""
Verification pipelines over a theory document and their reports.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import random
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

from loguru import logger

from jetbrane.algebroid import (
    GaugeParameter,
    No,
    NotDivergence,
    Superpotential,
    SymmetryResult,
    Theory,
    Witness,
    algebroid_bracket,
    anchor,
    closure_check,
    closure_test_parameters,
    conserved_current_check,
    current_bracket,
    current_class_trivial,
    ev_bracket,
    is_eom_symmetry,
    is_variational_symmetry,
    jacobi_check_A,
    reducibility_check,
    variational_symmetry_from_noether,
)
from jetbrane.bv import (
    ExtendedTheory,
    LocalFunctional,
    Residual,
    anticommutator_residuals,
    antibracket,
    brst_decomposition,
    brst_operator,
    build_master_action,
    check_master,
    extend,
    functional_vf,
    koszul_tate,
    longitudinal,
    master_action_candidate,
    square_residuals,
)
from jetbrane.consts import (
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    ENGINE_VERSION,
    REPORT_SCHEMA_VERSION,
)
from jetbrane.diffops import (
    adjoint,
    apply,
    characteristic_frechet,
    frechet_of_operator,
    helmholtz_check,
    is_noether,
    module_action,
    rho,
)
from jetbrane.dsl import TheoryDocument, parse_auxiliary, parse_theory
from jetbrane.exceptions import (
    ConfigurationError,
    InternalConsistencyError,
    JetbraneError,
)
from jetbrane.jet import (
    EvolutionaryField,
    euler_lagrange,
    functionals_equal,
    prolong_evolutionary,
)
from jetbrane.kernel import Expr, Kind, SpaceSpec, field_jet, render_expr
from jetbrane.kernel.render import render_multi_index
from jetbrane.sampling import ExprSampler
from jetbrane.weak import AnsatzConfig, Certified, NotCertified

PASS = "pass"
FAIL = "fail"
NOT_CERTIFIED = "not-certified"

PIPELINES = (
    "validate",
    "noether",
    "symmetry",
    "closure",
    "reducibility",
    "currents",
    "bv-nilpotency",
    "master",
    "full",
)
AUX_PIPELINES = ("symmetry", "reducibility", "currents")

Outcome = tuple[str, Any]

# key of the identity each check instantiates, by check name up to `[`
IDENTITY_REFS = {
    "helmholtz": "variational.helmholtz",
    "noether-identity": "gauge.noether-identity",
    "solution": "equations.solution",
    "rho": "noether.rho-variational",
    "frechet-adjoint": "noether.frechet-adjoint",
    "module-action": "noether.module-action",
    "rho-equivariance": "noether.rho-equivariance",
    "module-commutator": "noether.module-commutator",
    "variational": "symmetry.variational",
    "eom": "symmetry.equations-of-motion",
    "el-commutation": "symmetry.euler-lagrange-commutation",
    "bracket": "symmetry.bracket",
    "closure": "algebroid.closure",
    "bracket-skew": "algebroid.bracket-skew",
    "jacobi": "algebroid.jacobi",
    "reducibility": "algebroid.reducibility",
    "conserved": "currents.conservation",
    "current-bracket": "currents.bracket",
    "koszul-tate-nilpotency": "bv.koszul-tate-square",
    "longitudinal-nilpotency": "bv.longitudinal-square",
    "koszul-tate-longitudinal": "bv.anticommutator",
    "master-action": "bv.master-action",
    "master-equation": "bv.master-equation",
    "brst-nilpotency": "bv.brst-square",
    "brst-decomposition": "bv.brst-decomposition",
    "functional-field": "bv.antibracket-field",
}


def identity_ref(name: str) -> str:
    stem = name.split("[", 1)[0]
    if stem not in IDENTITY_REFS:
        raise InternalConsistencyError(
            f"check `{name}` has no identity reference"
        )
    return IDENTITY_REFS[stem]


@dataclass
class CheckRecord:
    name: str
    status: str
    identity: str
    ref: str
    detail: Any = None
    wall_time: float = 0.0

    def to_dict(self, wall_time: bool = True) -> dict[str, Any]:
        result = {
            "name": self.name,
            "status": self.status,
            "identity": self.identity,
            "ref": self.ref,
            "detail": self.detail,
        }
        if wall_time:
            result["wall_time"] = round(self.wall_time, 6)
        return result


@dataclass
class Report:
    pipeline: str
    theory: str
    input_digest: str
    checks: list[CheckRecord] = field(default_factory=list)
    engine_version: str = ENGINE_VERSION
    schema_version: str = REPORT_SCHEMA_VERSION

    @property
    def ok(self) -> bool:
        return all(c.status == PASS for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def to_dict(self, wall_time: bool = True) -> dict[str, Any]:
        return {
            "pipeline": self.pipeline,
            "theory": self.theory,
            "input_digest": self.input_digest,
            "engine_version": self.engine_version,
            "schema_version": self.schema_version,
            "ok": self.ok,
            "checks": [c.to_dict(wall_time) for c in self.checks],
        }

    def to_json(self, wall_time: bool = True) -> str:
        return json.dumps(
            self.to_dict(wall_time), sort_keys=True, indent=2
        )

    def to_text(self) -> str:
        lines = [
            f"pipeline: {self.pipeline}",
            f"theory: {self.theory}",
            f"input digest: {self.input_digest}",
        ]
        for c in self.checks:
            lines.append(f"{c.status.upper():<13} {c.name}  [{c.identity}]")
            if c.status != PASS and c.detail:
                lines.append(f"    {json.dumps(c.detail, sort_keys=True)}")
        failed = sum(1 for c in self.checks if c.status != PASS)
        lines.append(f"{len(self.checks)} checks, {failed} not passed")
        return "\n".join(lines) + "\n"


def input_digest(texts: Sequence[str]) -> str:
    h = hashlib.sha256()
    for text in texts:
        data = text.encode("utf-8")
        h.update(len(data).to_bytes(8, "big"))
        h.update(data)
    return h.hexdigest()


# ==========================================================
# rendering of check details


def _render(e: Expr, space: SpaceSpec) -> str:
    return render_expr(e, space)


def _render_map(m: Mapping[Any, Expr], space: SpaceSpec) -> dict[str, str]:
    return {str(k): _render(v, space) for k, v in m.items()}


def _render_current(j: Mapping[int, Expr], space: SpaceSpec) -> dict:
    return {space.coord_names[mu]: _render(v, space) for mu, v in j.items()}


def _render_certified(result: Certified, space: SpaceSpec) -> dict:
    return {
        name: {
            f"{a}[{render_multi_index(mu, space)}]": _render(v, space)
            for (a, mu), v in certificate.k.items()
        }
        for name, certificate in result.certificates.items()
    }


def _weak_outcome(
    result: Certified | NotCertified, space: SpaceSpec
) -> Outcome:
    if isinstance(result, Certified):
        return PASS, {"certificates": _render_certified(result, space)}
    detail = {"reason": result.reason, "failing": list(result.failing)}
    if result.refuted_on is not None:
        detail["refuted_on"] = result.refuted_on
        return FAIL, detail
    return NOT_CERTIFIED, detail


def _triviality_outcome(
    result: Certified | Superpotential | NotCertified, space: SpaceSpec
) -> Outcome:
    if not isinstance(result, Superpotential):
        return _weak_outcome(result, space)
    rendered = {
        space.coord_names[mu] + space.coord_names[nu]: _render(s, space)
        for (mu, nu), s in result.S.items()
    }
    return PASS, {"superpotential": rendered}


def _symmetry_outcome(result: SymmetryResult, space: SpaceSpec) -> Outcome:
    if isinstance(result, Witness):
        return PASS, {"witness": _render_current(result.k, space)}
    if isinstance(result, No):
        return FAIL, {
            "euler_lagrange": _render_map(result.euler_lagrange, space)
        }
    assert isinstance(result, NotDivergence)
    return NOT_CERTIFIED, {"core": _render(result.core, space)}


def _flag(ok: bool, detail: Any = None) -> Outcome:
    return (PASS if ok else FAIL), detail


# ==========================================================
# context


class PipelineContext:
    def __init__(
        self,
        doc: TheoryDocument,
        cfg: AnsatzConfig,
        seed: int = DEFAULT_SEED,
        samples: int = DEFAULT_SAMPLES,
    ) -> None:
        self.doc = doc
        self.theory: Theory = doc.theory
        self.space = doc.theory.space
        self.cfg = cfg
        self.seed = seed
        self.samples = samples
        self.checks: list[CheckRecord] = []
        self._extended: ExtendedTheory | None = None

    @property
    def extended(self) -> ExtendedTheory:
        if self._extended is None:
            self._extended = extend(self.theory)
        return self._extended

    def sampler(self, name: str) -> ExprSampler:
        return ExprSampler(self.space, seed=f"{self.seed}:{name}")

    def run(
        self, name: str, identity: str, check: Callable[[], Outcome]
    ) -> CheckRecord:
        ref = identity_ref(name)
        start = time.perf_counter()
        try:
            status, detail = check()
        except JetbraneError as e:
            logger.error(f"check {name} raised {type(e).__name__}: {e}")
            status = FAIL
            detail = {"error": type(e).__name__, "message": str(e)}
        record = CheckRecord(
            name,
            status,
            identity,
            ref,
            detail,
            time.perf_counter() - start,
        )
        if status == PASS:
            logger.info(f"{name}: pass")
        else:
            logger.error(f"{name}: {status}")
        self.checks.append(record)
        return record

    def render(self, e: Expr) -> str:
        return _render(e, self.space)


# ==========================================================
# validate


def validate_checks(ctx: PipelineContext) -> bool:
    T = ctx.theory
    E = T.equations
    passed = [
        ctx.run(
            "helmholtz",
            "D_E = D_E^dagger",
            lambda: _flag(
                helmholtz_check(E),
                {"equations": _render_map(E, ctx.space)},
            ),
        )
    ]
    residuals = T.noether_identity_residuals()
    for alpha in T.gauge_params:
        passed.append(
            ctx.run(
                f"noether-identity[{alpha}]",
                "R^dagger_alpha[E] = 0",
                lambda alpha=alpha: _flag(
                    residuals[alpha].is_zero(),
                    {"residual": ctx.render(residuals[alpha])},
                ),
            )
        )
    unsolved = set(T.unsolved_solutions())
    for name in sorted(T.named_solutions):
        passed.append(
            ctx.run(
                f"solution[{name}]",
                "E_i(s) = 0",
                lambda name=name: _flag(name not in unsolved),
            )
        )
    return all(r.status == PASS for r in passed)


# ==========================================================
# Noether operators


def _gauge_inventory(
    ctx: PipelineContext,
) -> list[tuple[str, EvolutionaryField]]:
    inventory = []
    for f in closure_test_parameters(ctx.theory, AnsatzConfig()):
        Q = anchor(f, ctx.theory)
        if not Q.is_zero():
            inventory.append((f"R({f.render(ctx.space)})", Q))
    for name, Q in sorted(ctx.doc.symmetries.items()):
        if isinstance(is_variational_symmetry(Q, ctx.theory), Witness):
            inventory.append((name, Q))
    return inventory


def _derivative_coefficients_constant(T: Theory) -> bool:
    for (_, _, mu), value in T.generators.items():
        if mu and any(g.kind == Kind.FIELD for g in value.generators()):
            return False
    return True


def noether_checks(ctx: PipelineContext) -> None:
    T = ctx.theory
    R_dagger = T.noether_operators
    operators = {alpha: R_dagger.row(alpha) for alpha in T.gauge_params}

    for alpha, N in operators.items():

        def rho_check(N=N) -> Outcome:
            Q, result = variational_symmetry_from_noether(N, T)
            status, detail = _symmetry_outcome(result, ctx.space)
            detail["characteristic"] = _render_map(
                Q.characteristics, ctx.space
            )
            return status, detail

        ctx.run(
            f"rho[{alpha}]", "rho(N) is a variational symmetry", rho_check
        )

        if _derivative_coefficients_constant(T):

            def frechet_check(N=N) -> Outcome:
                Q = rho(N)
                lhs = adjoint(characteristic_frechet(Q, T.fields))
                rhs = adjoint(frechet_of_operator(N, T.fields))
                return _flag(lhs == rhs)

            ctx.run(
                f"frechet-adjoint[{alpha}]",
                "D_rho(N)^dagger = D_N^dagger",
                frechet_check,
            )

    inventory = _gauge_inventory(ctx)
    for (label, Q), (alpha, N) in itertools.product(
        inventory, operators.items()
    ):
        moved = module_action(Q, N)
        ctx.run(
            f"module-action[{label}; {alpha}]",
            "Q.N = delta_Q N - N o D_Q^dagger is a Noether operator",
            lambda moved=moved: _flag(is_noether(moved, T.equations)),
        )
        ctx.run(
            f"rho-equivariance[{label}; {alpha}]",
            "rho(Q.N) = [Q, rho(N)]",
            lambda Q=Q, N=N, moved=moved: _flag(
                rho(moved) == ev_bracket(Q, rho(N))
            ),
        )
    for (l1, Q1), (l2, Q2) in zip(inventory, inventory[1:]):
        for alpha, N in operators.items():

            def commutator_check(Q1=Q1, Q2=Q2, N=N) -> Outcome:
                lhs = module_action(Q1, module_action(Q2, N)) - module_action(
                    Q2, module_action(Q1, N)
                )
                return _flag(lhs == module_action(ev_bracket(Q1, Q2), N))

            ctx.run(
                f"module-commutator[{l1}, {l2}; {alpha}]",
                "Q1.(Q2.N) - Q2.(Q1.N) = [Q1, Q2].N",
                commutator_check,
            )


# ==========================================================
# symmetries


def _el_commutation(
    Q: EvolutionaryField, ctx: PipelineContext, name: str
) -> Outcome:
    T = ctx.theory
    sampler = ctx.sampler(f"el-commutation:{name}")
    roots = [field_jet(i) for i in T.fields]
    correction_op = adjoint(characteristic_frechet(Q, T.fields))
    for _ in range(ctx.samples):
        f = sampler.expr(roots)
        el = {i: euler_lagrange(f, i) for i in T.fields}
        correction = apply(correction_op, el)
        lhs_of = prolong_evolutionary(Q, f)
        for j in T.fields:
            lhs = prolong_evolutionary(Q, el[j]) + correction[j]
            if lhs != euler_lagrange(lhs_of, j):
                return FAIL, {"sample": ctx.render(f), "component": j}
    return PASS, {"samples": ctx.samples}


def symmetry_checks(ctx: PipelineContext) -> None:
    T = ctx.theory
    symmetries = sorted(ctx.doc.symmetries.items())
    for name, Q in symmetries:
        ctx.run(
            f"variational[{name}]",
            "delta_Q L = d_mu k^mu",
            lambda Q=Q: _symmetry_outcome(
                is_variational_symmetry(Q, T), ctx.space
            ),
        )
        ctx.run(
            f"eom[{name}]",
            "delta_Q E_a ~ 0",
            lambda Q=Q: _weak_outcome(
                is_eom_symmetry(Q, T, ctx.cfg), ctx.space
            ),
        )
        ctx.run(
            f"el-commutation[{name}]",
            "delta_Q EL_j f + (D_Q^i_j)^dagger EL_i f = EL_j delta_Q f",
            lambda Q=Q, name=name: _el_commutation(Q, ctx, name),
        )
    for (n1, Q1), (n2, Q2) in itertools.combinations(symmetries, 2):

        def bracket_check(Q1=Q1, Q2=Q2) -> Outcome:
            bracket = ev_bracket(Q1, Q2)
            status, detail = _symmetry_outcome(
                is_variational_symmetry(bracket, T), ctx.space
            )
            detail["bracket"] = _render_map(
                bracket.characteristics, ctx.space
            )
            return status, detail

        ctx.run(
            f"bracket[{n1}, {n2}]",
            "[Q1, Q2] is a variational symmetry",
            bracket_check,
        )


# ==========================================================
# gauge algebra


def closure_checks(ctx: PipelineContext) -> None:
    T = ctx.theory
    if not T.gauge_params:
        return

    def closes() -> Outcome:
        report = closure_check(T, ctx.cfg)
        status = PASS
        failures = []
        for record in report.failures():
            record_status, detail = _weak_outcome(record.outcome, ctx.space)
            detail["pair"] = [
                record.f1.render(ctx.space),
                record.f2.render(ctx.space),
            ]
            failures.append(detail)
            if status == PASS or record_status == FAIL:
                status = record_status
        return status, {
            "pairs": len(report.records),
            "identically_zero": report.identically_zero,
            "failures": failures,
        }

    record = ctx.run("closure", "[R_f1, R_f2] ~ R([f1, f2]_A)", closes)
    if record.detail and "error" in record.detail:
        return

    params = closure_test_parameters(T, ctx.cfg)
    pairs = list(itertools.combinations(params, 2))

    def skew_check() -> Outcome:
        for f1, f2 in pairs:
            if algebroid_bracket(f1, f2, T) != -algebroid_bracket(f2, f1, T):
                return FAIL, {
                    "f1": f1.render(ctx.space),
                    "f2": f2.render(ctx.space),
                }
        return PASS, {"pairs": len(pairs)}

    ctx.run("bracket-skew", "[f1, f2]_A = -[f2, f1]_A", skew_check)

    for k, (f1, f2, f3) in enumerate(_jacobi_triples(T, params, ctx)):

        def jacobi_check(f1=f1, f2=f2, f3=f3) -> Outcome:
            report = jacobi_check_A(T, f1, f2, f3, ctx.cfg)
            status, detail = _weak_outcome(report.outcome, ctx.space)
            detail["parameters"] = [
                f.render(ctx.space) for f in (f1, f2, f3)
            ]
            detail["cyclic_sum"] = report.cyclic_sum.render(ctx.space)
            return status, detail

        ctx.run(f"jacobi[{k}]", "cyclic [f1, [f2, f3]_A]_A ~ 0", jacobi_check)


def _jacobi_triples(
    T: Theory, params: list[GaugeParameter], ctx: PipelineContext
) -> list[tuple[GaugeParameter, GaugeParameter, GaugeParameter]]:
    constants = [
        GaugeParameter({alpha: Expr.constant(1)}) for alpha in T.gauge_params
    ]
    triples = list(itertools.combinations(constants, 3))
    candidates = list(itertools.combinations(params, 3))
    rng = random.Random(f"{ctx.seed}:jacobi")
    count = min(ctx.samples, len(candidates))
    triples.extend(rng.sample(candidates, count))
    return triples


def reducibility_checks(ctx: PipelineContext) -> None:
    for name, f in sorted(ctx.doc.gauges.items()):

        def check(f=f) -> Outcome:
            status, detail = _weak_outcome(
                reducibility_check(f, ctx.theory, ctx.cfg), ctx.space
            )
            Q = anchor(f, ctx.theory)
            detail["anchor"] = _render_map(Q.characteristics, ctx.space)
            return status, detail

        ctx.run(f"reducibility[{name}]", "R^i_alpha(f^alpha) ~ 0", check)


def current_checks(ctx: PipelineContext) -> None:
    T = ctx.theory
    for name, j in sorted(ctx.doc.currents.items()):
        ctx.run(
            f"conserved[{name}]",
            "d_mu j^mu ~ 0",
            lambda j=j: _weak_outcome(
                conserved_current_check(j, T, ctx.cfg), ctx.space
            ),
        )
        Q = ctx.doc.symmetries.get(name)
        if Q is None:
            continue

        def bracket_check(j=j, Q=Q) -> Outcome:
            bracket = current_bracket(j, Q, j, T)
            status, detail = _triviality_outcome(
                current_class_trivial(bracket, T, ctx.cfg), ctx.space
            )
            detail["bracket"] = _render_current(bracket, ctx.space)
            return status, detail

        ctx.run(
            f"current-bracket[{name}, {name}]",
            "[[j], [j]] = [-delta_Q j] = 0",
            bracket_check,
        )


# ==========================================================
# antifield layer


def _sampled_square(
    d: Callable[[Expr], Expr], ctx: PipelineContext, name: str
) -> Expr | None:
    XT = ctx.extended
    sampler = ctx.sampler(name)
    roots = XT.roots()
    for _ in range(ctx.samples):
        e = sampler.expr(roots)
        if not d(d(e)).is_zero():
            return e
    return None


def _nilpotency(
    d: Callable[[Expr], Expr], ctx: PipelineContext, name: str
) -> Outcome:
    residuals = square_residuals(d, ctx.extended)
    if residuals:
        return FAIL, {"residuals": _render_map(residuals, ctx.space)}
    sample = _sampled_square(d, ctx, name)
    if sample is not None:
        return FAIL, {"sample": ctx.render(sample)}
    return PASS, {"samples": ctx.samples}


def bv_checks(ctx: PipelineContext) -> None:
    XT = ctx.extended

    def delta(e: Expr) -> Expr:
        return koszul_tate(e, XT)

    def gamma(e: Expr) -> Expr:
        return longitudinal(e, XT)

    def gamma_extended(e: Expr) -> Expr:
        return longitudinal(e, XT, extended=True)

    ctx.run(
        "koszul-tate-nilpotency",
        "delta^2 = 0",
        lambda: _nilpotency(delta, ctx, "delta"),
    )
    ctx.run(
        "longitudinal-nilpotency",
        "gamma^2 = 0",
        lambda: _nilpotency(gamma, ctx, "gamma"),
    )

    def anticommutator() -> Outcome:
        residuals = anticommutator_residuals(delta, gamma_extended, XT)
        return _flag(
            not residuals,
            {"residuals": _render_map(residuals, ctx.space)},
        )

    ctx.run(
        "koszul-tate-longitudinal",
        "delta gamma + gamma delta = 0",
        anticommutator,
    )


def master_checks(ctx: PipelineContext) -> None:
    XT = ctx.extended
    candidates: list[LocalFunctional] = []

    def build() -> Outcome:
        S = build_master_action(XT, ctx.cfg)
        return PASS, {"action": ctx.render(S.integrand)}

    ctx.run("master-action", "closed algebra, quadratic S", build)

    def master_equation() -> Outcome:
        S = master_action_candidate(XT)
        candidates.append(S)
        result = check_master(S, XT)
        if isinstance(result, Residual):
            return FAIL, {
                "residual": ctx.render(result.functional.integrand)
            }
        return PASS, None

    record = ctx.run("master-equation", "1/2 (S, S) = 0", master_equation)
    if record.status != PASS:
        return

    S = candidates[0]
    s = brst_operator(S, XT)
    ctx.run(
        "brst-nilpotency", "s^2 = 0", lambda: _nilpotency(s, ctx, "brst")
    )

    def decomposition() -> Outcome:
        mismatches = {}
        for g in XT.generators(1):
            parts = brst_decomposition(s, g)
            e = Expr.of(g)
            expected = {
                -1: koszul_tate(e, XT),
                0: longitudinal(e, XT, extended=True),
            }
            for degree in set(parts) | set(expected):
                got = parts.get(degree, Expr())
                if got != expected.get(degree, Expr()):
                    mismatches[f"{XT.render(g)}@{degree}"] = ctx.render(got)
        return _flag(not mismatches, {"mismatches": mismatches})

    ctx.run(
        "brst-decomposition", "s = delta + gamma + ...", decomposition
    )

    def functional_field() -> Outcome:
        sampler = ctx.sampler("functional-vf")
        roots = XT.roots()
        Q = functional_vf(S, XT)
        for _ in range(ctx.samples):
            b = sampler.expr(roots)
            via_field = prolong_evolutionary(Q, b)
            via_bracket = antibracket(S, LocalFunctional(b), XT).integrand
            if not functionals_equal(via_field, via_bracket):
                return FAIL, {"sample": ctx.render(b)}
        return PASS, {"samples": ctx.samples}

    ctx.run("functional-field", "delta_S b = (S, b)", functional_field)


# ==========================================================
# entry point


def load_document(
    text: str, aux_texts: Sequence[str] = (), name: str = "theory"
) -> TheoryDocument:
    doc = parse_theory(text, name)
    for aux in aux_texts:
        extra = parse_auxiliary(aux, doc.theory)
        doc = TheoryDocument(
            extra.theory,
            {**doc.symmetries, **extra.symmetries},
            {**doc.gauges, **extra.gauges},
            {**doc.currents, **extra.currents},
            doc.text,
        )
    return doc


STEPS: dict[str, Callable[[PipelineContext], None]] = {
    "noether": noether_checks,
    "symmetry": symmetry_checks,
    "closure": closure_checks,
    "reducibility": reducibility_checks,
    "currents": current_checks,
    "bv-nilpotency": bv_checks,
    "master": master_checks,
}


def run_pipeline(
    pipeline: str,
    text: str,
    aux_texts: Sequence[str] = (),
    name: str = "theory",
    cfg: AnsatzConfig | None = None,
    seed: int = DEFAULT_SEED,
    samples: int = DEFAULT_SAMPLES,
) -> Report:
    """
    Parse the theory and auxiliary inputs, run the validation checks and
    then the checks of ``pipeline``.
    """
    if pipeline not in PIPELINES:
        raise ConfigurationError(f"unknown pipeline `{pipeline}`")
    if pipeline in AUX_PIPELINES and not aux_texts:
        raise ConfigurationError(f"pipeline `{pipeline}` needs an input file")
    doc = load_document(text, aux_texts, name)
    ctx = PipelineContext(doc, cfg or AnsatzConfig(), seed, samples)
    report = Report(pipeline, name, input_digest([text, *aux_texts]))
    logger.info(f"running pipeline `{pipeline}` on `{name}`")

    if validate_checks(ctx):
        if pipeline == "full":
            steps = ["noether", "closure", "bv-nilpotency", "master"]
            if doc.symmetries:
                steps.append("symmetry")
            if doc.gauges:
                steps.append("reducibility")
            if doc.currents:
                steps.append("currents")
        elif pipeline == "validate":
            steps = []
        else:
            steps = [pipeline]
        for step in steps:
            STEPS[step](ctx)
    else:
        logger.error(f"theory `{name}` failed validation")
    report.checks = ctx.checks
    return report
