import json

import pytest
from jetbrane.exceptions import (
    ConfigurationError,
    DSLSemanticError,
    InternalConsistencyError,
)
from jetbrane.pipeline import (
    FAIL,
    IDENTITY_REFS,
    PASS,
    PipelineContext,
    input_digest,
    load_document,
    run_pipeline,
)
from jetbrane.theories import read_text
from jetbrane.weak import AnsatzConfig

NO_STRUCTURE = (
    "space dim=1 coords=t\nfield q\nparam a\nlagrangian 1/2 * q_[t]^2\n"
)


def run(pipeline, theory, *aux, **kwargs):
    kwargs.setdefault("samples", 3)
    return run_pipeline(
        pipeline,
        read_text(theory),
        [read_text(name) for name in aux],
        name=theory,
        **kwargs,
    )


def names(report):
    return [c.name for c in report.checks]


def statuses(report):
    return {c.name: c.status for c in report.checks}


def test_validate():
    report = run("validate", "mechanics")
    assert names(report) == [
        "helmholtz",
        "solution[linear]",
        "solution[rest]",
    ]
    assert report.ok
    assert report.exit_code == 0


def test_validation_failure_stops_the_pipeline():
    report = run("master", "em2d-broken")
    assert statuses(report)["noether-identity[eps]"] == FAIL
    assert "master-equation" not in names(report)
    assert not report.ok
    assert report.exit_code == 1


def test_pipeline_arguments():
    with pytest.raises(ConfigurationError):
        run("gauge", "mechanics")
    with pytest.raises(ConfigurationError):
        run("symmetry", "mechanics")
    with pytest.raises(DSLSemanticError):
        run_pipeline(
            "reducibility", read_text("mechanics"), ["gauge g { eps = 1 }"]
        )


def test_noether():
    report = run("noether", "em2d")
    checks = statuses(report)
    assert checks["rho[eps]"] == PASS
    assert checks["frechet-adjoint[eps]"] == PASS
    assert "module-action[R(eps=x); eps]" in checks
    assert "rho-equivariance[R(eps=y); eps]" in checks
    assert report.ok


def test_symmetry():
    report = run("symmetry", "mechanics", "mechanics.sym")
    checks = statuses(report)
    for name in ("shift", "time"):
        assert checks[f"variational[{name}]"] == PASS
        assert checks[f"eom[{name}]"] == PASS
        assert checks[f"el-commutation[{name}]"] == PASS
    assert checks["bracket[shift, time]"] == PASS
    assert report.ok


def test_reducibility():
    report = run("reducibility", "em2d", "em2d-consts.param")
    assert statuses(report)["reducibility[one]"] == PASS
    report = run("reducibility", "em2d", "em2d-x0.param")
    record = report.checks[-1]
    assert record.name == "reducibility[linear]"
    assert record.status == FAIL
    assert record.detail["refuted_on"] == "uniform"
    assert record.detail["anchor"] == {"A0": "1"}
    assert report.exit_code == 1


def test_currents():
    report = run("currents", "mechanics", "mechanics.cur")
    checks = statuses(report)
    assert checks["conserved[energy]"] == PASS
    assert checks["current-bracket[energy, energy]"] == PASS
    assert checks["conserved[momentum]"] == PASS
    assert report.ok
    record = report.checks[names(report).index("conserved[energy]")]
    assert record.detail["certificates"] == {"divergence": {"q[]": "-q_[t]"}}


def test_master():
    report = run("master", "em2d")
    assert names(report)[-5:] == [
        "master-action",
        "master-equation",
        "brst-nilpotency",
        "brst-decomposition",
        "functional-field",
    ]
    assert report.ok


def test_errors_become_failed_checks():
    report = run_pipeline("master", NO_STRUCTURE, samples=3)
    checks = {c.name: c for c in report.checks}
    assert checks["master-action"].status == FAIL
    assert checks["master-action"].detail["error"] == "ConfigurationError"
    assert checks["master-equation"].status == FAIL
    assert "brst-nilpotency" not in checks


def test_load_document_merges_auxiliary_inputs():
    doc = load_document(
        read_text("mechanics"),
        [read_text("mechanics.sym"), "solution two { q = 2 }\n"],
        "mechanics",
    )
    assert set(doc.symmetries) == {"time", "shift"}
    assert "two" in doc.theory.named_solutions
    assert doc.text == read_text("mechanics")


def test_report_is_deterministic():
    first = run("full", "em2d", "em2d.sym", seed=7)
    second = run("full", "em2d", "em2d.sym", seed=7)
    assert first.to_json(wall_time=False) == second.to_json(wall_time=False)
    data = json.loads(first.to_json())
    assert data["pipeline"] == "full"
    assert data["theory"] == "em2d"
    assert data["ok"] is True
    assert {
        "name",
        "status",
        "identity",
        "ref",
        "detail",
        "wall_time",
    } == set(data["checks"][0])
    assert "wall_time" not in json.loads(first.to_json(wall_time=False))[
        "checks"
    ][0]


def test_report_text():
    report = run("validate", "em2d-broken")
    text = report.to_text()
    assert "pipeline: validate" in text
    assert "FAIL" in text
    assert text.endswith("not passed\n")


def test_input_digest():
    assert input_digest(["ab", "c"]) != input_digest(["a", "bc"])
    assert len(input_digest([])) == 64
    report = run("validate", "mechanics")
    assert report.input_digest == input_digest([read_text("mechanics")])


@pytest.mark.parametrize(
    "theory, aux",
    [
        ("mechanics", ("mechanics.sym", "mechanics.cur")),
        ("em2d", ("em2d.sym", "em2d-consts.param")),
    ],
)
def test_every_check_names_its_identity(theory, aux):
    report = run("full", theory, *aux)
    seen = set()
    for check in report.checks:
        assert check.ref == IDENTITY_REFS[check.name.split("[", 1)[0]]
        seen.add(check.ref)
    assert {"bv.master-equation", "variational.helmholtz"} <= seen
    data = json.loads(report.to_json())
    assert all(c["ref"] for c in data["checks"])


def test_unknown_check_has_no_identity():
    doc = load_document(read_text("mechanics"), [], "mechanics")
    ctx = PipelineContext(doc, AnsatzConfig())
    with pytest.raises(InternalConsistencyError):
        ctx.run("unlisted", "0 = 0", lambda: (PASS, None))
    assert ctx.checks == []
