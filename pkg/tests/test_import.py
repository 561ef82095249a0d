def test_import():
    import jetbrane

    assert jetbrane.run_pipeline
    assert "parse_theory" in dir(jetbrane)
    assert jetbrane.consts.ENGINE_VERSION


def test_documented_modules_import():
    import importlib
    import re
    from pathlib import Path

    automodule = re.compile(r"^\.\. automodule:: (\S+)", re.M)
    docs = Path(__file__).parent.parent / "docs"
    names = [
        name
        for page in sorted(docs.glob("*.rst"))
        for name in automodule.findall(page.read_text())
    ]
    assert "jetbrane.bv" in names
    for name in names:
        importlib.import_module(name)
    for extra in ("conventions.md", "report-schema.md"):
        assert (docs / extra).exists()
