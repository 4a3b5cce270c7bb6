from src.dto.sweep import RunManifest
from src.repository.run_repository import RunRepository
from src.services.pdf_report_service import PDFReportService


def _manifest(digest, timestamp="2026-01-01T00:00:00+00:00"):
    return RunManifest(command="spectrum", config_hash=digest, tool_version="1.0.0", timestamp=timestamp,
                       outputs=["spectrum/kappa_0.5_P_10uW.csv"], summary={"series": 1})


def test_record_and_query(catalog):
    first = catalog.record(_manifest("a" * 64))
    catalog.record(_manifest("b" * 64, timestamp="2026-01-02T00:00:00+00:00"))
    assert first.outputs == ["spectrum/kappa_0.5_P_10uW.csv"]
    assert first.summary == {"series": 1}

    assert [r.config_hash[0] for r in catalog.recent()] == ["b", "a"]
    assert [r.id for r in catalog.recent(config_hash="aaaa")] == [first.id]
    assert len(catalog.recent(limit=1)) == 1


def test_lookup_by_hash(catalog):
    catalog.record(_manifest("c" * 64))
    db = catalog.session_factory()
    try:
        rows = RunRepository().get_by_config_hash(db, "c" * 64)
    finally:
        db.close()
    assert len(rows) == 1


def test_pdf_report(config):
    buffer = PDFReportService().generate_run_report(
        _manifest("d" * 64), config,
        [{"series": "kappa_0.5_P_10uW", "eta_at_zero": 0.25, "failed_points": 0}],
    )
    assert buffer.getvalue().startswith(b"%PDF")


def test_get_by_id(catalog):
    recorded = catalog.record(_manifest("e" * 64))
    db = catalog.session_factory()
    try:
        row = RunRepository().get(db, recorded.id)
    finally:
        db.close()
    assert row.config_hash == "e" * 64
