from storage.report_store import ReportStore, jsonable

__all__ = ["ReportStore", "jsonable"]
