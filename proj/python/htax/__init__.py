"""Harberger-tax prediction market engine.

The heavy lifting lives in the compiled ``_htax`` extension; this package
adds a few JSON conveniences on top.
"""

import json as _json

from ._htax import (  # noqa: F401
    AmmPair,
    ContractState,
    LedgerTotals,
    Market,
    MarketError,
    MarketParams,
    PurchaseReceipt,
    Resolution,
    SnapshotOutcome,
    accrued_tax,
    bin_bounds,
    bin_of_rate,
    frame_bounds,
    frame_of_time,
    is_valid_purchase_frame,
    max_tax,
    maturity,
    run_scenario_json,
    trading_close,
    twap,
    validate_scenario,
    verify_report_json,
)

__all__ = [
    "AmmPair",
    "ContractState",
    "LedgerTotals",
    "Market",
    "MarketError",
    "MarketParams",
    "PurchaseReceipt",
    "Resolution",
    "SnapshotOutcome",
    "accrued_tax",
    "bin_bounds",
    "bin_of_rate",
    "frame_bounds",
    "frame_of_time",
    "is_valid_purchase_frame",
    "max_tax",
    "maturity",
    "run",
    "run_scenario_json",
    "trading_close",
    "twap",
    "validate_scenario",
    "verify",
    "verify_report_json",
]


def run(scenario):
    """Run a scenario (dict or JSON text) and return the report as a dict."""
    text = scenario if isinstance(scenario, str) else _json.dumps(scenario)
    return _json.loads(run_scenario_json(text))


def verify(report):
    """Re-audit a report (dict or JSON text); returns a list of violations."""
    text = report if isinstance(report, str) else _json.dumps(report)
    return verify_report_json(text)
