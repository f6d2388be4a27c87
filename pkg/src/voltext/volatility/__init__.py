from voltext.volatility.har import (
    HARFamily,
    HARSpec,
    RollingProtocol,
    build_har_features,
    insanity_filter,
    ols_fit,
    rolling_forecast,
)
from voltext.volatility.measures import (
    DailyVolRecord,
    IntradayDay,
    compute_bpv,
    compute_rq,
    compute_rv,
    compute_semivariance,
    daily_record,
    days_from_prices,
    load_records,
    records_to_frame,
    save_records,
)

__all__ = [
    "DailyVolRecord",
    "HARFamily",
    "HARSpec",
    "IntradayDay",
    "RollingProtocol",
    "build_har_features",
    "compute_bpv",
    "compute_rq",
    "compute_rv",
    "compute_semivariance",
    "daily_record",
    "days_from_prices",
    "insanity_filter",
    "load_records",
    "ols_fit",
    "records_to_frame",
    "rolling_forecast",
    "save_records",
]
