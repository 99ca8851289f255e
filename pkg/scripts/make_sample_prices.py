"""Regenerate the bundled synthetic price file.

Prices follow a one-factor lognormal model over the business days from
2023-10-02 to 2024-09-30 and are rounded to four decimals. The output is
deterministic for a given ``--seed``.

    python scripts/make_sample_prices.py --out src/hqportfolio/data/sample_prices.csv
"""

import argparse
import csv

import numpy as np

TICKERS = [
    "ALDR", "BRKN", "CYPX", "DMTR", "ELQN", "FRWY", "GLMB", "HSTR", "IONQ", "JUNO",
    "KRYL", "LMNT", "MRDN", "NVAX", "OSPR", "PLTN", "QRTZ", "RVNT", "SLTE", "TRVL",
]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", required=True)
    parser.add_argument("--seed", type=int, default=20231002)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    days = np.arange("2023-10-02", "2024-10-01", dtype="datetime64[D]")
    dates = days[np.is_busday(days)]
    n, T = len(TICKERS), len(dates)

    market = rng.normal(0.0004, 0.009, size=T - 1)
    beta = rng.uniform(0.4, 1.6, size=n)
    alpha = rng.normal(0.0003, 0.0012, size=n)
    idio = rng.uniform(0.006, 0.025, size=n)
    log_ret = alpha + np.outer(market, beta) + rng.normal(size=(T - 1, n)) * idio
    start = rng.uniform(20, 400, size=n)
    prices = start * np.exp(np.vstack([np.zeros(n), np.cumsum(log_ret, axis=0)]))

    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", *TICKERS])
        for d, row in zip(dates, prices):
            w.writerow([str(d), *(f"{p:.4f}" for p in row)])


if __name__ == "__main__":
    main()
