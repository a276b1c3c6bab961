"""Command-line entry point.

The CLI is a thin client of the service layer: it builds the same request
models the HTTP API accepts and either executes them in-process (default) or
sends them to a running server (``--server`` / PROXYFAUG_SERVER).

Values are resolved flag > config file > environment > default. The config
file is key-value text using the flag names (``train = data/train.csv``).

Exit codes: 0 success, 1 internal/server error, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import httpx

from .client import ServiceClient
from .datasets import DatasetError, load_schema
from .service.schemas import (
    AugmentationSettings,
    AugmentRequest,
    ColumnMapping,
    EvaluateRequest,
    TuneRequest,
)

CONFIG_KEYS = {
    "train", "validation", "test", "out", "seed", "range", "smax", "ncross",
    "pmut", "k", "beta", "threads", "schema", "ks", "server",
}


def _load_config(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        sep = "=" if "=" in line else (":" if ":" in line else None)
        if sep is None:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split(sep, 1))
        if key not in CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = value
    return values


class _Resolver:
    """Flag > config > env > default resolution for one parsed invocation."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config = _load_config(args.config) if getattr(args, "config", None) else {}

    def get(self, key: str, default=None, cast=str, env: str | None = None):
        flag_value = getattr(self.args, key.replace("-", "_"), None)
        if flag_value is not None:
            return flag_value
        if key in self.config:
            return cast(self.config[key])
        if env is not None and os.environ.get(env):
            return cast(os.environ[env])
        return default

    def require(self, key: str, cast=str):
        value = self.get(key, cast=cast)
        if value is None:
            raise ValueError(f"missing required option --{key} (not on the command line or in the config file)")
        return value


def _parse_ks(text: str) -> list[int]:
    """Parse '1,2,3' and '1-15' (both may be mixed: '1-4,6,8')."""
    ks: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            ks.extend(range(int(lo), int(hi) + 1))
        else:
            ks.append(int(part))
    if not ks:
        raise ValueError(f"could not parse any k values from {text!r}")
    return ks


def _columns(resolver: _Resolver) -> ColumnMapping | None:
    schema_path = resolver.get("schema")
    if schema_path is None:
        return None
    schema = load_schema(schema_path)
    return ColumnMapping(
        rssi_columns=list(schema.rssi_columns) if schema.rssi_columns else None,
        rssi_prefix=schema.rssi_prefix,
        lat_column=schema.lat_column,
        lon_column=schema.lon_column,
        origin_column=schema.origin_column,
        sentinel=schema.sentinel,
    )


def _client(resolver: _Resolver) -> ServiceClient:
    return ServiceClient(base_url=resolver.get("server", env="PROXYFAUG_SERVER"))


def _threads(resolver: _Resolver) -> int:
    return resolver.get("threads", default=1, cast=int, env="PROXYFAUG_THREADS")


def cmd_augment(args: argparse.Namespace) -> int:
    resolver = _Resolver(args)
    request = AugmentRequest(
        train_csv=resolver.require("train"),
        out_dir=resolver.require("out"),
        params=AugmentationSettings(
            range_m=resolver.get("range", default=20.0, cast=float),
            max_cluster_size=resolver.get("smax", default=2, cast=int),
            crossovers_per_pair=resolver.get("ncross", default=8, cast=int),
            mutation_prob=resolver.get("pmut", default=0.3, cast=float),
            seed=resolver.get("seed", default=0, cast=int),
        ),
        columns=_columns(resolver),
        threads=_threads(resolver),
    )
    with _client(resolver) as client:
        result = client.augment(request)
    print(
        f"augmented {result.input_size} -> {result.output_size} fingerprints "
        f"(bound {result.size_bound}, floor {result.floor:g} dBm, "
        f"seed {result.params.seed}) in {result.elapsed_s}s"
    )
    print(f"wrote {result.output_csv}")
    print(f"wrote {result.manifest_path}")
    return 0


def _query_split(resolver: _Resolver) -> str:
    validation = resolver.get("validation")
    test = resolver.get("test")
    if (validation is None) == (test is None):
        raise ValueError("choose the query split: exactly one of --validation / --test")
    return validation if validation is not None else test


def cmd_evaluate(args: argparse.Namespace) -> int:
    resolver = _Resolver(args)
    request = EvaluateRequest(
        train_csv=resolver.require("train"),
        queries_csv=_query_split(resolver),
        out_dir=resolver.require("out"),
        k=resolver.get("k", default=6, cast=int),
        beta=resolver.get("beta", default=2.6, cast=float),
        columns=_columns(resolver),
        threads=_threads(resolver),
    )
    with _client(resolver) as client:
        result = client.evaluate(request)
    print(
        f"train={result.counts['train']} queries={result.counts['queries']} "
        f"k={request.k} beta={request.beta:g} floor={result.floor:g} dBm"
    )
    print(
        f"mean={result.mean:.1f} m  median={result.median:.1f} m  "
        f"p75={result.p75:.1f} m"
    )
    print(f"wrote {result.report_path}")
    print(f"wrote {result.cdf_path}")
    return 0


def cmd_tune(args: argparse.Namespace) -> int:
    resolver = _Resolver(args)
    request = TuneRequest(
        train_csv=resolver.require("train"),
        validation_csv=resolver.require("validation"),
        out_dir=resolver.require("out"),
        ks=_parse_ks(resolver.require("ks")),
        beta=resolver.get("beta", default=2.6, cast=float),
        columns=_columns(resolver),
        threads=_threads(resolver),
    )
    with _client(resolver) as client:
        result = client.tune(request)
    for row in result.rows:
        print(f"k={row.k:<3d} mean={row.mean_m:.1f} m  median={row.median_m:.1f} m")
    print(f"wrote {result.csv_path}")
    print(f"wrote {result.manifest_path}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("proxyfaug.service:app", host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="proxyfaug",
        description="Proximity-based fingerprint augmentation and kNN positioning",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="key-value config file; flags override it")
        p.add_argument("--schema", help="CSV column-mapping file")
        p.add_argument("--threads", type=int, help="worker threads (env PROXYFAUG_THREADS)")
        p.add_argument("--server", help="base URL of a running service (env PROXYFAUG_SERVER); "
                                        "default is in-process execution")

    p_aug = sub.add_parser("augment", help="augment a training CSV")
    p_aug.add_argument("--train", help="training CSV path")
    p_aug.add_argument("--out", help="output directory")
    p_aug.add_argument("--seed", type=int, help="RNG seed (default 0)")
    p_aug.add_argument("--range", type=float, help="proximity range in meters (default 20)")
    p_aug.add_argument("--smax", type=int, help="maximum cluster size (default 2)")
    p_aug.add_argument("--ncross", type=int, help="offspring per pair (default 8)")
    p_aug.add_argument("--pmut", type=float, help="mutation probability (default 0.3)")
    common(p_aug)
    p_aug.set_defaults(func=cmd_augment)

    p_eval = sub.add_parser("evaluate", help="fit on a training CSV and report errors on a query split")
    p_eval.add_argument("--train", help="training CSV path (original or augmented)")
    p_eval.add_argument("--validation", help="validation CSV (query split)")
    p_eval.add_argument("--test", help="test CSV (query split)")
    p_eval.add_argument("--out", help="output directory")
    p_eval.add_argument("--k", type=int, help="neighbor count (default 6)")
    p_eval.add_argument("--beta", type=float, help="powed exponent (default 2.6)")
    common(p_eval)
    p_eval.set_defaults(func=cmd_evaluate)

    p_tune = sub.add_parser("tune", help="sweep k on the validation split")
    p_tune.add_argument("--train", help="training CSV path")
    p_tune.add_argument("--validation", help="validation CSV path")
    p_tune.add_argument("--out", help="output directory")
    p_tune.add_argument("--ks", help="k values, e.g. '1-15' or '1,2,4,8'")
    p_tune.add_argument("--beta", type=float, help="powed exponent (default 2.6)")
    common(p_tune)
    p_tune.set_defaults(func=cmd_tune)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DatasetError, OSError, ValueError) as exc:
        print(f"proxyfaug: error: {exc}", file=sys.stderr)
        return 2
    except httpx.HTTPStatusError as exc:
        print(f"proxyfaug: {exc}", file=sys.stderr)
        return 2 if exc.response.status_code < 500 else 1
    except httpx.HTTPError as exc:
        print(f"proxyfaug: cannot reach server: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - last-resort diagnostic
        print(f"proxyfaug: internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
