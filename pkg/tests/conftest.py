import numpy as np
import pytest

from proxyfaug.datasets import write_csv

from helpers import city_cloud, make_dataset


def pytest_runtest_logreport(report):
    """One visible PASS/FAIL/SKIP line per acceptance criterion."""
    if "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call":
        status = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        print(f"\n[acceptance] {name}: {status}", flush=True)
    elif report.when == "setup" and report.skipped:
        print(f"\n[acceptance] {name}: SKIP (dataset not available)", flush=True)


@pytest.fixture
def experiment_dir(tmp_path):
    """A small on-disk experiment: dense training cloud plus query splits."""
    rng = np.random.default_rng(99)
    train = city_cloud(rng, 40, 5, spread_m=25.0)
    # sprinkle sentinels so floor computation has work to do
    rssi = np.array(train.rssi)
    rssi[rng.random(rssi.shape) < 0.2] = -200.0
    rssi[0, 0] = -157.0  # pin the experimental floor
    train = make_dataset(rssi, train.lats, train.lons)

    validation = city_cloud(rng, 12, 5, spread_m=25.0)
    test = city_cloud(rng, 15, 5, spread_m=25.0)

    paths = {
        "train": tmp_path / "train.csv",
        "validation": tmp_path / "validation.csv",
        "test": tmp_path / "test.csv",
        "out": tmp_path / "out",
    }
    write_csv(train, paths["train"])
    write_csv(validation, paths["validation"])
    write_csv(test, paths["test"])
    return paths
