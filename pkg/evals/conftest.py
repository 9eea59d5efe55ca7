import os

import pytest


def pytest_configure(config):
    config.addinivalue_line("markers", "integration: long-horizon acceptance run; gate with RUN_ACCEPTANCE=1")


def pytest_collection_modifyitems(config, items):
    if os.getenv("RUN_ACCEPTANCE") == "1":
        return
    skip_int = pytest.mark.skip(reason="set RUN_ACCEPTANCE=1 to run the acceptance scenarios")
    for item in items:
        if "integration" in item.keywords:
            item.add_marker(skip_int)
