import pytest

from consultkit.harness import RunConfig, SuiteResources, bundled_suite_path


@pytest.fixture(scope="session")
def run_config() -> RunConfig:
    return RunConfig.from_dict()


@pytest.fixture(scope="session")
def resources(run_config) -> SuiteResources:
    return SuiteResources(bundled_suite_path(), index_cfg=run_config.index)


@pytest.fixture(scope="session")
def all_cases(resources):
    return resources.load_all_cases()


@pytest.fixture(scope="session")
def chest_case(resources):
    return resources.load_case("chest_pain_01")
