import pytest

from steinlab import reports


@pytest.fixture(scope="session")
def corpus_reports():
    """One full corpus run (seed 7) shared by every report-consuming test.

    Checks that only read rows must not mutate the reports.
    """
    return reports.run_corpus(seed=7)
