import numpy as np
import pytest

from stegograph.image import RgbImage

ACCEPTANCE_RESULTS = []


def record_acceptance(criterion, passed, detail=""):
    ACCEPTANCE_RESULTS.append((criterion, bool(passed), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in ACCEPTANCE_RESULTS:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {criterion}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20211019)


def random_image(rng, height, width):
    return RgbImage(rng.integers(0, 256, (height, width, 3), dtype=np.uint8))


def _load_photos():
    skdata = pytest.importorskip("skimage.data")
    from sklearn.datasets import load_sample_images

    photos = {name: getattr(skdata, name)() for name in ("astronaut", "chelsea", "coffee", "rocket")}
    china, flower = load_sample_images().images
    photos["china"] = china
    photos["flower"] = flower
    return {name: RgbImage(arr) for name, arr in photos.items()}


@pytest.fixture(scope="session")
def natural_photos():
    """Six natural photographs shipped with scikit-image and scikit-learn."""
    return _load_photos()
