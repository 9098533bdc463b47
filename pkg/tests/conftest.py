import math

import pytest

from retinasim.network import LayerSpec
from retinasim.neuron import InhibitionParams, TuningParams
from retinasim.plasticity import PlasticityParams

CONE_TUNING = TuningParams(peak=1.0, decay=1.0, reach=1.0)


def cone_layers(bipolar_cells=4, log_offset=1.5, plastic_until=math.inf, mode="soft"):
    """Two cones (preferred values 0 and 1) feeding a plastic bipolar layer.

    With reach 1 the drives of any stimulus between the cones sum to 1, so
    offset 1.5 makes growth settle on the optimal split.
    """
    receptors = LayerSpec("photoreceptor", 2, tuning=CONE_TUNING, channels=(0.0, 1.0))
    bipolar = LayerSpec(
        "bipolar", bipolar_cells, fan_in=2,
        inhibition=InhibitionParams(mode=mode, soft_duration=0.5),
        plasticity=PlasticityParams(log_offset=log_offset, plastic_until=plastic_until),
    )
    return [receptors, bipolar]


@pytest.fixture
def cones():
    return cone_layers()


# one line per acceptance criterion, replayed in the terminal summary
ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    def report(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
