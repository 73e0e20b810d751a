"""Sweep for the capacity_vs_sensing scenario, extended to tau = T_s."""

from _common import run
from crnsw.harness import SCENARIOS, CAP_SENSING

if __name__ == "__main__":
    run(CAP_SENSING, sweep=SCENARIOS[CAP_SENSING][1] + (0.1,))
