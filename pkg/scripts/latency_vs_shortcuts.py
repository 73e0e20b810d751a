"""Sweep for the latency_vs_shortcuts scenario into results/<scenario>."""

from _common import run

if __name__ == "__main__":
    run("latency_vs_shortcuts")
