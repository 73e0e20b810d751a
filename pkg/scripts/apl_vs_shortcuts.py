"""Sweep for the apl_vs_shortcuts scenario into results/<scenario>."""

from _common import run

if __name__ == "__main__":
    run("apl_vs_shortcuts")
