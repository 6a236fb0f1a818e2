#!/usr/bin/env python

"""shell.py: a shortcut to running the wisig command line.

Running this script is equivalent to running `python -m wisig` and it
accepts all the same parameters. This script is provided as a convenience
for running wisig from a source checkout without installing it."""

from wisig.cli import main

if __name__ == "__main__":
    main()
