#!/usr/bin/env python3
"""Render figure 1 from a 'boost run' output directory.

Usage: render_fig1.py <data_dir> <out.png>
"""

import sys

from boostfigs.cli import main

if __name__ == "__main__":
    sys.exit(main("fig1"))
