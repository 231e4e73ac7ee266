"""Figure scripts for spinbeam CSV/JSON outputs.

This package talks only to the file contract of the ``spinbeam`` CLI
(CSV with an embedded ``# manifest:`` line plus JSON sidecars); it does
not import the simulation package.
"""

__version__ = "0.1.0"
