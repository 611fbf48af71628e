# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.
"""A workbench for counting and eliminating quantifiers over pseudofinite structure families."""
