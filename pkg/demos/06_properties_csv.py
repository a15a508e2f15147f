"""Structural property checks written as one long CSV table."""
import sys

from geodiam import RggParams, induce_partition, sample_rgg
from geodiam.graphcore import distance_matrix
from geodiam.propcheck import (check_block_concentration, check_lower_stretch, measure_few_corners,
                               measure_separators, write_csv)

g = sample_rgg(RggParams(800, 0.3, "torus", 4))
P = induce_partition(g, 2)
D = distance_matrix(g)
reports = [check_lower_stretch(g), measure_separators(g, P), check_block_concentration(g, P),
           measure_few_corners(g, D, x_grid=(0, 1))]
write_csv(reports, sys.stdout, instance="torus-800-seed4")
