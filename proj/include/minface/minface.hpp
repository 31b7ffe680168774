#pragma once

// Umbrella header: facial reduction for PSD and Euclidean distance matrix
// completion. Pulls in the pattern-graph utilities, the matrix core,
// coordinate-shadow closedness analysis, clique-based facial reduction, and
// the alternating-projection oracle together with the JSON encodings.

#include "version.hpp"
#include "graph.hpp"
#include "symmat.hpp"
#include "matcore.hpp"
#include "closedness.hpp"
#include "solver.hpp"
#include "facered.hpp"
#include "io.hpp"
