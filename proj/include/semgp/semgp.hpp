#pragma once

// Umbrella header for the semantic GP classification engine.

#include "semgp/dataset.hpp"
#include "semgp/ensemble.hpp"
#include "semgp/error.hpp"
#include "semgp/evolution.hpp"
#include "semgp/metrics.hpp"
#include "semgp/nodes.hpp"
#include "semgp/rng.hpp"
#include "semgp/selection.hpp"
#include "semgp/semantics.hpp"
