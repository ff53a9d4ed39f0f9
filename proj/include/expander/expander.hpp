#pragma once

#include "expander/calibration.hpp"
#include "expander/combinatorics.hpp"
#include "expander/dense_oracle.hpp"
#include "expander/error.hpp"
#include "expander/graph.hpp"
#include "expander/rng.hpp"
#include "expander/sequence.hpp"
#include "expander/sources.hpp"
#include "expander/spectral.hpp"
