#pragma once

// Umbrella header.

#include "rbb/analysis.hpp"
#include "rbb/checks.hpp"
#include "rbb/harness.hpp"
#include "rbb/linalg.hpp"
#include "rbb/objective.hpp"
#include "rbb/objectives.hpp"
#include "rbb/quadgen.hpp"
#include "rbb/random.hpp"
#include "rbb/solver.hpp"
#include "rbb/sphdesign.hpp"
#include "rbb/stepsize.hpp"
