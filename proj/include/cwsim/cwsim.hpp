#pragma once

// Umbrella header for the contention-window simulator library.

#include "cwsim/cost.hpp"
#include "cwsim/engine.hpp"
#include "cwsim/experiment.hpp"
#include "cwsim/policy.hpp"
#include "cwsim/rng.hpp"
#include "cwsim/stats.hpp"
#include "cwsim/timing.hpp"
