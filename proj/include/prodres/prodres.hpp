#pragma once

// Umbrella header for the product reservoir computing library.

#include "prodres/config.hpp"
#include "prodres/csv.hpp"
#include "prodres/errors.hpp"
#include "prodres/experiment.hpp"
#include "prodres/linalg.hpp"
#include "prodres/metrics.hpp"
#include "prodres/readout.hpp"
#include "prodres/reservoir.hpp"
#include "prodres/rng.hpp"
#include "prodres/tasks.hpp"
#include "prodres/thread_pool.hpp"
#include "prodres/weights.hpp"
