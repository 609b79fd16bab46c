#pragma once

// Umbrella header for the whole library.

#include "slmon/error.hpp"
#include "slmon/opinion.hpp"
#include "slmon/operators.hpp"
#include "slmon/histogram.hpp"
#include "slmon/assessor.hpp"
#include "slmon/trajectory.hpp"
#include "slmon/faults.hpp"
#include "slmon/scenario.hpp"
#include "slmon/config.hpp"
#include "slmon/pipeline.hpp"
