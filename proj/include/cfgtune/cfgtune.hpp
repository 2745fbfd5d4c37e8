#pragma once

#include "cfgtune/errors.hpp"
#include "cfgtune/rng.hpp"
#include "cfgtune/param_space.hpp"
#include "cfgtune/bundled.hpp"
#include "cfgtune/sampling.hpp"
#include "cfgtune/annealing.hpp"
#include "cfgtune/hillclimb.hpp"
#include "cfgtune/early_stop.hpp"
#include "cfgtune/execution.hpp"
#include "cfgtune/command_executor.hpp"
#include "cfgtune/campaign.hpp"
#include "cfgtune/campaign_io.hpp"
#include "cfgtune/analysis.hpp"
#include "cfgtune/report.hpp"
