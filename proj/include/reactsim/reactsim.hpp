#pragma once

// Everything at once.

#include "reactsim/agents/aa.hpp"
#include "reactsim/agents/factory.hpp"
#include "reactsim/agents/trader.hpp"
#include "reactsim/agents/zip.hpp"
#include "reactsim/config.hpp"
#include "reactsim/exchange.hpp"
#include "reactsim/experiment.hpp"
#include "reactsim/io.hpp"
#include "reactsim/price.hpp"
#include "reactsim/profiler.hpp"
#include "reactsim/rng.hpp"
#include "reactsim/schedule.hpp"
#include "reactsim/scheduler.hpp"
#include "reactsim/session.hpp"
#include "reactsim/stats.hpp"
