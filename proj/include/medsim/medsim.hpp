#pragma once

#include "medsim/random.hpp"
#include "medsim/scenario.hpp"
#include "medsim/localization.hpp"
#include "medsim/policy.hpp"
#include "medsim/engine.hpp"
#include "medsim/metrics.hpp"
#include "medsim/stats.hpp"
#include "medsim/experiment.hpp"
#include "medsim/config.hpp"
#include "medsim/report.hpp"
