#pragma once

#include "flyatom/constants.hpp"
#include "flyatom/core_model.hpp"
#include "flyatom/dynamics_sim.hpp"
#include "flyatom/errors.hpp"
#include "flyatom/escape_analysis.hpp"
#include "flyatom/rearrange_planner.hpp"
#include "flyatom/rng.hpp"
#include "flyatom/thermal_mc.hpp"
