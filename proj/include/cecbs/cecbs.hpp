#pragma once

#include "cecbs/baseline_cbs.hpp"
#include "cecbs/bspline.hpp"
#include "cecbs/conflicts.hpp"
#include "cecbs/constraint.hpp"
#include "cecbs/errors.hpp"
#include "cecbs/experiments.hpp"
#include "cecbs/geometry.hpp"
#include "cecbs/random.hpp"
#include "cecbs/rrt_planner.hpp"
#include "cecbs/scenario.hpp"
#include "cecbs/scenario_io.hpp"
#include "cecbs/search.hpp"
