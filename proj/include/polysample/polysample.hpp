#pragma once

#include "polysample/action_angle.hpp"
#include "polysample/closed_forms.hpp"
#include "polysample/geometry.hpp"
#include "polysample/hit_and_run.hpp"
#include "polysample/hpolytope.hpp"
#include "polysample/knot.hpp"
#include "polysample/mcmc_stats.hpp"
#include "polysample/polytope.hpp"
#include "polysample/random.hpp"
#include "polysample/samplers.hpp"
#include "polysample/triangulation.hpp"
