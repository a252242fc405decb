#pragma once

#include "pshift/analysis.hpp"
#include "pshift/cone.hpp"
#include "pshift/config.hpp"
#include "pshift/environment.hpp"
#include "pshift/error.hpp"
#include "pshift/harness.hpp"
#include "pshift/pareto.hpp"
#include "pshift/partition.hpp"
#include "pshift/policy.hpp"
#include "pshift/rng.hpp"
