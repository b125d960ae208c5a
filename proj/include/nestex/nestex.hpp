#pragma once

#include "nestex/bench.hpp"
#include "nestex/dataset.hpp"
#include "nestex/error.hpp"
#include "nestex/estimators.hpp"
#include "nestex/evsi.hpp"
#include "nestex/numeric.hpp"
#include "nestex/outer_function.hpp"
#include "nestex/problems.hpp"
#include "nestex/regression.hpp"
#include "nestex/stratify.hpp"
