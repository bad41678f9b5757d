#pragma once

#include "psmono/errors.hpp"
#include "psmono/layout.hpp"
#include "psmono/special.hpp"
#include "psmono/series_core.hpp"
#include "psmono/kernel_functions.hpp"
#include "psmono/kernels.hpp"
#include "psmono/limits.hpp"
#include "psmono/grid.hpp"
#include "psmono/h_engine.hpp"
#include "psmono/ratio_profile.hpp"
#include "psmono/turning_points.hpp"
#include "psmono/classifier.hpp"
#include "psmono/verifier.hpp"
#include "psmono/report.hpp"
