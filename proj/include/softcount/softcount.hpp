#pragma once

#include "softcount/error.hpp"
#include "softcount/math.hpp"
#include "softcount/rng.hpp"
#include "softcount/distributions.hpp"
#include "softcount/series.hpp"
#include "softcount/model.hpp"
#include "softcount/moments.hpp"
#include "softcount/likelihood.hpp"
#include "softcount/neural.hpp"
#include "softcount/parallel.hpp"
#include "softcount/optimize.hpp"
#include "softcount/fit_result.hpp"
#include "softcount/simulate.hpp"
#include "softcount/estimate.hpp"
#include "softcount/neural_fit.hpp"
#include "softcount/diagnostics.hpp"
#include "softcount/io.hpp"
