#pragma once

// Umbrella header: transfer-entropy network inference and node ranking for
// locating fault and disturbance sources in process time series.

#include "faultrank/analysis.hpp"
#include "faultrank/centrality.hpp"
#include "faultrank/config.hpp"
#include "faultrank/embedding.hpp"
#include "faultrank/engine.hpp"
#include "faultrank/errors.hpp"
#include "faultrank/fft.hpp"
#include "faultrank/kdtree.hpp"
#include "faultrank/math_util.hpp"
#include "faultrank/matrix.hpp"
#include "faultrank/mtr.hpp"
#include "faultrank/parallel.hpp"
#include "faultrank/report.hpp"
#include "faultrank/rng.hpp"
#include "faultrank/signal_store.hpp"
#include "faultrank/simulate.hpp"
#include "faultrank/surrogates.hpp"
#include "faultrank/te_estimators.hpp"
