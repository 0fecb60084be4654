#pragma once

// Umbrella header for the whole library.

#include "gss/errors.hpp"
#include "gss/geometry/cone.hpp"
#include "gss/geometry/correlation.hpp"
#include "gss/harness/config.hpp"
#include "gss/harness/experiment.hpp"
#include "gss/model/evaluate.hpp"
#include "gss/model/example.hpp"
#include "gss/model/mlp.hpp"
#include "gss/selection/baselines.hpp"
#include "gss/selection/buffer.hpp"
#include "gss/selection/clustering.hpp"
#include "gss/selection/greedy.hpp"
#include "gss/selection/iqp.hpp"
#include "gss/selection/strategy.hpp"
#include "gss/streams/dataset.hpp"
#include "gss/streams/load.hpp"
#include "gss/streams/streams.hpp"
#include "gss/training/online.hpp"
#include "gss/training/projection.hpp"
