#pragma once

// Umbrella header: sliced mutual information estimation and its benchmarks.

#include "slicedmi/bench.hpp"
#include "slicedmi/errors.hpp"
#include "slicedmi/gaussian.hpp"
#include "slicedmi/independence.hpp"
#include "slicedmi/io.hpp"
#include "slicedmi/knn.hpp"
#include "slicedmi/math.hpp"
#include "slicedmi/mine.hpp"
#include "slicedmi/parallel.hpp"
#include "slicedmi/rng.hpp"
#include "slicedmi/sampling.hpp"
#include "slicedmi/smi.hpp"
#include "slicedmi/synthetic.hpp"
