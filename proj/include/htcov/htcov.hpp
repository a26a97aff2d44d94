#pragma once

#include "htcov/coloring.hpp"
#include "htcov/concentration.hpp"
#include "htcov/distributions.hpp"
#include "htcov/errors.hpp"
#include "htcov/experiments.hpp"
#include "htcov/io.hpp"
#include "htcov/matrix_core.hpp"
#include "htcov/nets.hpp"
#include "htcov/order_stats.hpp"
#include "htcov/parallel.hpp"
#include "htcov/quadforms.hpp"
#include "htcov/report.hpp"
#include "htcov/rng.hpp"
#include "htcov/sparsify.hpp"
#include "htcov/spectral.hpp"
