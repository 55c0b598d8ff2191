#pragma once

// Umbrella header: everything except the exact-rational Bell mode
// (rfield/bell_exact.hpp), which pulls in multiprecision arithmetic and is
// opt-in.

#include "rfield/errors.hpp"
#include "rfield/kernels.hpp"
#include "rfield/quadrature.hpp"
#include "rfield/test_function.hpp"
#include "rfield/smearing.hpp"
#include "rfield/lattice.hpp"
#include "rfield/rng.hpp"
#include "rfield/sampler.hpp"
#include "rfield/wick.hpp"
#include "rfield/bell.hpp"
#include "rfield/io.hpp"
