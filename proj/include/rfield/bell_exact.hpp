#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "rfield/bell.hpp"

namespace rfield {

// Exact-rational scalar for the feasibility LP: verdicts on rational tables
// are exact (the boundary mixture mu = 1/2 is decidable with no tolerance),
// and certificates are exact rationals.
using exact_rational = boost::multiprecision::cpp_rational;

template <>
struct bell_traits<exact_rational> {
    static exact_rational table_tol() { return 0; }
    static exact_rational pivot_tol() { return 0; }
};

using exact_marginal_set = basic_marginal_set<exact_rational>;
using exact_feasibility_result = basic_feasibility_result<exact_rational>;

} // namespace rfield
