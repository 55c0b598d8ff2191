#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace rfield {

// Correctly rounded double-precision summation (Shewchuk's algorithm, as in
// Python's math.fsum). The accumulator keeps a list of nonoverlapping
// partials ordered by increasing magnitude; add() is exact, value() rounds
// the represented real number once. Consequences relied on elsewhere:
//   - the result is independent of the order in which addends arrive, so
//     moment estimators built on this are exactly permutation invariant;
//   - merge() of per-thread accumulators reproduces the single-threaded
//     result bit for bit, which makes parallel ensembles byte-reproducible.
// Inputs are assumed finite; infinities and NaNs propagate unspecified.
class exact_sum {
public:
    void add(double x) {
        std::size_t i = 0;
        for (std::size_t j = 0; j < partials_.size(); ++j) {
            double y = partials_[j];
            if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
            const double hi = x + y;
            const double lo = y - (hi - x);
            if (lo != 0.0) partials_[i++] = lo;
            x = hi;
        }
        partials_.resize(i);
        partials_.push_back(x);
    }

    void merge(const exact_sum& other) {
        for (double p : other.partials_) add(p);
    }

    // Sum of all addends so far, rounded once (round half to even across
    // partial boundaries, following CPython's fsum).
    double value() const {
        std::size_t n = partials_.size();
        if (n == 0) return 0.0;
        double hi = partials_[--n];
        double lo = 0.0;
        while (n > 0) {
            const double x = hi;
            const double y = partials_[--n];
            hi = x + y;
            const double yr = hi - x;
            lo = y - yr;
            if (lo != 0.0) break;
        }
        if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) ||
                      (lo > 0.0 && partials_[n - 1] > 0.0))) {
            const double y = lo * 2.0;
            const double x = hi + y;
            if (y == x - hi) hi = x;
        }
        return hi;
    }

    void reset() { partials_.clear(); }

private:
    std::vector<double> partials_;
};

} // namespace rfield
