#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string_view>
#include <vector>

#include "kahler/errors.hpp"

namespace kahler {

// Central difference at step h and h/2 combined by one Richardson step.
// `disagreement` is max|D(h) - D(h/2)| / max(1, max|value|); it is the
// signal used to detect both truncation trouble and cancellation.
struct Derivative {
    std::vector<double> value;
    double disagreement = 0.0;
};

// f(s) is the quantity evaluated at displacement s along a fixed direction.
template <typename F>
Derivative richardson_derivative(F&& f, double h) {
    auto central = [&](double step) {
        std::vector<double> plus = f(step);
        std::vector<double> minus = f(-step);
        for (std::size_t i = 0; i < plus.size(); ++i) plus[i] = (plus[i] - minus[i]) / (2.0 * step);
        return plus;
    };
    const std::vector<double> coarse = central(h);
    const std::vector<double> fine = central(0.5 * h);

    Derivative d;
    d.value.resize(fine.size());
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < fine.size(); ++i) {
        d.value[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
        diff = std::max(diff, std::abs(fine[i] - coarse[i]));
        scale = std::max(scale, std::abs(d.value[i]));
    }
    d.disagreement = diff / std::max(1.0, scale);
    return d;
}

inline void require_agreement(const Derivative& d, double tolerance, std::string_view what) {
    if (!(d.disagreement <= tolerance)) {
        std::ostringstream os;
        os << what << ": Richardson levels disagree by " << d.disagreement << " (limit " << tolerance
           << "); step too small or function not smooth at this scale";
        throw DiagnosticError(os.str());
    }
}

}  // namespace kahler
