// ratecurve.hpp -- sampled rate-function curves a -> value with kind tags.
#pragma once

#include <string>
#include <vector>

namespace ssep {

enum class CurveKind { upper_bound, numeric_min, asymptote };

inline const char* to_string(CurveKind k) {
    switch (k) {
        case CurveKind::upper_bound: return "upper_bound";
        case CurveKind::numeric_min: return "numeric_min";
        case CurveKind::asymptote: return "asymptote";
    }
    return "?";
}

struct RatePoint {
    double a = 0.0;
    double value = 0.0;
    CurveKind kind = CurveKind::upper_bound;
    double feasibility_residual = 0.0;  // numeric minima only
    int iterations = 0;                 // numeric minima only
    std::string meta;
};

struct RateCurve {
    std::vector<RatePoint> points;
};

}  // namespace ssep
