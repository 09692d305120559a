#include "dkg/params.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dkg/error.hpp"

namespace dkg {

double TunableParams::get(ParamId id) const noexcept {
    switch (id) {
        case ParamId::Alpha: return alpha;
        case ParamId::Beta: return beta;
        case ParamId::Gamma: return gamma;
        case ParamId::Tau: return tau;
        case ParamId::W1: return w1;
        case ParamId::W2: return w2;
        case ParamId::LambdaC: return lambda_c;
    }
    return 0.0;
}

void TunableParams::set(ParamId id, double value) noexcept {
    switch (id) {
        case ParamId::Alpha: alpha = value; break;
        case ParamId::Beta: beta = value; break;
        case ParamId::Gamma: gamma = value; break;
        case ParamId::Tau: tau = value; break;
        case ParamId::W1: w1 = value; break;
        case ParamId::W2: w2 = value; break;
        case ParamId::LambdaC: lambda_c = value; break;
    }
}

ParamBounds TunableParams::bounds(ParamId id) noexcept {
    switch (id) {
        case ParamId::Alpha: return {0.0, 5.0};
        case ParamId::Beta: return {0.0, 5.0};
        case ParamId::Gamma: return {0.0, 1.0};
        case ParamId::Tau: return {0.05, 0.95};
        case ParamId::W1: return {0.0, 5.0};
        case ParamId::W2: return {0.0, 5.0};
        case ParamId::LambdaC: return {0.0, 10.0};
    }
    return {0.0, 0.0};
}

void TunableParams::clamp() noexcept {
    for (ParamId id : kAllParams) {
        const ParamBounds b = bounds(id);
        set(id, std::clamp(get(id), b.lo, b.hi));
    }
}

bool TunableParams::within_bounds() const noexcept {
    return std::all_of(kAllParams.begin(), kAllParams.end(), [this](ParamId id) {
        const double v = get(id);
        const ParamBounds b = bounds(id);
        return std::isfinite(v) && v >= b.lo && v <= b.hi;
    });
}

void TunableParams::validate() const {
    for (ParamId id : kAllParams) {
        const double v = get(id);
        const ParamBounds b = bounds(id);
        if (!std::isfinite(v) || v < b.lo || v > b.hi) {
            throw Error(ErrorCode::InvalidConfig,
                        std::string(param_name(id)) + " = " + std::to_string(v) +
                            " outside [" + std::to_string(b.lo) + ", " +
                            std::to_string(b.hi) + "]");
        }
    }
}

std::string_view param_name(ParamId id) noexcept {
    switch (id) {
        case ParamId::Alpha: return "alpha";
        case ParamId::Beta: return "beta";
        case ParamId::Gamma: return "gamma";
        case ParamId::Tau: return "tau";
        case ParamId::W1: return "w1";
        case ParamId::W2: return "w2";
        case ParamId::LambdaC: return "lambda_c";
    }
    return "";
}

std::optional<ParamId> param_from_name(std::string_view name) noexcept {
    for (ParamId id : kAllParams) {
        if (param_name(id) == name) return id;
    }
    return std::nullopt;
}

}  // namespace dkg
