/**
 * @file params.hpp
 * @brief The live parameter vector shared by extraction, fusion, reasoning
 *        and the feedback tuner.
 */

#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace dkg {

enum class ParamId { Alpha, Beta, Gamma, Tau, W1, W2, LambdaC };

inline constexpr std::array<ParamId, 7> kAllParams = {
    ParamId::Alpha, ParamId::Beta, ParamId::Gamma, ParamId::Tau,
    ParamId::W1,    ParamId::W2,   ParamId::LambdaC};

struct ParamBounds {
    double lo;
    double hi;
    double range() const noexcept { return hi - lo; }
};

struct TunableParams {
    double alpha = 1.0;     ///< weight of the extractor probability in Conf
    double beta = 1.0;      ///< weight of graph similarity in Conf
    double gamma = 0.8;     ///< edge-weight decay
    double tau = 0.7;       ///< acceptance / prune threshold
    double w1 = 1.0;        ///< efficacy weight
    double w2 = 1.0;        ///< risk weight
    double lambda_c = 0.5;  ///< complexity penalty in the reward

    double get(ParamId id) const noexcept;
    void set(ParamId id, double value) noexcept;

    static ParamBounds bounds(ParamId id) noexcept;

    /// Clamp every field into its bounds.
    void clamp() noexcept;
    bool within_bounds() const noexcept;

    /// Throws InvalidConfig when a field is non-finite or out of bounds.
    void validate() const;

    friend bool operator==(const TunableParams&, const TunableParams&) = default;
};

std::string_view param_name(ParamId id) noexcept;
std::optional<ParamId> param_from_name(std::string_view name) noexcept;

}  // namespace dkg
