#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "piezo/model.hpp"

namespace piezo {

enum class ConditionStatus { pass, fail, unevaluable };

std::string to_string(ConditionStatus s);

/// Outcome of one stability condition over the sampled horizon. `margin` is
/// the smallest slack observed (negative when violated) and `worst_t` the
/// sample where it occurred.
struct ConditionResult {
    std::string id;
    std::string description;
    ConditionStatus status = ConditionStatus::pass;
    double margin = 0.0;
    double worst_t = 0.0;
    std::string detail;
};

struct AdmissibilityReport {
    std::vector<ConditionResult> conditions;
    double horizon = 0.0;
    int samples = 0;
    double C1 = 0.0;
    double C2_min = 0.0;

    [[nodiscard]] bool admissible() const;
    /// First condition that did not pass, in report order; nullptr if none.
    [[nodiscard]] const ConditionResult* first_failure() const;
    [[nodiscard]] const ConditionResult* find(const std::string& id) const;
};

/// Condition ids in report order.
namespace condition {
inline constexpr const char* physical = "physical_positive";
inline constexpr const char* delay_regular = "delay_regularity";
inline constexpr const char* delay_bounds = "delay_bounds";
inline constexpr const char* delay_rate = "delay_rate";
inline constexpr const char* weight_monotone = "mu1_positive_nonincreasing";
inline constexpr const char* weight_log_rate = "mu1_log_rate";
inline constexpr const char* delta_window = "delta_below_sqrt_1_minus_d";
inline constexpr const char* delayed_weight_bound = "mu2_ratio_bound";
inline constexpr const char* delayed_weight_rate = "mu2_rate_bound";
inline constexpr const char* xi_window = "xi_bar_window";
inline constexpr const char* dissipation = "dissipation_coefficients";
}  // namespace condition

inline constexpr int kDefaultAdmissibilitySamples = 1024;

/// Checks every stability assumption on `samples` uniform points of
/// [0, horizon] plus the analytic critical points of each schedule kind.
AdmissibilityReport validate_admissibility(const Problem& problem, double horizon,
                                           int samples = kDefaultAdmissibilitySamples);

void print_report(std::ostream& os, const AdmissibilityReport& report);

}  // namespace piezo
