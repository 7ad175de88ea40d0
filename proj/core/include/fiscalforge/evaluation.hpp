#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fiscalforge/checkpoint.hpp"
#include "fiscalforge/environment.hpp"

namespace fiscalforge {

struct AllocationPair {
    std::array<double, kCategories> predicted{};
    EmpiricalAllocation actual;
};

struct MetricsReport {
    double mae = 0.0;
    double rmse = 0.0;
    double cosine_similarity = 0.0;
    double kl_divergence = 0.0;
    std::size_t n_quarters = 0;
};

// Predicted probabilities are floored at this value inside the KL log.
inline constexpr double kKlFloor = 1e-12;

/// Mean absolute componentwise error over all pairs (flattened).
double mae(std::span<const AllocationPair> pairs);
/// Root of the mean squared componentwise error (flattened).
double rmse(std::span<const AllocationPair> pairs);
/// Mean over pairs of cos(predicted, actual).
double cosine_similarity(std::span<const AllocationPair> pairs);
/// Mean over pairs of sum_j actual_j ln(actual_j / predicted_j).
double kl_divergence(std::span<const AllocationPair> pairs);

MetricsReport compute_metrics(std::span<const AllocationPair> pairs);

/// Maps the state at step t to an allocation.
using Policy = std::function<AllocationAction(const EnvState& state, std::size_t t)>;

Policy actor_policy(Network actor);
Policy constant_policy(AllocationAction action);

struct EvaluationResult {
    MetricsReport report;
    std::vector<AllocationPair> pairs;
};

/// Greedy rollout over `test_series`, comparing each action with the realized
/// next-quarter allocation.
EvaluationResult evaluate_policy(const Policy& policy, const FinancialSeries& test_series,
                                 const ScalerParams& scaler, const EnvConfig& env_config = {});

/// {"mae", "rmse", "cosine_similarity", "kl_divergence", "n_quarters"}
nlohmann::json metrics_to_json(const MetricsReport& report);

/// `t,pred_rnd,pred_sga,actual_rnd,actual_sga`, one row per pair.
void write_pairs_csv(std::ostream& out, std::span<const AllocationPair> pairs);

}  // namespace fiscalforge
