#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <memory>

#include "fiscalforge/data_ingest.hpp"
#include "fiscalforge/special_functions.hpp"

namespace fiscalforge {

// Budget categories: R&D and SG&A.
inline constexpr std::size_t kCategories = 2;
inline constexpr double kSimplexTolerance = 1e-9;
// Actions off the simplex by at most this much are renormalized silently.
inline constexpr double kSimplexRepairTolerance = 1e-6;

/// Scaled indicators observed at one quarter.
struct EnvState {
    double rnd = 0.0;
    double sga = 0.0;
    double net_income = 0.0;

    std::array<double, 3> as_array() const { return {rnd, sga, net_income}; }
    bool operator==(const EnvState&) const = default;
};

inline constexpr std::size_t kStateDim = 3;

/// Budget fractions [R&D, SG&A] chosen by the agent.
struct AllocationAction {
    std::array<double, kCategories> weights{0.5, 0.5};
    bool operator==(const AllocationAction&) const = default;
};

/// Realized next-quarter spending ratio [R&D, SG&A].
struct EmpiricalAllocation {
    std::array<double, kCategories> weights{0.5, 0.5};
    bool operator==(const EmpiricalAllocation&) const = default;
};

/// Clamps each component to [0, 1] and renormalizes. An all-zero vector maps
/// to the uniform allocation.
AllocationAction project_to_simplex(std::array<double, kCategories> raw);

bool on_simplex(const std::array<double, kCategories>& w, double tol = kSimplexTolerance);

struct RewardBreakdown {
    double accuracy_term = 0.0;    // -||a - a_hat||_1
    double smoothness_term = 0.0;  // -lambda1 ||a - a_prev||_2
    double belief_term = 0.0;      // -lambda2 KL(Dir(alpha_t) || Dir(alpha_prior))
    double total = 0.0;
};

struct EnvConfig {
    double lambda1 = 0.1;
    double lambda2 = 0.01;
    double confidence = 1.0;  // c: effective sample size added per belief update
    ConcentrationVector prior{5.0, 3.0};

    void validate() const;
};

struct StepInfo {
    std::size_t t = 0;
    EmpiricalAllocation empirical;
    ConcentrationVector belief{5.0, 3.0};
    // (net_income - rnd - sga) / (rnd + sga) of quarter t+1 on raw values.
    // Logged only; it does not enter the reward.
    double profit_signal = 0.0;
};

struct StepResult {
    EnvState next_state;
    RewardBreakdown reward;
    bool done = false;
    StepInfo info;
};

/// a_hat_t from the RAW record t+1.
EmpiricalAllocation empirical_allocation(const FinancialSeries& raw, std::size_t t);

/// alpha + c * a_hat.
ConcentrationVector update_belief(const ConcentrationVector& alpha,
                                  const EmpiricalAllocation& empirical, double confidence);

/// Sequential allocation process over one financial series. An episode runs
/// from reset() through size() - 1 steps. Copies share the underlying
/// immutable series, so cloning for parallel rollouts is cheap.
class BudgetEnv {
public:
    BudgetEnv(const FinancialSeries& raw, const ScalerParams& scaler, EnvConfig config = {});

    EnvState reset();
    StepResult step(const AllocationAction& action);

    bool done() const { return done_; }
    std::size_t cursor() const { return cursor_; }
    std::size_t episode_length() const { return data_->raw.size() - 1; }
    const ConcentrationVector& belief() const { return belief_; }
    const AllocationAction& previous_action() const { return previous_action_; }
    const EnvConfig& config() const { return config_; }
    const FinancialSeries& raw_series() const { return data_->raw; }
    EnvState state_at(std::size_t t) const;

    /// JSON-lines trace of every step; pass nullptr to disable. The stream
    /// must outlive the environment (or the next call).
    void set_trace(std::ostream* out) { trace_ = out; }

private:
    struct Data {
        FinancialSeries raw;
        FinancialSeries scaled;
    };

    std::shared_ptr<const Data> data_;
    EnvConfig config_;
    std::size_t cursor_ = 0;
    bool started_ = false;
    bool done_ = false;
    ConcentrationVector belief_;
    AllocationAction previous_action_;
    std::ostream* trace_ = nullptr;
};

}  // namespace fiscalforge
