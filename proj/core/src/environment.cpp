#include "fiscalforge/environment.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "fiscalforge/errors.hpp"

namespace fiscalforge {

AllocationAction project_to_simplex(std::array<double, kCategories> raw) {
    double sum = 0.0;
    for (auto& w : raw) {
        if (std::isnan(w)) throw NumericError("project_to_simplex: NaN component");
        w = std::clamp(w, 0.0, 1.0);
        sum += w;
    }
    AllocationAction out;
    if (sum <= 0.0) return out;
    for (std::size_t j = 0; j < kCategories; ++j) out.weights[j] = raw[j] / sum;
    return out;
}

bool on_simplex(const std::array<double, kCategories>& w, double tol) {
    double sum = 0.0;
    for (double v : w) {
        if (!(v >= -tol && v <= 1.0 + tol)) return false;
        sum += v;
    }
    return std::abs(sum - 1.0) <= tol;
}

void EnvConfig::validate() const {
    if (!std::isfinite(lambda1) || lambda1 < 0.0 || !std::isfinite(lambda2) || lambda2 < 0.0) {
        throw ContractError("environment: lambda1 and lambda2 must be finite and >= 0");
    }
    if (!std::isfinite(confidence) || confidence < 0.0) {
        throw ContractError("environment: confidence must be finite and >= 0");
    }
    if (prior.size() != kCategories) {
        throw ShapeError("environment: prior must have " + std::to_string(kCategories) +
                         " components");
    }
}

EmpiricalAllocation empirical_allocation(const FinancialSeries& raw, std::size_t t) {
    if (t + 1 >= raw.size()) {
        throw ContractError("empirical_allocation: quarter " + std::to_string(t + 1) +
                            " is outside a series of length " + std::to_string(raw.size()));
    }
    const auto& next = raw[t + 1];
    const double denom = next.rnd + next.sga;
    if (!(denom > 0.0)) {
        throw DegenerateQuarterError("quarter " + next.period.label() +
                                     " has zero combined R&D and SG&A");
    }
    return EmpiricalAllocation{{next.rnd / denom, next.sga / denom}};
}

ConcentrationVector update_belief(const ConcentrationVector& alpha,
                                  const EmpiricalAllocation& empirical, double confidence) {
    if (alpha.size() != empirical.weights.size()) {
        throw ShapeError("update_belief: belief has " + std::to_string(alpha.size()) +
                         " components, allocation has " + std::to_string(empirical.weights.size()));
    }
    std::vector<double> next(alpha.values().begin(), alpha.values().end());
    for (std::size_t j = 0; j < next.size(); ++j) next[j] += confidence * empirical.weights[j];
    return ConcentrationVector(std::move(next));
}

BudgetEnv::BudgetEnv(const FinancialSeries& raw, const ScalerParams& scaler, EnvConfig config)
    : config_(std::move(config)), belief_(config_.prior) {
    config_.validate();
    if (raw.size() < 2) {
        throw DataError("environment needs at least 2 quarters, got " + std::to_string(raw.size()));
    }
    data_ = std::make_shared<const Data>(Data{raw, apply_scaler(scaler, raw)});
}

EnvState BudgetEnv::state_at(std::size_t t) const {
    const auto& r = data_->scaled[t];
    return EnvState{r.rnd, r.sga, r.net_income};
}

EnvState BudgetEnv::reset() {
    cursor_ = 0;
    started_ = true;
    done_ = false;
    belief_ = config_.prior;
    previous_action_ = AllocationAction{};
    return state_at(0);
}

StepResult BudgetEnv::step(const AllocationAction& action) {
    if (!started_) throw SequenceError("step() called before reset()");
    if (done_) throw SequenceError("step() called after the episode finished");

    AllocationAction a = action;
    if (!on_simplex(a.weights, kSimplexTolerance)) {
        if (!on_simplex(a.weights, kSimplexRepairTolerance)) {
            throw ContractError("action [" + std::to_string(a.weights[0]) + ", " +
                                std::to_string(a.weights[1]) + "] is off the simplex");
        }
        a = project_to_simplex(a.weights);
    }

    const std::size_t t = cursor_;
    const auto empirical = empirical_allocation(data_->raw, t);

    RewardBreakdown reward;
    double l1 = 0.0;
    double l2sq = 0.0;
    for (std::size_t j = 0; j < kCategories; ++j) {
        l1 += std::abs(a.weights[j] - empirical.weights[j]);
        const double d = a.weights[j] - previous_action_.weights[j];
        l2sq += d * d;
    }
    reward.accuracy_term = -l1;
    reward.smoothness_term = -config_.lambda1 * std::sqrt(l2sq);

    belief_ = update_belief(belief_, empirical, config_.confidence);
    reward.belief_term = -config_.lambda2 * dirichlet_kl(belief_, config_.prior);
    reward.total = reward.accuracy_term + reward.smoothness_term + reward.belief_term;

    previous_action_ = a;
    cursor_ = t + 1;
    done_ = cursor_ + 1 >= data_->raw.size();

    const auto& next_raw = data_->raw[t + 1];
    const double spend = next_raw.rnd + next_raw.sga;

    StepResult result;
    result.next_state = state_at(cursor_);
    result.reward = reward;
    result.done = done_;
    result.info = StepInfo{t, empirical, belief_, (next_raw.net_income - spend) / spend};

    if (trace_ != nullptr) {
        nlohmann::json line = {
            {"t", t},
            {"action", a.weights},
            {"empirical", empirical.weights},
            {"reward_terms",
             {{"accuracy", reward.accuracy_term},
              {"smoothness", reward.smoothness_term},
              {"belief", reward.belief_term},
              {"total", reward.total}}},
            {"alpha", std::vector<double>(belief_.values().begin(), belief_.values().end())},
        };
        *trace_ << line.dump() << '\n';
    }
    return result;
}

}  // namespace fiscalforge
