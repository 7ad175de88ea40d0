#include "fiscalforge/evaluation.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include <nlohmann/json.hpp>

#include "fiscalforge/errors.hpp"

namespace fiscalforge {

namespace {

void require_pairs(std::span<const AllocationPair> pairs, const char* what) {
    if (pairs.empty()) throw ContractError(std::string(what) + ": no allocation pairs");
}

}  // namespace

double mae(std::span<const AllocationPair> pairs) {
    require_pairs(pairs, "mae");
    double sum = 0.0;
    for (const auto& p : pairs) {
        for (std::size_t j = 0; j < kCategories; ++j) {
            sum += std::abs(p.predicted[j] - p.actual.weights[j]);
        }
    }
    return sum / static_cast<double>(pairs.size() * kCategories);
}

double rmse(std::span<const AllocationPair> pairs) {
    require_pairs(pairs, "rmse");
    double sum = 0.0;
    for (const auto& p : pairs) {
        for (std::size_t j = 0; j < kCategories; ++j) {
            const double e = p.predicted[j] - p.actual.weights[j];
            sum += e * e;
        }
    }
    return std::sqrt(sum / static_cast<double>(pairs.size() * kCategories));
}

double cosine_similarity(std::span<const AllocationPair> pairs) {
    require_pairs(pairs, "cosine_similarity");
    double total = 0.0;
    for (const auto& p : pairs) {
        double dot = 0.0;
        double np = 0.0;
        double na = 0.0;
        for (std::size_t j = 0; j < kCategories; ++j) {
            dot += p.predicted[j] * p.actual.weights[j];
            np += p.predicted[j] * p.predicted[j];
            na += p.actual.weights[j] * p.actual.weights[j];
        }
        if (np == 0.0 || na == 0.0) {
            throw DomainError("cosine_similarity: zero-norm allocation vector");
        }
        total += dot / (std::sqrt(np) * std::sqrt(na));
    }
    return total / static_cast<double>(pairs.size());
}

double kl_divergence(std::span<const AllocationPair> pairs) {
    require_pairs(pairs, "kl_divergence");
    double total = 0.0;
    for (const auto& p : pairs) {
        double kl = 0.0;
        for (std::size_t j = 0; j < kCategories; ++j) {
            const double q = p.actual.weights[j];
            if (q <= 0.0) continue;  // 0 ln 0 = 0
            kl += q * std::log(q / std::max(p.predicted[j], kKlFloor));
        }
        total += kl;
    }
    return total / static_cast<double>(pairs.size());
}

MetricsReport compute_metrics(std::span<const AllocationPair> pairs) {
    return MetricsReport{mae(pairs), rmse(pairs), cosine_similarity(pairs), kl_divergence(pairs),
                         pairs.size()};
}

Policy actor_policy(Network actor) {
    return [net = std::move(actor)](const EnvState& s, std::size_t) {
        return forward_actor(net.params, net.spec, s);
    };
}

Policy constant_policy(AllocationAction action) {
    return [action](const EnvState&, std::size_t) { return action; };
}

EvaluationResult evaluate_policy(const Policy& policy, const FinancialSeries& test_series,
                                 const ScalerParams& scaler, const EnvConfig& env_config) {
    if (test_series.size() < 2) {
        throw DataError("evaluate_policy: test series needs at least 2 quarters");
    }
    BudgetEnv env(test_series, scaler, env_config);
    EvaluationResult result;
    auto state = env.reset();
    bool done = false;
    std::size_t t = 0;
    while (!done) {
        const auto action = policy(state, t);
        const auto step = env.step(action);
        result.pairs.push_back(AllocationPair{action.weights, step.info.empirical});
        state = step.next_state;
        done = step.done;
        ++t;
    }
    result.report = compute_metrics(result.pairs);
    return result;
}

nlohmann::json metrics_to_json(const MetricsReport& report) {
    return {{"mae", report.mae},
            {"rmse", report.rmse},
            {"cosine_similarity", report.cosine_similarity},
            {"kl_divergence", report.kl_divergence},
            {"n_quarters", report.n_quarters}};
}

void write_pairs_csv(std::ostream& out, std::span<const AllocationPair> pairs) {
    out << "t,pred_rnd,pred_sga,actual_rnd,actual_sga\n";
    const auto old_precision = out.precision(17);
    for (std::size_t t = 0; t < pairs.size(); ++t) {
        const auto& p = pairs[t];
        out << t << ',' << p.predicted[0] << ',' << p.predicted[1] << ',' << p.actual.weights[0]
            << ',' << p.actual.weights[1] << '\n';
    }
    out.precision(old_precision);
}

}  // namespace fiscalforge
