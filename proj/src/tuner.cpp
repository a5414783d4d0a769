#include "mkp/tuner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <thread>

#include "mkp/error.hpp"

namespace mkp {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-12;
constexpr double kFivePointStep = 1e-4;

double inf_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

Eigen::VectorXd gradient_at(const ScalarFunction& f, const Eigen::VectorXd& x, double step) {
    const auto g = central_gradient(f, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), step);
    return Eigen::Map<const Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(g.size()));
}

double call(const ScalarFunction& f, const Eigen::VectorXd& x) {
    return f(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

}  // namespace

std::vector<double> central_gradient(const ScalarFunction& f, std::span<const double> x, double step) {
    std::vector<double> probe(x.begin(), x.end());
    std::vector<double> grad(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + step;
        const double up = f(probe);
        probe[i] = x[i] - step;
        const double down = f(probe);
        probe[i] = x[i];
        grad[i] = (up - down) / (2.0 * step);
    }
    return grad;
}

std::vector<double> five_point_gradient(const ScalarFunction& f, std::span<const double> x, double step) {
    std::vector<double> probe(x.begin(), x.end());
    std::vector<double> grad(x.size());
    auto at = [&](std::size_t i, double offset) {
        probe[i] = x[i] + offset;
        const double v = f(probe);
        probe[i] = x[i];
        return v;
    };
    for (std::size_t i = 0; i < x.size(); ++i) {
        grad[i] = (-at(i, 2 * step) + 8 * at(i, step) - 8 * at(i, -step) + at(i, -2 * step)) / (12.0 * step);
    }
    return grad;
}

BfgsResult minimize_bfgs(const ScalarFunction& f, std::vector<double> x0, const BfgsOptions& options) {
    const auto n = static_cast<Eigen::Index>(x0.size());
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(x0.data(), n);
    double fx = call(f, x);
    BfgsResult result;
    if (!std::isfinite(fx)) {
        result.x = std::move(x0);
        result.value = fx;
        return result;
    }
    Eigen::VectorXd g = gradient_at(f, x, options.difference_step);
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);

    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        if (inf_norm(g) < options.gradient_tolerance) {
            result.converged = true;
            break;
        }
        Eigen::VectorXd dir = -h * g;
        double slope = g.dot(dir);
        if (!(slope < 0.0)) {
            h.setIdentity();
            dir = -g;
            slope = -g.squaredNorm();
        }

        double alpha = 1.0;
        Eigen::VectorXd x_new;
        double f_new = 0.0;
        bool accepted = false;
        while (alpha * inf_norm(dir) > kMinStep) {
            x_new = x + alpha * dir;
            f_new = call(f, x_new);
            if (std::isfinite(f_new) && f_new <= fx + kArmijo * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;

        const Eigen::VectorXd g_new = gradient_at(f, x_new, options.difference_step);
        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (iter == 0) h *= sy / y.squaredNorm();
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd left = Eigen::MatrixXd::Identity(n, n) - rho * s * y.transpose();
            h = left * h * left.transpose() + rho * s * s.transpose();
        }
        x = x_new;
        fx = f_new;
        g = g_new;
    }
    if (!result.converged && inf_norm(g) < options.gradient_tolerance) result.converged = true;

    result.x.assign(x.data(), x.data() + n);
    result.value = fx;
    result.iterations = iter;
    return result;
}

std::string to_string(ObjectiveKind kind) {
    switch (kind) {
        case ObjectiveKind::SuccessV: return "p_v";
        case ObjectiveKind::AverageSuccessM: return "p_m_average";
        case ObjectiveKind::SubsetSuccessM: return "p_m_subset";
    }
    return "unknown";
}

ObjectiveKind objective_from_string(const std::string& name) {
    if (name == "p_v") return ObjectiveKind::SuccessV;
    if (name == "p_m_average") return ObjectiveKind::AverageSuccessM;
    if (name == "p_m_subset") return ObjectiveKind::SubsetSuccessM;
    throw Error(ErrorCode::SchemaError, "unknown objective '" + name + "'");
}

double objective_value(SuccessEvaluator& evaluator, const PhaseVector& phases, const ObjectiveSpec& spec) {
    try {
        switch (spec.kind) {
            case ObjectiveKind::SuccessV:
                return evaluator.success_v(phases, spec.decode.post_select);
            case ObjectiveKind::AverageSuccessM:
                return evaluator.evaluate(phases, spec.decode).average_p_m();
            case ObjectiveKind::SubsetSuccessM: {
                if (spec.subset.empty()) throw Error(ErrorCode::EmptySubset, "p_m_subset objective needs bases");
                if (spec.decode.strategy == Strategy::BasisConditioned) {
                    double sum = 0.0;
                    for (int m : spec.subset) sum += evaluator.success_m(phases, m, spec.decode);
                    return sum / static_cast<double>(spec.subset.size());
                }
                const SuccessReport report = evaluator.evaluate(phases, spec.decode);
                return subset_average(report.p_m, spec.subset);
            }
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateOutput) throw;
        return 0.0;
    }
    return 0.0;
}

std::vector<double> initial_phases(std::uint64_t seed, int restart, int count) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(restart)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::vector<double> out(count);
    for (auto& v : out) v = angle(rng);
    return out;
}

int default_thread_count() {
    if (const char* env = std::getenv("MKP_THREADS")) {
        const int requested = std::atoi(env);
        if (requested > 0) return requested;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

OptimizationRun multistart(const LossFactory& make_loss, int dimension, const TunerOptions& options) {
    if (options.restarts < 1) throw Error(ErrorCode::IndexOutOfRange, "restarts must be at least 1");
    std::vector<std::optional<BfgsResult>> results(options.restarts);
    std::atomic<int> next{0};
    auto worker = [&] {
        const ScalarFunction loss = make_loss();
        for (int r = next++; r < options.restarts; r = next++) {
            BfgsResult run = minimize_bfgs(loss, initial_phases(options.seed, r, dimension), options.bfgs);
            if (std::isfinite(run.value)) results[r] = std::move(run);
        }
    };
    const int threads = std::clamp(options.threads > 0 ? options.threads : default_thread_count(), 1, options.restarts);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    OptimizationRun run;
    run.seed = options.seed;
    run.restarts = options.restarts;
    run.best_loss = std::numeric_limits<double>::infinity();
    for (int r = 0; r < options.restarts; ++r) {
        if (!results[r]) {
            run.discarded.push_back(r);
            std::cerr << "mkp: restart " << r << " discarded (" << to_string(ErrorCode::NonFiniteLoss) << ")\n";
            continue;
        }
        run.history.push_back(results[r]->value);
        if (results[r]->value < run.best_loss) {
            run.best_loss = results[r]->value;
            run.best_restart = r;
            run.best_phases = PhaseVector{results[r]->x};
        }
    }
    if (run.best_restart < 0) throw Error(ErrorCode::NonFiniteLoss, "every restart produced a non-finite loss");
    return run;
}

OptimizationRun optimize(const SetupModel& setup, const VaaBasis& vaa, const MubFamily& mubs,
                         const ObjectiveSpec& objective, const TunerOptions& options) {
    const SuccessEvaluator prototype(setup, mubs, vaa);
    const LossFactory make_loss = [&]() -> ScalarFunction {
        auto evaluator = std::make_shared<SuccessEvaluator>(prototype);
        return [evaluator, &objective](std::span<const double> x) {
            return -objective_value(*evaluator, PhaseVector{{x.begin(), x.end()}}, objective);
        };
    };
    OptimizationRun run = multistart(make_loss, setup.phase_count(), options);
    run.objective = objective;
    return run;
}

double finite_difference_check(const SetupModel& setup, const VaaBasis& vaa, const MubFamily& mubs,
                               const PhaseVector& phases, const ObjectiveSpec& objective, double difference_step) {
    SuccessEvaluator evaluator(setup, mubs, vaa);
    const ScalarFunction loss = [&](std::span<const double> x) {
        return -objective_value(evaluator, PhaseVector{{x.begin(), x.end()}}, objective);
    };
    const auto fast = central_gradient(loss, phases.angles, difference_step);
    const auto reference = five_point_gradient(loss, phases.angles, kFivePointStep);
    double worst = 0.0;
    for (std::size_t i = 0; i < fast.size(); ++i) worst = std::max(worst, std::abs(fast[i] - reference[i]));
    return worst;
}

}  // namespace mkp
