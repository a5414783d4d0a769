#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mkp/inference.hpp"

namespace mkp {

using ScalarFunction = std::function<double(std::span<const double>)>;

struct BfgsOptions {
    int max_iterations = 200;
    double gradient_tolerance = 1e-8;
    /// Central-difference step in radians.
    double difference_step = 1e-6;
};

struct BfgsResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Central-difference gradient with the given step.
std::vector<double> central_gradient(const ScalarFunction& f, std::span<const double> x, double step);

/// Fourth-order five-point stencil gradient.
std::vector<double> five_point_gradient(const ScalarFunction& f, std::span<const double> x, double step);

/// Quasi-Newton minimization with inverse-Hessian BFGS updates, Armijo
/// backtracking and central-difference gradients. Stops when the gradient
/// infinity norm drops below the tolerance, the iteration cap is hit or the
/// line search can no longer make progress.
BfgsResult minimize_bfgs(const ScalarFunction& f, std::vector<double> x0, const BfgsOptions& options = {});

enum class ObjectiveKind { SuccessV, AverageSuccessM, SubsetSuccessM };

std::string to_string(ObjectiveKind kind);
ObjectiveKind objective_from_string(const std::string& name);

struct ObjectiveSpec {
    ObjectiveKind kind = ObjectiveKind::SuccessV;
    DecodeOptions decode;
    /// Bases averaged by SubsetSuccessM.
    std::vector<int> subset;
};

/// Value maximized by the tuner (a probability, so the loss is its negation).
/// A phase setting with no surviving output counts as probability 0.
double objective_value(SuccessEvaluator& evaluator, const PhaseVector& phases, const ObjectiveSpec& spec);

struct OptimizationRun {
    std::uint64_t seed = 0;
    int restarts = 0;
    ObjectiveSpec objective;
    PhaseVector best_phases;
    double best_loss = 0.0;
    int best_restart = -1;
    /// Final loss of each kept restart, in restart order.
    std::vector<double> history;
    /// Restarts dropped because the objective turned non-finite.
    std::vector<int> discarded;
};

struct TunerOptions {
    int restarts = 500;
    std::uint64_t seed = 0;
    /// 0 selects MKP_THREADS or the hardware concurrency.
    int threads = 0;
    BfgsOptions bfgs;
};

/// Uniform initial phases in [0, 2 pi) for one restart; depends only on (seed, restart).
std::vector<double> initial_phases(std::uint64_t seed, int restart, int count);

/// Worker count from MKP_THREADS, falling back to the hardware concurrency.
int default_thread_count();

/// Builds one loss function per worker; losses may keep private scratch state.
using LossFactory = std::function<ScalarFunction()>;

/// Multi-start BFGS over an arbitrary loss in `dimension` variables. Restarts
/// whose final loss is not finite are discarded. Throws NonFiniteLoss only when
/// every restart is discarded.
OptimizationRun multistart(const LossFactory& make_loss, int dimension, const TunerOptions& options);

/// Multi-start BFGS on L = -objective. Deterministic given the seed, and
/// independent of the worker count. Throws NonFiniteLoss only when every
/// restart is discarded.
OptimizationRun optimize(const SetupModel& setup, const VaaBasis& vaa, const MubFamily& mubs,
                         const ObjectiveSpec& objective, const TunerOptions& options);

/// Max componentwise gap between the tuner's central-difference gradient of
/// -p_V and a five-point stencil reference.
double finite_difference_check(const SetupModel& setup, const VaaBasis& vaa, const MubFamily& mubs,
                               const PhaseVector& phases, const ObjectiveSpec& objective = {},
                               double difference_step = 1e-6);

}  // namespace mkp
