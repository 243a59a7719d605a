#include "gammatail/montecarlo.hpp"

#include <cmath>
#include <string>

#include "gammatail/errors.hpp"
#include "gammatail/gamma_theory.hpp"
#include "gammatail/parallel.hpp"
#include "gammatail/ustat.hpp"

namespace gammatail {

namespace {

// Stream tags under the master seed.
constexpr std::uint64_t kTruthStream = 1;
constexpr std::uint64_t kStudyStream = 2;
constexpr std::uint64_t kAreStream = 3;

Sample draw(const SimConfig& config, std::size_t n, Seed seed) {
    if (config.source) return Sample(config.source(n, seed));
    return Sample(sample_gamma(config.params, n, seed));
}

struct MethodOutcome {
    enum class Status { Ok, Negative, Failed } status = Status::Failed;
    double variance = 0.0;
};

MethodOutcome run_method(const Sample& sample, const GEstimate& est, const VarianceMethod& method, Seed seed) {
    try {
        return {MethodOutcome::Status::Ok, var_g_hat(sample, est, method, seed)};
    } catch (const NegativeVarianceError& e) {
        return {MethodOutcome::Status::Negative, e.value()};
    } catch (const Error&) {
        return {};
    }
}

struct Replication {
    bool dropped = true;
    double g_hat = 0.0;
    double u2 = 0.0;
    std::vector<MethodOutcome> outcomes;
};

std::vector<Replication> replicate(const SimConfig& config, std::size_t n) {
    const Seed study = split(config.seed, kStudyStream);
    std::vector<Replication> reps(config.reps);
    parallel_for(config.reps, config.threads, [&](std::size_t r) {
        const Seed rep_seed = split(study, r);
        const Sample sample = draw(config, n, split(rep_seed, 0));
        PairSummary summary = accumulate(sample, config.d);
        Replication& out = reps[r];
        if (summary.n_exceed == 0) return;
        const GEstimate est = estimate_from_summary(std::move(summary));
        out.dropped = false;
        out.g_hat = est.g_hat;
        out.u2 = est.summary.u[1];
        out.outcomes.reserve(config.methods.size());
        for (std::size_t m = 0; m < config.methods.size(); ++m) {
            out.outcomes.push_back(run_method(sample, est, config.methods[m], split(rep_seed, 1 + m)));
        }
    });
    return reps;
}

void validate(const SimConfig& config) {
    config.params.validate();
    if (config.reps < 1) throw DomainError("SimConfig: reps must be at least 1");
    if (!(config.level > 0.0 && config.level < 1.0)) throw DomainError("SimConfig: level must lie in (0, 1)");
    if (!(config.n_eff > 0.0)) throw DomainError("SimConfig: n_eff must be positive");
}

}  // namespace

double SimConfig::nu() const { return nu_d(params, d); }

std::size_t SimConfig::sample_size() const {
    const double nu_value = nu();
    if (!(nu_value > kNuFloor)) throw DomainError("SimConfig: nu_d is numerically zero at this threshold");
    const double n = std::ceil(n_eff / nu_value);
    if (!(n >= 4.0)) throw DomainError("SimConfig: derived sample size " + std::to_string(n) + " is below 4");
    return static_cast<std::size_t>(n);
}

TruthEstimate true_variance(const SimConfig& config) {
    validate(config);
    const std::size_t n = config.sample_size();
    const double nu_value = config.nu();
    const Seed truth = split(config.seed, kTruthStream);

    std::vector<double> estimates(config.truth_reps, std::nan(""));
    parallel_for(config.truth_reps, config.threads, [&](std::size_t r) {
        const Sample sample = draw(config, n, split(truth, r));
        const PairSummary s = accumulate(sample, config.d);
        if (s.n_exceed > 0) estimates[r] = s.pair_sums[0] / s.pair_sums[1];
    });

    TruthEstimate out;
    double mean = 0.0;
    for (double g : estimates) {
        if (std::isnan(g)) {
            ++out.dropped;
            continue;
        }
        ++out.used;
        mean += g;
    }
    if (out.used < 2) return out;
    mean /= static_cast<double>(out.used);
    double ss = 0.0;
    for (double g : estimates) {
        if (!std::isnan(g)) ss += (g - mean) * (g - mean);
    }
    out.variance = static_cast<double>(n) * nu_value * ss / static_cast<double>(out.used - 1);
    return out;
}

SimResult run_variance_study(const SimConfig& config, std::optional<double> truth) {
    validate(config);
    const std::size_t n = config.sample_size();
    SimResult result;
    result.n_used = n;
    result.nu_d = config.nu();
    result.true_variance = truth ? *truth : true_variance(config).variance;

    const auto reps = replicate(config, n);
    const double tv = result.true_variance;
    for (std::size_t m = 0; m < config.methods.size(); ++m) {
        MethodRecord rec;
        rec.method = config.methods[m];
        double rel_sum = 0.0;
        double sq_sum = 0.0;
        std::size_t valid = 0;
        std::size_t negative = 0;
        for (const auto& rep : reps) {
            if (rep.dropped) continue;
            ++valid;
            const auto& o = rep.outcomes[m];
            if (o.status != MethodOutcome::Status::Ok) {
                ++rec.failed;
                if (o.status == MethodOutcome::Status::Negative) ++negative;
                continue;
            }
            const double scaled = o.variance * static_cast<double>(n) * rep.u2;
            rel_sum += scaled / tv;
            sq_sum += (scaled - tv) * (scaled - tv);
            ++rec.used;
        }
        if (rec.used > 0) {
            rec.ave_relative = rel_sum / static_cast<double>(rec.used);
            rec.rmse = std::sqrt(sq_sum / static_cast<double>(rec.used));
        }
        rec.negative_fraction = valid > 0 ? static_cast<double>(negative) / static_cast<double>(valid) : 0.0;
        result.records.push_back(rec);
    }
    for (const auto& rep : reps) result.dropped += rep.dropped ? 1 : 0;
    return result;
}

SimResult run_coverage_study(const SimConfig& config) {
    validate(config);
    const std::size_t n = config.sample_size();
    const double target = c_alpha(config.params.shape);
    SimResult result;
    result.n_used = n;
    result.nu_d = config.nu();

    const auto reps = replicate(config, n);
    for (std::size_t m = 0; m < config.methods.size(); ++m) {
        MethodRecord rec;
        rec.method = config.methods[m];
        std::size_t covered = 0;
        std::size_t valid = 0;
        std::size_t negative = 0;
        for (const auto& rep : reps) {
            if (rep.dropped) continue;
            ++valid;
            const auto& o = rep.outcomes[m];
            if (o.status != MethodOutcome::Status::Ok) {
                ++rec.failed;
                if (o.status == MethodOutcome::Status::Negative) ++negative;
                continue;
            }
            const GInterval ci = interval_from_variance(rep.g_hat, o.variance, config.level, rec.method);
            if (ci.lower <= target && target <= ci.upper) ++covered;
            ++rec.used;
        }
        rec.coverage = rec.used > 0 ? static_cast<double>(covered) / static_cast<double>(rec.used) : 0.0;
        rec.negative_fraction = valid > 0 ? static_cast<double>(negative) / static_cast<double>(valid) : 0.0;
        result.records.push_back(rec);
    }
    for (const auto& rep : reps) result.dropped += rep.dropped ? 1 : 0;
    return result;
}

AreEstimate empirical_are(const GammaParams& params, double d, std::size_t n, std::size_t reps, Seed seed,
                          unsigned threads) {
    params.validate();
    if (n < 4 || n % 2 != 0) throw DomainError("empirical_are: n must be even and at least 4");
    if (reps < 2) throw DomainError("empirical_are: need at least 2 replications");
    const Seed stream = split(seed, kAreStream);

    struct Pair {
        double hat = std::nan("");
        double tilde = std::nan("");
    };
    std::vector<Pair> values(reps);
    parallel_for(reps, threads, [&](std::size_t r) {
        const Seed rep_seed = split(stream, r);
        const Sample sample(sample_gamma(params, n, split(rep_seed, 0)));
        const PairSummary s = accumulate(sample, d);
        if (s.n_exceed == 0) return;
        try {
            const GTilde t = g_tilde(sample, d, split(rep_seed, 1));
            values[r] = {s.pair_sums[0] / s.pair_sums[1], t.value};
        } catch (const NoExceedanceError&) {
        }
    });

    double mh = 0.0;
    double mt = 0.0;
    AreEstimate out;
    for (const auto& v : values) {
        if (std::isnan(v.hat)) continue;
        mh += v.hat;
        mt += v.tilde;
        ++out.used;
    }
    if (out.used < 2) throw NoExceedanceError("empirical_are: too few replications with exceeding pairs");
    mh /= static_cast<double>(out.used);
    mt /= static_cast<double>(out.used);
    double sh = 0.0;
    double st = 0.0;
    for (const auto& v : values) {
        if (std::isnan(v.hat)) continue;
        sh += (v.hat - mh) * (v.hat - mh);
        st += (v.tilde - mt) * (v.tilde - mt);
    }
    out.var_hat = sh / static_cast<double>(out.used - 1);
    out.var_tilde = st / static_cast<double>(out.used - 1);
    out.ratio = out.var_hat / out.var_tilde;
    return out;
}

}  // namespace gammatail
