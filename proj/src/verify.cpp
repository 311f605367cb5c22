#include "spandrop/verify.hpp"

#include <cmath>

#include <json.hpp>

#include "spandrop/rng.hpp"

namespace spandrop {

VerifyReport run_verify(const VerifyOptions& options) {
    options.config.validate();

    analytics::EmpiricalReport empirical;
    if (options.exhaustive) {
        empirical = analytics::exhaustive_report(options.n, options.m, options.config);
    } else {
        RandomStream rng = derive_stream(options.config.seed, 0);
        empirical = analytics::monte_carlo_report(options.n, options.m, options.config,
                                                  options.trials, rng, options.workers);
    }

    VerifyReport report;
    report.options = options;
    report.trials = empirical.trials;
    report.tv_distance = empirical.tv_distance;
    report.noise_free_gap = empirical.noise_free_gap;
    report.mean_keep_gap = empirical.mean_keep_gap;
    report.pass = report.tv_distance <= options.tol_tv &&
                  report.noise_free_gap <= options.tol_noise_free &&
                  report.mean_keep_gap <= options.tol_mean_keep;
    return report;
}

std::string verify_report_json(const VerifyReport& report) {
    nlohmann::ordered_json j;
    const double gamma = report.options.config.gamma;
    j["config"] = {
        {"mode", std::string(to_string(report.options.config.mode))},
        {"p", report.options.config.p},
        {"gamma", std::isinf(gamma) ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(gamma)},
        {"seed", report.options.config.seed},
        {"n", report.options.n},
        {"m", report.options.m},
        {"exhaustive", report.options.exhaustive},
    };
    j["trials"] = report.trials;
    j["tv_distance"] = report.tv_distance;
    j["noise_free_gap"] = report.noise_free_gap;
    j["mean_keep_gap"] = report.mean_keep_gap;
    j["tolerances"] = {
        {"tv", report.options.tol_tv},
        {"noise_free", report.options.tol_noise_free},
        {"mean_keep", report.options.tol_mean_keep},
    };
    j["pass"] = report.pass;
    return j.dump(2);
}

}  // namespace spandrop
