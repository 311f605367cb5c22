#pragma once

// Machine-readable agreement check between the sampler and the closed forms.

#include <cstdint>
#include <string>

#include "spandrop/analytics.hpp"
#include "spandrop/types.hpp"

namespace spandrop {

struct VerifyOptions {
    std::int64_t n = 100;
    std::int64_t m = 0;
    DropConfig config;
    std::uint64_t trials = 1000000;
    bool exhaustive = false;   // enumerate all 2^n masks instead of sampling
    int workers = 1;
    double tol_tv = 0.01;
    double tol_noise_free = 0.002;
    double tol_mean_keep = 0.5;
};

struct VerifyReport {
    VerifyOptions options;
    std::uint64_t trials = 0;
    double tv_distance = 0.0;
    double noise_free_gap = 0.0;
    double mean_keep_gap = 0.0;
    bool pass = false;   // all gaps within their tolerances
};

VerifyReport run_verify(const VerifyOptions& options);

// JSON rendering of the report (config echo, gaps, tolerances, pass).
std::string verify_report_json(const VerifyReport& report);

}  // namespace spandrop
