#include "spandrop/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "spandrop/analytics.hpp"
#include "spandrop/findanimals.hpp"
#include "spandrop/jsonl.hpp"
#include "spandrop/sampler.hpp"
#include "spandrop/segmentation.hpp"
#include "spandrop/verify.hpp"

namespace spandrop::cli {

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string gamma_label(double g) {
    if (std::isinf(g)) return "inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", g);
    return buf;
}

std::vector<std::string> split_commas(std::string_view text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto end = comma == std::string_view::npos ? text.size() : comma;
        parts.emplace_back(text.substr(start, end - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return parts;
}

double parse_gamma_value(const std::string& s) {
    if (s == "inf" || s == "INF" || s == "Inf") return std::numeric_limits<double>::infinity();
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("bad gamma value: " + s);
    return v;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output: " + path);
    return out;
}

// ---------------------------------------------------------------- gen ----

struct GenArgs {
    fa::TaskConfig cfg;
    std::string position_mode = "uniform";
    std::string out_path;
};

int cmd_gen(GenArgs& args, std::ostream& out) {
    auto& cfg = args.cfg;
    const auto& mode = args.position_mode;
    if (mode == "uniform") {
        cfg.position_mode = fa::PositionMode::uniform;
    } else if (mode.rfind("fixed=", 0) == 0) {
        cfg.position_mode = fa::PositionMode::fixed;
        for (const auto& part : split_commas(std::string_view(mode).substr(6)))
            cfg.fixed_positions.push_back(std::stoull(part));
    } else if (mode.rfind("first=", 0) == 0) {
        cfg.position_mode = fa::PositionMode::first_k;
        cfg.first_k = std::stoull(mode.substr(6));
    } else {
        throw std::invalid_argument("bad --position-mode: " + mode);
    }
    cfg.validate();

    const fa::DatasetResult result = fa::generate_dataset(cfg);
    std::ofstream file = open_output(args.out_path);
    for (const auto& ex : result.examples) file << to_json_line(ex) << '\n';
    file.flush();
    if (!file) throw std::runtime_error("write failed: " + args.out_path);

    out << "wrote " << result.examples.size() << " records to " << args.out_path << "\n"
        << "positives=" << result.stats.positives << " negatives=" << result.stats.negatives << "\n"
        << "redundancy: mean_base_prefix_len=" << result.stats.mean_base_prefix_len
        << " frac_base_prefix_maximal=" << result.stats.frac_base_prefix_maximal << "\n";
    return 0;
}

// ------------------------------------------------------------ segment ----

struct SegmentArgs {
    std::string in_path;
    std::string out_path;
    std::string strategy = "token";
    std::string reference_field = "question";
    bool fold_case = true;
    bool strict = false;
};

int cmd_segment(SegmentArgs& args, std::ostream& out, std::ostream& err) {
    seg::Strategy strategy = seg::parse_strategy(args.strategy);
    strategy.fold_case = args.fold_case;

    std::ifstream in(args.in_path);
    if (!in) throw std::runtime_error("cannot open input: " + args.in_path);
    std::ofstream file = open_output(args.out_path);

    std::uint64_t line_no = 0, written = 0, skipped = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto record = nlohmann::ordered_json::parse(line);
            if (!record.is_object() || !record.contains("tokens") || !record["tokens"].is_array())
                throw std::runtime_error("missing \"tokens\" array");
            seg::TokenList tokens = record["tokens"].get<seg::TokenList>();

            seg::TokenList reference;
            const seg::TokenList* reference_ptr = nullptr;
            if (strategy.kind == seg::Strategy::Kind::adaptive) {
                if (!record.contains(args.reference_field) ||
                    !record[args.reference_field].is_array())
                    throw std::runtime_error("missing \"" + args.reference_field +
                                             "\" token array");
                reference = record[args.reference_field].get<seg::TokenList>();
                reference_ptr = &reference;
            }

            const seg::AdaptiveResult segmented = seg::segment(tokens, strategy, reference_ptr);
            SequenceExample ex;
            ex.id = record.contains("id") && record["id"].is_string()
                        ? record["id"].get<std::string>()
                        : "line-" + std::to_string(line_no);
            ex.spans = segmented.spans;
            ex.supporting = segmented.supporting;
            if (record.contains("label")) {
                const auto& label = record["label"];
                if (label.is_string())
                    ex.label = Label::text(label.get<std::string>());
                else if (label.is_number_integer() || label.is_number_unsigned())
                    ex.label = Label::number(label.get<std::int64_t>());
            }
            file << to_json_line(ex) << '\n';
            ++written;
        } catch (const std::exception& e) {
            const std::string msg = "line " + std::to_string(line_no) + ": " + e.what();
            if (args.strict) throw std::runtime_error(msg);
            err << "skipping " << msg << "\n";
            ++skipped;
        }
    }
    file.flush();
    if (!file) throw std::runtime_error("write failed: " + args.out_path);
    out << "wrote " << written << " records to " << args.out_path << " (skipped " << skipped
        << ")\n";
    return 0;
}

// ------------------------------------------------------------ augment ----

struct AugmentArgs {
    std::string in_path;
    std::string out_path;
    std::string mode = "bernoulli";
    std::string policy = "rejection";
    DropConfig cfg;
    BatchOptions batch;
};

int cmd_augment(AugmentArgs& args, std::ostream& out) {
    args.cfg.mode = parse_drop_mode(args.mode);
    args.cfg.policy = parse_noise_free_policy(args.policy);
    args.cfg.validate();

    const BatchSummary summary = augment_file(args.in_path, args.out_path, args.cfg, args.batch);
    out << "wrote " << summary.records_out << " records to " << args.out_path << " ("
        << summary.records_in << " in, " << summary.skipped_lines << " bad lines skipped, "
        << summary.skipped_exhausted << " retry-exhausted)\n"
        << "mean_output_length=" << summary.mean_output_length
        << " noise_free_fraction=" << summary.noise_free_fraction << "\n";
    return 0;
}

// ------------------------------------------------------------ analyze ----

struct AnalyzeArgs {
    std::string panel;
    std::string out_path;
    std::int64_t n = 100;
    double p = std::numeric_limits<double>::quiet_NaN();
    double gamma = 1.0;
    std::string gammas = "inf,100,10,1,0.1,0.01";
    std::int64_t m_max = 20;
    std::string n_list = "1,10,100,1000,10000,100000";
};

DropConfig analyze_config(double p, double gamma) {
    DropConfig cfg;
    cfg.mode = DropMode::beta_bernoulli;
    cfg.p = p;
    cfg.gamma = gamma;
    return cfg;
}

int cmd_analyze(AnalyzeArgs& args, std::ostream& out) {
    std::vector<double> gammas;
    for (const auto& part : split_commas(args.gammas)) gammas.push_back(parse_gamma_value(part));

    if (args.panel == "a") {
        const double p = std::isnan(args.p) ? 0.2 : args.p;
        if (args.out_path.empty()) args.out_path = "keep_pmf.csv";
        std::ofstream file = open_output(args.out_path);
        DropConfig bernoulli;
        bernoulli.mode = DropMode::bernoulli;
        bernoulli.p = p;
        const auto pmf_bernoulli = analytics::keep_count_distribution(args.n, bernoulli);
        const auto pmf_beta =
            analytics::keep_count_distribution(args.n, analyze_config(p, args.gamma));
        file << "k,pmf_bernoulli,pmf_beta\n";
        for (std::int64_t k = 0; k <= args.n; ++k)
            file << k << ',' << g17(pmf_bernoulli[static_cast<std::size_t>(k)]) << ','
                 << g17(pmf_beta[static_cast<std::size_t>(k)]) << '\n';
    } else if (args.panel == "b") {
        const double p = std::isnan(args.p) ? 0.2 : args.p;
        if (args.out_path.empty()) args.out_path = "noise_free.csv";
        std::ofstream file = open_output(args.out_path);
        file << "m";
        for (double g : gammas) file << ",gamma=" << gamma_label(g);
        file << '\n';
        for (std::int64_t m = 1; m <= args.m_max; ++m) {
            file << m;
            for (double g : gammas)
                file << ',' << g17(std::log(analytics::prob_noise_free(m, analyze_config(p, g))));
            file << '\n';
        }
    } else if (args.panel == "c") {
        const double p = std::isnan(args.p) ? 0.1 : args.p;
        if (args.out_path.empty()) args.out_path = "entropy.csv";
        std::ofstream file = open_output(args.out_path);
        file << "n";
        for (double g : gammas) file << ",gamma=" << gamma_label(g);
        file << '\n';
        for (const auto& part : split_commas(args.n_list)) {
            const std::int64_t n = std::stoll(part);
            file << n;
            for (double g : gammas)
                file << ',' << g17(analytics::per_span_entropy(n, analyze_config(p, g)));
            file << '\n';
        }
    } else {
        throw std::invalid_argument("--panel must be a, b or c");
    }
    out << "wrote " << args.out_path << "\n";
    return 0;
}

// ------------------------------------------------------------- verify ----

struct VerifyArgs {
    VerifyOptions options;
    std::string mode = "bernoulli";
    std::string gamma = "1";
};

int cmd_verify(VerifyArgs& args, std::ostream& out) {
    args.options.config.mode = parse_drop_mode(args.mode);
    args.options.config.gamma = parse_gamma_value(args.gamma);
    args.options.config.validate();

    const VerifyReport report = run_verify(args.options);
    out << verify_report_json(report) << "\n";
    return report.pass ? 0 : 2;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"span-dropping data augmentation toolkit"};
    app.name("spandrop");
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic subsequence-detection dataset");
    gen_cmd->add_option("--needle", gen.cfg.needle, "needle string to detect")->capture_default_str();
    gen_cmd->add_option("--n", gen.cfg.n, "sequence length")->capture_default_str();
    gen_cmd->add_option("--count", gen.cfg.count, "number of examples")->capture_default_str();
    gen_cmd->add_option("--alphabet", gen.cfg.alphabet, "character set");
    gen_cmd->add_option("--position-mode", gen.position_mode,
                        "uniform | fixed=10,110,210 | first=100")
        ->capture_default_str();
    gen_cmd->add_option("--seed", gen.cfg.seed, "master seed")->envname("SPANDROP_SEED");
    gen_cmd->add_option("--out", gen.out_path, "output JSONL path")->required();

    SegmentArgs segment;
    auto* segment_cmd = app.add_subcommand("segment", "cut raw token lists into spans");
    segment_cmd->add_option("--in", segment.in_path, "input JSONL with a \"tokens\" array")->required();
    segment_cmd->add_option("--out", segment.out_path, "output JSONL path")->required();
    segment_cmd->add_option("--strategy", segment.strategy,
                            "token | fixed=K | sentence=.,!,? | adaptive=N")
        ->capture_default_str();
    segment_cmd->add_option("--reference-field", segment.reference_field,
                            "JSONL field holding the reference tokens (adaptive)")
        ->capture_default_str();
    segment_cmd->add_flag("--fold-case,!--no-fold-case", segment.fold_case,
                          "case-fold tokens before n-gram matching");
    segment_cmd->add_flag("--strict", segment.strict, "abort on malformed lines");

    AugmentArgs aug;
    auto* augment_cmd = app.add_subcommand("augment", "write augmented copies of a JSONL dataset");
    augment_cmd->add_option("--in", aug.in_path, "input JSONL path")->required();
    augment_cmd->add_option("--out", aug.out_path, "output JSONL path")->required();
    augment_cmd->add_option("--mode", aug.mode, "bernoulli | beta_bernoulli | mask_bernoulli | mask_beta")
        ->capture_default_str();
    augment_cmd->add_option("--p", aug.cfg.p, "drop ratio in [0, 1)")->capture_default_str();
    augment_cmd->add_option("--gamma", aug.cfg.gamma, "beta concentration")->capture_default_str();
    augment_cmd->add_option("--policy", aug.policy, "off | force_keep | rejection")
        ->capture_default_str();
    augment_cmd->add_option("--epochs", aug.batch.epochs, "augmented copies per record")
        ->capture_default_str();
    augment_cmd->add_option("--seed", aug.cfg.seed, "master seed")->envname("SPANDROP_SEED");
    augment_cmd->add_option("--min-keep", aug.cfg.min_keep, "minimum surviving spans")
        ->capture_default_str();
    augment_cmd->add_option("--mask-token", aug.cfg.mask_token, "replacement token for mask modes")
        ->capture_default_str();
    augment_cmd->add_option("--max-retries", aug.cfg.max_retries, "resampling budget")
        ->capture_default_str();
    augment_cmd->add_option("--workers", aug.batch.workers, "worker threads")->capture_default_str();
    augment_cmd->add_flag("--strict", aug.batch.strict, "abort on malformed lines");

    AnalyzeArgs ana;
    auto* analyze_cmd = app.add_subcommand("analyze", "emit closed-form curves as CSV");
    analyze_cmd->add_option("--panel", ana.panel, "a (keep pmf) | b (noise-free) | c (entropy)")
        ->required();
    analyze_cmd->add_option("--out", ana.out_path, "output CSV path (default per panel)");
    analyze_cmd->add_option("--n", ana.n, "sequence length (panel a)")->capture_default_str();
    analyze_cmd->add_option("--p", ana.p, "drop ratio (default 0.2 for a/b, 0.1 for c)");
    analyze_cmd->add_option("--gamma", ana.gamma, "beta concentration (panel a)")
        ->capture_default_str();
    analyze_cmd->add_option("--gammas", ana.gammas, "comma list, inf allowed (panels b/c)")
        ->capture_default_str();
    analyze_cmd->add_option("--m-max", ana.m_max, "largest supporting count (panel b)")
        ->capture_default_str();
    analyze_cmd->add_option("--n-list", ana.n_list, "comma list of lengths (panel c)")
        ->capture_default_str();

    VerifyArgs ver;
    auto* verify_cmd = app.add_subcommand("verify", "Monte Carlo check of sampler vs closed forms");
    verify_cmd->add_option("--n", ver.options.n, "sequence length")->capture_default_str();
    verify_cmd->add_option("--m", ver.options.m, "supporting count")->capture_default_str();
    verify_cmd->add_option("--mode", ver.mode, "bernoulli | beta_bernoulli | mask_bernoulli | mask_beta")
        ->capture_default_str();
    verify_cmd->add_option("--p", ver.options.config.p, "drop ratio")->capture_default_str();
    verify_cmd->add_option("--gamma", ver.gamma, "beta concentration, inf allowed")
        ->capture_default_str();
    verify_cmd->add_option("--trials", ver.options.trials, "Monte Carlo draws")->capture_default_str();
    verify_cmd->add_option("--seed", ver.options.config.seed, "master seed")->envname("SPANDROP_SEED");
    verify_cmd->add_option("--workers", ver.options.workers, "worker threads")->capture_default_str();
    verify_cmd->add_flag("--exhaustive", ver.options.exhaustive,
                         "enumerate all 2^n masks instead of sampling (n <= 22)");
    verify_cmd->add_option("--tol-tv", ver.options.tol_tv, "total variation tolerance")
        ->capture_default_str();
    verify_cmd->add_option("--tol-noise-free", ver.options.tol_noise_free,
                           "noise-free fraction tolerance")
        ->capture_default_str();
    verify_cmd->add_option("--tol-mean-keep", ver.options.tol_mean_keep, "mean keep tolerance")
        ->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (gen_cmd->parsed()) return cmd_gen(gen, out);
        if (segment_cmd->parsed()) return cmd_segment(segment, out, err);
        if (augment_cmd->parsed()) return cmd_augment(aug, out);
        if (analyze_cmd->parsed()) return cmd_analyze(ana, out);
        if (verify_cmd->parsed()) return cmd_verify(ver, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "error: no subcommand\n";
    return 1;
}

}  // namespace spandrop::cli
